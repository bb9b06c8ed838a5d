//! Finitely supported elements of the crossed product of `C[-∞, +∞]` by the
//! translation action of ℤ, their representation on L²(ℝ), the gauge action
//! and the conditional expectation.
//!
//! The generator `α` acts by `α(g)(x) = g(x + 1)`. With the Fourier
//! convention used throughout the crate this is the direction in which
//! `a ↦ Σ a_j(D) e^{-ijM}` is multiplicative.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde_json::{Map, Value};

use crate::dsl::parse_function;
use crate::error::SymbolError;
use crate::funcat::{CatalogItem, ExtendedFunction, PeriodicFunction, SharpElement};
use crate::opalg::{normalize, DiamondExpr, OpExpr};

/// `α^k(g)`.
pub fn alpha(g: &ExtendedFunction, k: i64) -> ExtendedFunction {
    g.clone().shift(-(k as f64))
}

fn scale_fn(f: &ExtendedFunction, z: C64) -> ExtendedFunction {
    match f.as_const() {
        Some(c) => ExtendedFunction::constant(c * z),
        None if z == C64::new(1.0, 0.0) => f.clone(),
        None => f.clone().scale(z),
    }
}

fn is_zero_fn(f: &ExtendedFunction) -> bool {
    f.as_const() == Some(C64::new(0.0, 0.0))
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CPElement {
    coeffs: BTreeMap<i64, ExtendedFunction>,
}

impl CPElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coeffs<I: IntoIterator<Item = (i64, ExtendedFunction)>>(it: I) -> Self {
        let mut out = CPElement::zero();
        for (j, f) in it {
            out.add_at(j, f);
        }
        out
    }

    /// The unitary `𝐝_k`.
    pub fn d(k: i64) -> Self {
        Self::from_coeffs([(k, ExtendedFunction::real(1.0))])
    }

    /// The embedded coefficient `i(a)`, supported at 0.
    pub fn embed(a: ExtendedFunction) -> Self {
        Self::from_coeffs([(0, a)])
    }

    fn add_at(&mut self, j: i64, f: ExtendedFunction) {
        if is_zero_fn(&f) {
            return;
        }
        let merged = match self.coeffs.remove(&j) {
            Some(prev) => prev.add(f),
            None => f,
        };
        if !is_zero_fn(&merged) {
            self.coeffs.insert(j, merged);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, ExtendedFunction> {
        &self.coeffs
    }

    pub fn coeff(&self, j: i64) -> ExtendedFunction {
        self.coeffs.get(&j).cloned().unwrap_or_else(|| ExtendedFunction::real(0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|j|` in the support, `None` for zero.
    pub fn support_radius(&self) -> Option<u64> {
        self.coeffs.keys().map(|j| j.unsigned_abs()).max()
    }

    pub fn scale(&self, z: C64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(j, f)| (*j, scale_fn(f, z))))
    }

    pub fn add(&self, other: &CPElement) -> Self {
        let mut out = self.clone();
        for (j, f) in &other.coeffs {
            out.add_at(*j, f.clone());
        }
        out
    }

    /// Largest coefficient difference over the sample points and both limits.
    pub fn sampled_distance(&self, other: &CPElement, xs: &[f64]) -> f64 {
        let keys: std::collections::BTreeSet<i64> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        let mut d: f64 = 0.0;
        for j in keys {
            let (a, b) = (self.coeff(j), other.coeff(j));
            d = d.max((a.limit_minus() - b.limit_minus()).norm());
            d = d.max((a.limit_plus() - b.limit_plus()).norm());
            for &x in xs {
                d = d.max((a.eval(x) - b.eval(x)).norm());
            }
        }
        d
    }

    /// `{"j": "function"}` with functions in the expression syntax.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (j, f) in &self.coeffs {
            m.insert(j.to_string(), Value::String(f.to_string()));
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self, SymbolError> {
        let obj = v.as_object().ok_or_else(|| SymbolError::BadParameters("crossed-product element must be an object".into()))?;
        let mut out = CPElement::zero();
        for (k, f) in obj {
            let j: i64 = k.parse().map_err(|_| SymbolError::BadParameters(format!("bad index `{k}`")))?;
            let text = f.as_str().ok_or_else(|| SymbolError::BadParameters(format!("coefficient {j} must be a string")))?;
            match parse_function(text)? {
                CatalogItem::Extended(a) => out.add_at(j, a),
                _ => return Err(SymbolError::BadParameters(format!("coefficient {j} must be a function on the extended line"))),
            }
        }
        Ok(out)
    }
}

/// `(f g)(n) = Σ_k f_k α^k(g_{n-k})`.
pub fn cp_mul(f: &CPElement, g: &CPElement) -> CPElement {
    let mut out = CPElement::zero();
    for (k, fk) in &f.coeffs {
        for (m, gm) in &g.coeffs {
            let term = match (fk.as_const(), gm.as_const()) {
                (Some(a), Some(b)) => ExtendedFunction::constant(a * b),
                (Some(a), None) if a == C64::new(1.0, 0.0) => alpha(gm, *k),
                (None, Some(b)) if b == C64::new(1.0, 0.0) => fk.clone(),
                _ => fk.clone().mul(alpha(gm, *k)),
            };
            out.add_at(k + m, term);
        }
    }
    out
}

/// `f*(n) = α^n(conj f_{-n})`.
pub fn cp_star(f: &CPElement) -> CPElement {
    CPElement::from_coeffs(f.coeffs.iter().map(|(j, a)| (-j, alpha(&a.conj(), -j))))
}

/// `(z^j a_j)_j`.
pub fn circle_action(z: C64, f: &CPElement) -> Result<CPElement, SymbolError> {
    if (z.norm() - 1.0).abs() > 1e-12 {
        return Err(SymbolError::NotUnimodular(z.norm()));
    }
    Ok(CPElement::from_coeffs(f.coeffs.iter().map(|(j, a)| {
        (*j, scale_fn(a, z.powi(*j as i32)))
    })))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    pub value: ExtendedFunction,
    pub nodes: usize,
    /// Largest distance between the trapezoid quadrature of the circle
    /// integral and the 0th coefficient over the sample points.
    pub quadrature_residual: f64,
}

/// Sample points of the expectation cross-check.
fn check_points() -> Vec<f64> {
    let mut xs: Vec<f64> = (0..401).map(|k| -10.0 + 0.05 * k as f64).collect();
    xs.extend([-1e6, 1e6]);
    xs
}

/// Default node count: four times the support radius plus one.
pub fn default_quadrature(f: &CPElement) -> usize {
    4 * (f.support_radius().unwrap_or(0) as usize + 1)
}

pub fn cond_expectation(f: &CPElement, quadrature: usize) -> Result<Expectation, SymbolError> {
    let needed = 2 * (f.support_radius().unwrap_or(0) as usize + 1);
    if quadrature < needed {
        return Err(SymbolError::QuadratureTooCoarse { nodes: quadrature, needed });
    }
    let value = f.coeff(0);
    let nodes: Vec<C64> = (0..quadrature).map(|q| C64::from_polar(1.0, 2.0 * PI * q as f64 / quadrature as f64)).collect();
    let mut residual: f64 = 0.0;
    for x in check_points() {
        let mut s = C64::new(0.0, 0.0);
        for z in &nodes {
            for (j, a) in &f.coeffs {
                s += z.powi(*j as i32) * a.eval(x);
            }
        }
        s /= quadrature as f64;
        residual = residual.max((s - value.eval(x)).norm());
    }
    Ok(Expectation { value, nodes: quadrature, quadrature_residual: residual })
}

/// `Σ_j a_j(D) e^{-ijM}`.
pub fn phi_map(f: &CPElement) -> DiamondExpr {
    let terms: Vec<OpExpr> = f
        .coeffs
        .iter()
        .map(|(j, a)| {
            let shift = OpExpr::Mult(SharpElement::from_periodic(PeriodicFunction::e(-j)));
            OpExpr::Prod(vec![OpExpr::FMult(a.clone()), shift])
        })
        .collect();
    let e = if terms.is_empty() { OpExpr::zero() } else { OpExpr::Sum(terms) };
    DiamondExpr::new(normalize(&e)).expect("periodic multiplications have constant extended parts")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xs() -> Vec<f64> {
        (0..81).map(|k| -4.0 + 0.1 * k as f64).collect()
    }

    fn sample() -> CPElement {
        CPElement::from_coeffs([
            (-1, ExtendedFunction::b()),
            (0, ExtendedFunction::t().scale(C64::new(0.0, 2.0))),
            (2, ExtendedFunction::smoothstep(0.5, 0.7)),
        ])
    }

    #[test]
    fn units_cancel() {
        assert_eq!(cp_mul(&CPElement::d(1), &CPElement::d(-1)), CPElement::d(0));
    }

    #[test]
    fn covariance_in_the_algebra() {
        let a = ExtendedFunction::smoothstep(0.3, 0.4);
        let lhs = cp_mul(&cp_mul(&CPElement::d(1), &CPElement::embed(a.clone())), &cp_star(&CPElement::d(1)));
        let rhs = CPElement::embed(alpha(&a, 1));
        assert!(lhs.sampled_distance(&rhs, &xs()) < 1e-15);
        // α moves the transition one unit to the left
        assert!((alpha(&a, 1).eval(-0.7) - a.eval(0.3)).norm() < 1e-15);
    }

    #[test]
    fn embedded_product_is_pointwise() {
        let p = cp_mul(&CPElement::embed(ExtendedFunction::b()), &CPElement::embed(ExtendedFunction::t()));
        let want = CPElement::embed(ExtendedFunction::b().mul(ExtendedFunction::t()));
        assert!(p.sampled_distance(&want, &xs()) < 1e-15);
    }

    #[test]
    fn star_examples() {
        let i = C64::new(0.0, 1.0);
        assert_eq!(cp_star(&CPElement::d(0).scale(i)).coeff(0).as_const(), Some(-i));
        assert_eq!(cp_star(&CPElement::d(1)), CPElement::d(-1));
        let f = sample();
        assert!(cp_star(&cp_star(&f)).sampled_distance(&f, &xs()) < 1e-15);
    }

    #[test]
    fn star_is_antimultiplicative() {
        let f = sample();
        let g = CPElement::from_coeffs([(1, ExtendedFunction::c()), (-2, ExtendedFunction::chi(0.6))]);
        let lhs = cp_star(&cp_mul(&f, &g));
        let rhs = cp_mul(&cp_star(&g), &cp_star(&f));
        assert!(lhs.sampled_distance(&rhs, &xs()) < 1e-14);
    }

    #[test]
    fn gauge_action() {
        let f = sample();
        assert!(circle_action(C64::new(1.0, 0.0), &f).unwrap().sampled_distance(&f, &xs()) < 1e-15);
        let z = C64::from_polar(1.0, 0.7);
        let d3 = circle_action(z, &CPElement::d(3)).unwrap();
        assert!((d3.coeff(3).as_const().unwrap() - z.powi(3)).norm() < 1e-15);
        let g = CPElement::from_coeffs([(1, ExtendedFunction::c())]);
        let lhs = circle_action(z, &cp_mul(&f, &g)).unwrap();
        let rhs = cp_mul(&circle_action(z, &f).unwrap(), &circle_action(z, &g).unwrap());
        assert!(lhs.sampled_distance(&rhs, &xs()) < 1e-14);
        assert_eq!(circle_action(C64::new(2.0, 0.0), &f), Err(SymbolError::NotUnimodular(2.0)));
    }

    #[test]
    fn expectation() {
        let e = cond_expectation(&CPElement::d(2), 12).unwrap();
        assert_eq!(e.value.as_const(), Some(C64::new(0.0, 0.0)));
        assert!(e.quadrature_residual < 1e-10);
        let f = sample();
        let e = cond_expectation(&f, default_quadrature(&f)).unwrap();
        assert!(e.quadrature_residual < 1e-10);
        let again = cond_expectation(&CPElement::embed(e.value.clone()), 4).unwrap();
        assert!(CPElement::embed(again.value).sampled_distance(&CPElement::embed(e.value), &xs()) == 0.0);
        assert_eq!(cond_expectation(&f, 5), Err(SymbolError::QuadratureTooCoarse { nodes: 5, needed: 6 }));
    }

    #[test]
    fn phi_map_examples() {
        assert_eq!(phi_map(&CPElement::d(0)).into_expr(), OpExpr::Identity);
        let e = phi_map(&CPElement::d(-1)).into_expr();
        assert_eq!(e, normalize(&OpExpr::mult_periodic(PeriodicFunction::e(1))));
    }

    #[test]
    fn json_roundtrip() {
        let f = sample();
        let back = CPElement::from_json(&f.to_json()).unwrap();
        assert!(back.sampled_distance(&f, &xs()) < 1e-15);
    }
}
