//! The principal symbol on the six charts of X × {−∞, +∞}, the square-boundary
//! symbol of the commutative subalgebra, winding numbers and the winding index.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::SymbolError;
use crate::funcat::ExtReal;
use crate::opalg::OpExpr;

/// Sign relating the counterclockwise winding of the square-boundary symbol
/// to the Fredholm index. Calibrated once against the grid oracle on `B3`.
pub const INDEX_SIGN: i64 = 1;

/// Which infinity of the frequency variable a chart sits over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum XiEnd {
    Minus,
    Plus,
}

impl XiEnd {
    fn ext(self) -> ExtReal {
        match self {
            XiEnd::Minus => ExtReal::NegInf,
            XiEnd::Plus => ExtReal::PosInf,
        }
    }
}

/// A point of X × {−∞, +∞}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaPoint {
    /// `(x, e^{ix})` on the line.
    Line { x: f64, xi: XiEnd },
    /// `(±∞, e^{iθ})` on one of the two circles.
    Circle { plus: bool, theta: f64, xi: XiEnd },
}

/// Value of the principal symbol of `e` at a point.
pub fn sigma_at(e: &OpExpr, p: SigmaPoint) -> C64 {
    match e {
        OpExpr::Identity => C64::new(1.0, 0.0),
        OpExpr::Scalar(z, c) => z * sigma_at(c, p),
        OpExpr::Mult(s) => match p {
            SigmaPoint::Line { x, .. } => s.eval(x),
            SigmaPoint::Circle { plus, theta, .. } => s.eval_circle(plus, theta),
        },
        OpExpr::FMult(b) => {
            let xi = match p {
                SigmaPoint::Line { xi, .. } | SigmaPoint::Circle { xi, .. } => xi,
            };
            b.eval_ext(xi.ext())
        }
        OpExpr::Sum(cs) => cs.iter().map(|c| sigma_at(c, p)).sum(),
        OpExpr::Prod(cs) => cs.iter().map(|c| sigma_at(c, p)).product(),
        OpExpr::Adjoint(c) => sigma_at(c, p).conj(),
    }
}

/// Sampling of the six charts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SigmaGrid {
    pub line_samples: usize,
    pub line_half_length: f64,
    pub circle_samples: usize,
}

impl Default for SigmaGrid {
    fn default() -> Self {
        SigmaGrid { line_samples: 2048, line_half_length: 64.0, circle_samples: 1024 }
    }
}

impl SigmaGrid {
    /// Symmetric line grid plus the two transition ends ±1/5.
    pub fn line_points(&self) -> Vec<f64> {
        let n = self.line_samples.max(2);
        let h = self.line_half_length;
        let mut xs: Vec<f64> = (0..n).map(|j| -h + 2.0 * h * j as f64 / (n - 1) as f64).collect();
        xs.push(-0.2);
        xs.push(0.2);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        xs
    }

    pub fn circle_points(&self) -> Vec<f64> {
        let n = self.circle_samples.max(3);
        (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
    }
}

/// One sampled chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chart {
    pub name: &'static str,
    pub params: Vec<f64>,
    #[serde(skip)]
    pub values: Vec<C64>,
}

impl Chart {
    pub fn min_modulus(&self) -> (f64, f64) {
        self.params
            .iter()
            .zip(&self.values)
            .map(|(p, v)| (v.norm(), *p))
            .fold((f64::INFINITY, f64::NAN), |a, b| if b.0 < a.0 { b } else { a })
    }

    /// CSV with header `param,re,im`.
    pub fn to_csv(&self) -> String {
        curve_csv(&self.params, &self.values)
    }
}

/// CSV with header `param,re,im`.
pub fn curve_csv(params: &[f64], values: &[C64]) -> String {
    let mut s = String::from("param,re,im\n");
    for (p, v) in params.iter().zip(values) {
        let _ = writeln!(s, "{p:.15e},{:.15e},{:.15e}", v.re, v.im);
    }
    s
}

pub const CHART_NAMES: [&str; 6] =
    ["line_minusXi", "line_plusXi", "circneg_minusXi", "circneg_plusXi", "circpos_minusXi", "circpos_plusXi"];

/// The principal symbol sampled on its six charts, in the order of
/// [`CHART_NAMES`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaSymbol {
    pub grid: SigmaGrid,
    pub charts: Vec<Chart>,
}

impl SigmaSymbol {
    pub fn chart(&self, name: &str) -> &Chart {
        self.charts.iter().find(|c| c.name == name).expect("chart name")
    }

    /// Largest modulus over all samples.
    pub fn max_modulus(&self) -> f64 {
        self.charts.iter().flat_map(|c| c.values.iter()).map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Samples the principal symbol of `e` on all six charts.
pub fn sigma_symbol(e: &OpExpr, grid: &SigmaGrid) -> SigmaSymbol {
    let xs = grid.line_points();
    let thetas = grid.circle_points();
    let mut charts = Vec::with_capacity(6);
    for name in CHART_NAMES {
        let xi = if name.ends_with("plusXi") { XiEnd::Plus } else { XiEnd::Minus };
        let (params, values) = if name.starts_with("line") {
            let v = xs.iter().map(|&x| sigma_at(e, SigmaPoint::Line { x, xi })).collect();
            (xs.clone(), v)
        } else {
            let plus = name.starts_with("circpos");
            let v = thetas.iter().map(|&theta| sigma_at(e, SigmaPoint::Circle { plus, theta, xi })).collect();
            (thetas.clone(), v)
        };
        charts.push(Chart { name, params, values });
    }
    SigmaSymbol { grid: *grid, charts }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Invertible,
    NotInvertible,
    Inconclusive,
}

/// Sampled invertibility certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaVerdict {
    pub verdict: Verdict,
    pub min_modulus: f64,
    pub chart: &'static str,
    pub param: f64,
}

pub fn sigma_invertible(s: &SigmaSymbol, tol: f64) -> SigmaVerdict {
    let mut best = (f64::INFINITY, "", f64::NAN);
    for c in &s.charts {
        let (m, p) = c.min_modulus();
        if m < best.0 || m.is_nan() {
            best = (m, c.name, p);
        }
    }
    let verdict = if best.0.is_nan() {
        Verdict::Inconclusive
    } else if best.0 > tol {
        Verdict::Invertible
    } else {
        Verdict::NotInvertible
    };
    SigmaVerdict { verdict, min_modulus: best.0, chart: best.1, param: best.2 }
}

/// Winding number of a closed sampled curve; the last sample connects back
/// to the first.
pub fn winding_number(curve: &[C64], tol: f64) -> Result<i64, SymbolError> {
    winding_number_detailed(curve, tol).map(|(w, _)| w)
}

/// Winding number together with the unrounded value.
pub fn winding_number_detailed(curve: &[C64], tol: f64) -> Result<(i64, f64), SymbolError> {
    let min = curve.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if curve.is_empty() || min.is_nan() || min <= tol {
        return Err(SymbolError::CurveThroughZero { min_modulus: if min.is_finite() { min } else { 0.0 } });
    }
    let n = curve.len();
    let mut total = 0.0;
    for k in 0..n {
        let step = (curve[(k + 1) % n] / curve[k]).arg();
        if step.abs() >= PI / 2.0 {
            return Err(SymbolError::UndersampledCurve { step, at: k });
        }
        total += step;
    }
    let w = total / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() >= 1e-6 {
        return Err(SymbolError::WindingResidual { residual: (w - r).abs() });
    }
    Ok((r as i64, w))
}

/// Value of the commutative symbol `a(M) b(D) -> a(x) b(ξ)` at a point of the
/// compactified square.
pub fn mbar_at(e: &OpExpr, x: ExtReal, xi: ExtReal) -> Result<C64, SymbolError> {
    Ok(match e {
        OpExpr::Identity => C64::new(1.0, 0.0),
        OpExpr::Scalar(z, c) => z * mbar_at(c, x, xi)?,
        OpExpr::Mult(s) => {
            let mut v = C64::new(0.0, 0.0);
            for (a, p) in &s.terms {
                let k = p.constant_value().ok_or(SymbolError::NotInCommutativeAlgebra)?;
                v += a.eval_ext(x) * k;
            }
            v
        }
        OpExpr::FMult(b) => b.eval_ext(xi),
        OpExpr::Sum(cs) => {
            let mut v = C64::new(0.0, 0.0);
            for c in cs {
                v += mbar_at(c, x, xi)?;
            }
            v
        }
        OpExpr::Prod(cs) => {
            let mut v = C64::new(1.0, 0.0);
            for c in cs {
                v *= mbar_at(c, x, xi)?;
            }
            v
        }
        OpExpr::Adjoint(c) => mbar_at(c, x, xi)?.conj(),
    })
}

/// One edge of the square boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub name: &'static str,
    /// Compactified parameter in [0, 1] along the direction of traversal.
    pub params: Vec<f64>,
    #[serde(skip)]
    pub values: Vec<C64>,
}

/// The square-boundary symbol: four edges in counterclockwise order in the
/// (x, ξ) plane, starting at the corner (−∞, −∞).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MSymbol {
    pub edges: Vec<Edge>,
    pub counterclockwise: bool,
}

impl MSymbol {
    /// The closed curve with shared corners listed once.
    pub fn curve(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for e in &self.edges {
            out.extend_from_slice(&e.values[..e.values.len() - 1]);
        }
        out
    }

    /// Curve with a running parameter in [0, 4).
    pub fn to_csv(&self) -> String {
        let mut params = Vec::new();
        let mut values = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for (p, v) in e.params.iter().zip(&e.values).take(e.values.len() - 1) {
                params.push(i as f64 + p);
                values.push(*v);
            }
        }
        curve_csv(&params, &values)
    }
}

/// Samples per edge of the square boundary, endpoints included.
pub const MBAR_EDGE_SAMPLES: usize = 4097;

pub fn mbar_symbol(e: &OpExpr) -> Result<MSymbol, SymbolError> {
    mbar_symbol_with(e, MBAR_EDGE_SAMPLES)
}

pub fn mbar_symbol_with(e: &OpExpr, samples: usize) -> Result<MSymbol, SymbolError> {
    if !e.is_commutative_class() {
        return Err(SymbolError::NotInCommutativeAlgebra);
    }
    let n = samples.max(3);
    let us: Vec<f64> = (0..n).map(|j| j as f64 / (n - 1) as f64).collect();
    let forward = |u: f64| ExtReal::from_compact(2.0 * u - 1.0);
    let backward = |u: f64| ExtReal::from_compact(1.0 - 2.0 * u);
    type Param = Box<dyn Fn(f64) -> (ExtReal, ExtReal)>;
    let edges: [(&'static str, Param); 4] = [
        ("xi=-inf", Box::new(move |u| (forward(u), ExtReal::NegInf))),
        ("x=+inf", Box::new(move |u| (ExtReal::PosInf, forward(u)))),
        ("xi=+inf", Box::new(move |u| (backward(u), ExtReal::PosInf))),
        ("x=-inf", Box::new(move |u| (ExtReal::NegInf, backward(u)))),
    ];
    let mut out = Vec::with_capacity(4);
    for (name, param) in edges {
        let mut values = Vec::with_capacity(n);
        for &u in &us {
            let (x, xi) = param(u);
            values.push(mbar_at(e, x, xi)?);
        }
        out.push(Edge { name, params: us.clone(), values });
    }
    Ok(MSymbol { edges: out, counterclockwise: true })
}

/// Fredholm index of an element of the commutative subalgebra, read off as
/// the winding number of its square-boundary symbol.
pub fn index_commutative(e: &OpExpr) -> Result<i64, SymbolError> {
    let m = mbar_symbol(e)?;
    Ok(INDEX_SIGN * winding_number(&m.curve(), 1e-8)?)
}

/// Windings of σ on the four circle charts, ordered
/// (circle +∞, ξ=+∞), (circle −∞, ξ=+∞), (circle +∞, ξ=−∞), (circle −∞, ξ=−∞).
pub fn k1_ae_coordinates(s: &SigmaSymbol, tol: f64) -> Result<[i64; 4], SymbolError> {
    let v = sigma_invertible(s, tol);
    if v.verdict != Verdict::Invertible {
        return Err(SymbolError::HypothesisViolated(format!(
            "principal symbol not invertible (min modulus {:e} on {})",
            v.min_modulus, v.chart
        )));
    }
    let names = ["circpos_plusXi", "circneg_plusXi", "circpos_minusXi", "circneg_minusXi"];
    let mut out = [0; 4];
    for (slot, name) in out.iter_mut().zip(names) {
        *slot = winding_number(&s.chart(name).values, tol)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcat::{ExtendedFunction, PeriodicFunction};
    use crate::opalg::builtins::*;

    fn constant_on(s: &SigmaSymbol, name: &str, v: C64) -> bool {
        s.chart(name).values.iter().all(|z| (z - v).norm() < 1e-15)
    }

    #[test]
    fn fmult_b_symbol() {
        let s = sigma_symbol(&OpExpr::FMult(ExtendedFunction::b()), &SigmaGrid::default());
        for name in CHART_NAMES {
            let want = if name.ends_with("plusXi") { 1.0 } else { 0.0 };
            assert!(constant_on(&s, name, C64::new(want, 0.0)), "{name}");
        }
        assert_eq!(sigma_invertible(&s, 1e-8).verdict, Verdict::NotInvertible);
    }

    #[test]
    fn identity_symbol() {
        let s = sigma_symbol(&OpExpr::Identity, &SigmaGrid::default());
        assert!(CHART_NAMES.iter().all(|n| constant_on(&s, n, C64::new(1.0, 0.0))));
        let v = sigma_invertible(&s, 1e-6);
        assert_eq!(v.verdict, Verdict::Invertible);
        assert_eq!(v.min_modulus, 1.0);
    }

    #[test]
    fn a1_symbol_is_one_and_l() {
        let s = sigma_symbol(&a1(), &SigmaGrid::default());
        for name in ["line_minusXi", "circneg_minusXi", "circpos_minusXi", "circneg_plusXi"] {
            assert!(constant_on(&s, name, C64::new(1.0, 0.0)), "{name}");
        }
        let c = s.chart("circpos_plusXi");
        for (th, v) in c.params.iter().zip(&c.values) {
            assert!((v - C64::from_polar(1.0, *th)).norm() < 1e-15);
        }
        assert_eq!(sigma_invertible(&s, 1e-8).verdict, Verdict::Invertible);
    }

    #[test]
    fn a1_lower_bound_by_brute_force() {
        // |c(x) + b(x) e^{iθ}| on a fine (x, θ) grid.
        let (c, b) = (ExtendedFunction::c(), ExtendedFunction::b());
        let mut lo = f64::INFINITY;
        for i in 0..=400 {
            let x = -0.25 + 0.5 * i as f64 / 400.0;
            for j in 0..720 {
                let th = 2.0 * PI * j as f64 / 720.0;
                lo = lo.min((c.eval(x) + b.eval(x) * C64::from_polar(1.0, th)).norm());
            }
        }
        let s = sigma_symbol(&a1(), &SigmaGrid::default());
        let v = sigma_invertible(&s, 1e-8);
        assert!(lo > 0.0);
        assert!(v.min_modulus >= lo - 1e-3, "{} vs {lo}", v.min_modulus);
    }

    #[test]
    fn line_matches_circles_beyond_support() {
        let s = sigma_symbol(&a1(), &SigmaGrid::default());
        for (tag, xi) in [("minusXi", XiEnd::Minus), ("plusXi", XiEnd::Plus)] {
            let line = s.chart(&format!("line_{tag}"));
            for (x, v) in line.params.iter().zip(&line.values) {
                if x.abs() > 0.2 {
                    let w = sigma_at(&a1(), SigmaPoint::Circle { plus: *x > 0.0, theta: x.rem_euclid(2.0 * PI), xi });
                    assert!((v - w).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn windings() {
        let circle: Vec<C64> = (0..256).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / 256.0)).collect();
        assert_eq!(winding_number(&circle, 1e-8).unwrap(), 1);
        assert_eq!(winding_number(&vec![C64::new(1.0, 0.0); 10], 1e-8).unwrap(), 0);
        let t = ExtendedFunction::t();
        let g: Vec<C64> = (0..512).map(|k| t.eval(-(-0.5 + k as f64 / 512.0))).collect();
        assert_eq!(winding_number(&g, 1e-8).unwrap(), 1);
        let zero = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(winding_number(&zero, 1e-8), Err(SymbolError::CurveThroughZero { .. })));
        let coarse: Vec<C64> = (0..3).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0)).collect();
        assert!(matches!(winding_number(&coarse, 1e-8), Err(SymbolError::UndersampledCurve { .. })));
    }

    #[test]
    fn mbar_examples() {
        let m = mbar_symbol(&OpExpr::Identity).unwrap();
        assert!(m.curve().iter().all(|z| *z == C64::new(1.0, 0.0)));
        assert_eq!(
            mbar_symbol(&OpExpr::mult_periodic(PeriodicFunction::e(1))),
            Err(SymbolError::NotInCommutativeAlgebra)
        );
        for w in m.edges.windows(2) {
            assert_eq!(w[0].values.last(), w[1].values.first());
        }
    }

    #[test]
    fn index_examples() {
        assert_eq!(index_commutative(&b3()).unwrap(), -1);
        assert_eq!(index_commutative(&u_plus()).unwrap(), -1);
        assert_eq!(index_commutative(&u_minus()).unwrap(), -1);
        assert_eq!(index_commutative(&OpExpr::Identity).unwrap(), 0);
    }

    #[test]
    fn ae_coordinates() {
        let g = SigmaGrid::default();
        assert_eq!(k1_ae_coordinates(&sigma_symbol(&a1(), &g), 1e-8).unwrap(), [1, 0, 0, 0]);
        assert_eq!(k1_ae_coordinates(&sigma_symbol(&a2(), &g), 1e-8).unwrap(), [0, 1, 0, 0]);
        assert_eq!(k1_ae_coordinates(&sigma_symbol(&a3(), &g), 1e-8).unwrap(), [0, 0, 1, 0]);
        assert_eq!(k1_ae_coordinates(&sigma_symbol(&a4(), &g), 1e-8).unwrap(), [0, 0, 0, 1]);
        assert_eq!(k1_ae_coordinates(&sigma_symbol(&OpExpr::Identity, &g), 1e-8).unwrap(), [0; 4]);
        let b1 = OpExpr::Prod(vec![a1(), a3()]);
        assert_eq!(k1_ae_coordinates(&sigma_symbol(&b1, &g), 1e-8).unwrap(), [1, 0, 1, 0]);
    }
}
