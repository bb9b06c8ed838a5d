//! Expression trees over the generators of the operator algebra.

use num_complex::Complex64 as C64;

use crate::funcat::{ExtendedFunction, PeriodicFunction, SharpElement};

/// An element of the algebra modulo compact operators, as a finite tree.
#[derive(Clone, Debug, PartialEq)]
pub enum OpExpr {
    Identity,
    Scalar(C64, Box<OpExpr>),
    /// Multiplication by a sharp element `sum a_i(x) p_i(x)`.
    Mult(SharpElement),
    /// Fourier multiplier `b(D)`.
    FMult(ExtendedFunction),
    Sum(Vec<OpExpr>),
    /// Ordered product; the first factor is applied last.
    Prod(Vec<OpExpr>),
    Adjoint(Box<OpExpr>),
}

use OpExpr as E;

impl OpExpr {
    pub fn zero() -> Self {
        E::Scalar(C64::new(0.0, 0.0), Box::new(E::Identity))
    }

    pub fn scalar(z: C64, e: OpExpr) -> Self {
        E::Scalar(z, Box::new(e))
    }

    pub fn mult_ext(a: ExtendedFunction) -> Self {
        E::Mult(SharpElement::from_extended(a))
    }

    pub fn mult_periodic(p: PeriodicFunction) -> Self {
        E::Mult(SharpElement::from_periodic(p))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, E::Scalar(z, inner) if *z == C64::new(0.0, 0.0) && **inner == E::Identity)
    }

    /// Visits every leaf `Mult` sharp element.
    pub fn sharp_leaves(&self) -> Vec<&SharpElement> {
        let mut out = Vec::new();
        self.collect_sharp(&mut out);
        out
    }

    fn collect_sharp<'a>(&'a self, out: &mut Vec<&'a SharpElement>) {
        match self {
            E::Mult(s) => out.push(s),
            E::Scalar(_, c) | E::Adjoint(c) => c.collect_sharp(out),
            E::Sum(cs) | E::Prod(cs) => cs.iter().for_each(|c| c.collect_sharp(out)),
            E::Identity | E::FMult(_) => {}
        }
    }

    /// True if no multiplication carries a nonconstant periodic part.
    pub fn is_commutative_class(&self) -> bool {
        self.sharp_leaves().iter().all(|s| s.has_constant_periodic_parts())
    }

    /// Sum of the periodic degrees along the deepest product chain: an upper
    /// bound on the band width of the boundary symbol in the conjugated frame.
    pub fn band_width(&self) -> usize {
        match self {
            E::Identity | E::FMult(_) => 0,
            E::Mult(s) => s.degree() as usize,
            E::Scalar(_, c) | E::Adjoint(c) => c.band_width(),
            E::Sum(cs) => cs.iter().map(|c| c.band_width()).max().unwrap_or(0),
            E::Prod(cs) => cs.iter().map(|c| c.band_width()).sum(),
        }
    }
}

/// Pushes adjoints to the leaves.
pub fn adjoint(e: &OpExpr) -> OpExpr {
    match e {
        E::Identity => E::Identity,
        E::Scalar(z, c) => E::Scalar(z.conj(), Box::new(adjoint(c))),
        E::Mult(s) => E::Mult(s.conj()),
        E::FMult(b) => E::FMult(b.conj()),
        E::Sum(cs) => E::Sum(cs.iter().map(adjoint).collect()),
        E::Prod(cs) => E::Prod(cs.iter().rev().map(adjoint).collect()),
        E::Adjoint(c) => remove_adjoints(c),
    }
}

fn remove_adjoints(e: &OpExpr) -> OpExpr {
    match e {
        E::Adjoint(c) => adjoint(c),
        E::Scalar(z, c) => E::Scalar(*z, Box::new(remove_adjoints(c))),
        E::Sum(cs) => E::Sum(cs.iter().map(remove_adjoints).collect()),
        E::Prod(cs) => E::Prod(cs.iter().map(remove_adjoints).collect()),
        other => other.clone(),
    }
}

/// Canonical form: adjoints at leaves, flattened sums and products, scalars
/// folded to the front of products, constant leaves turned into scalars, sum
/// children sorted by their printed form.
pub fn normalize(e: &OpExpr) -> OpExpr {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match e {
        E::Identity => E::Identity,
        E::Adjoint(c) => normalize(&adjoint(c)),
        E::Scalar(z, c) => {
            let inner = normalize(c);
            let (w, core) = split_scalar(inner);
            wrap_scalar(z * w, core)
        }
        E::Mult(s) => match s.constant_value() {
            Some(k) => wrap_scalar(k, E::Identity),
            None => E::Mult(s.clone()),
        },
        E::FMult(b) => match b.as_const() {
            Some(k) => wrap_scalar(k, E::Identity),
            None => E::FMult(b.clone()),
        },
        E::Prod(cs) => {
            let mut coef = one;
            let mut factors = Vec::new();
            for c in cs {
                let (w, core) = split_scalar(normalize(c));
                coef *= w;
                match core {
                    E::Identity => {}
                    E::Prod(inner) => factors.extend(inner),
                    other => factors.push(other),
                }
            }
            if coef == zero {
                return E::zero();
            }
            let core = match factors.len() {
                0 => E::Identity,
                1 => factors.pop().unwrap(),
                _ => E::Prod(factors),
            };
            wrap_scalar(coef, core)
        }
        E::Sum(cs) => {
            let mut terms = Vec::new();
            for c in cs {
                match normalize(c) {
                    E::Sum(inner) => terms.extend(inner),
                    t if t.is_zero() => {}
                    t => terms.push(t),
                }
            }
            terms.sort_by_cached_key(|t| t.to_string());
            match terms.len() {
                0 => E::zero(),
                1 => terms.pop().unwrap(),
                _ => E::Sum(terms),
            }
        }
    }
}

fn split_scalar(e: OpExpr) -> (C64, OpExpr) {
    match e {
        E::Scalar(z, c) => (z, *c),
        other => (C64::new(1.0, 0.0), other),
    }
}

fn wrap_scalar(z: C64, core: OpExpr) -> OpExpr {
    if z == C64::new(0.0, 0.0) {
        E::zero()
    } else if z == C64::new(1.0, 0.0) {
        core
    } else {
        E::Scalar(z, Box::new(core))
    }
}

/// An expression in the subalgebra generated by periodic multiplications and
/// Fourier multipliers.
#[derive(Clone, Debug, PartialEq)]
pub struct DiamondExpr(OpExpr);

impl DiamondExpr {
    /// Wraps an expression after checking that every multiplication has
    /// constant extended parts.
    pub fn new(e: OpExpr) -> Option<Self> {
        if e.sharp_leaves().iter().all(|s| s.has_constant_extended_parts()) {
            Some(DiamondExpr(e))
        } else {
            None
        }
    }

    pub fn expr(&self) -> &OpExpr {
        &self.0
    }

    pub fn into_expr(self) -> OpExpr {
        self.0
    }
}

/// The pair of restrictions to the two infinities: each multiplication
/// `sum a_i p_i` is replaced by `sum a_i(-inf) p_i` and `sum a_i(+inf) p_i`.
pub fn psi(e: &OpExpr) -> (DiamondExpr, DiamondExpr) {
    let e = normalize(e);
    let minus = normalize(&psi_side(&e, false));
    let plus = normalize(&psi_side(&e, true));
    (DiamondExpr(minus), DiamondExpr(plus))
}

fn psi_side(e: &OpExpr, plus: bool) -> OpExpr {
    match e {
        E::Mult(s) => E::Mult(s.at_infinity(plus)),
        E::Scalar(z, c) => E::Scalar(*z, Box::new(psi_side(c, plus))),
        E::Adjoint(c) => E::Adjoint(Box::new(psi_side(c, plus))),
        E::Sum(cs) => E::Sum(cs.iter().map(|c| psi_side(c, plus)).collect()),
        E::Prod(cs) => E::Prod(cs.iter().map(|c| psi_side(c, plus)).collect()),
        other => other.clone(),
    }
}

/// Named generators.
pub mod builtins {
    use super::*;
    use std::f64::consts::PI;

    fn b() -> OpExpr {
        E::FMult(ExtendedFunction::b())
    }
    fn c() -> OpExpr {
        E::FMult(ExtendedFunction::c())
    }
    fn l() -> OpExpr {
        E::Mult(SharpElement::l())
    }
    fn lt() -> OpExpr {
        E::Mult(SharpElement::ltilde())
    }

    /// `l(M) b(D) + c(D)`
    pub fn a1() -> OpExpr {
        E::Sum(vec![E::Prod(vec![l(), b()]), c()])
    }
    /// `l~(M) b(D) + c(D)`
    pub fn a2() -> OpExpr {
        E::Sum(vec![E::Prod(vec![lt(), b()]), c()])
    }
    /// `b(D) + l(M) c(D)`
    pub fn a3() -> OpExpr {
        E::Sum(vec![b(), E::Prod(vec![l(), c()])])
    }
    /// `b(D) + l~(M) c(D)`
    pub fn a4() -> OpExpr {
        E::Sum(vec![b(), E::Prod(vec![lt(), c()])])
    }
    pub fn b1() -> OpExpr {
        l()
    }
    pub fn b2() -> OpExpr {
        lt()
    }
    /// `b(M) t(D) + c(M)`
    pub fn b3() -> OpExpr {
        E::Sum(vec![
            E::Prod(vec![OpExpr::mult_ext(ExtendedFunction::b()), E::FMult(ExtendedFunction::t())]),
            OpExpr::mult_ext(ExtendedFunction::c()),
        ])
    }
    /// `e^{2 pi i b(M)} b(D) + c(D)`
    pub fn u_plus() -> OpExpr {
        let e = ExtendedFunction::Exp { coef: C64::new(0.0, 2.0 * PI), arg: Box::new(ExtendedFunction::b()) };
        E::Sum(vec![E::Prod(vec![OpExpr::mult_ext(e), b()]), c()])
    }
    /// `e^{2 pi i c(M)} c(D) + b(D)`
    pub fn u_minus() -> OpExpr {
        E::Sum(vec![E::Prod(vec![OpExpr::mult_ext(ExtendedFunction::t()), c()]), b()])
    }

    /// Looks up a built-in name.
    pub fn lookup(name: &str) -> Option<OpExpr> {
        Some(match name {
            "A1" => a1(),
            "A2" => a2(),
            "A3" => a3(),
            "A4" => a4(),
            "B1" => b1(),
            "B2" => b2(),
            "B3" => b3(),
            "Uplus" => u_plus(),
            "Uminus" => u_minus(),
            _ => return None,
        })
    }

    pub const NAMES: [&str; 9] = ["A1", "A2", "A3", "A4", "B1", "B2", "B3", "Uplus", "Uminus"];
}

#[cfg(test)]
mod tests {
    use super::builtins::*;
    use super::*;

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint(&E::Identity), E::Identity);
        assert_eq!(adjoint(&E::FMult(ExtendedFunction::c())), E::FMult(ExtendedFunction::c()));
        let e = E::Prod(vec![E::Mult(SharpElement::l()), E::FMult(ExtendedFunction::b())]);
        assert_eq!(adjoint(&e), E::Prod(vec![E::FMult(ExtendedFunction::b()), E::Mult(SharpElement::l().conj())]));
    }

    #[test]
    fn normalize_examples() {
        let e = a1();
        let ne = normalize(&e);
        assert_eq!(normalize(&E::Sum(vec![e.clone(), E::zero()])), ne);
        assert_eq!(normalize(&E::Prod(vec![E::Identity, e.clone()])), ne);
        assert_eq!(normalize(&E::Adjoint(Box::new(E::Adjoint(Box::new(e.clone()))))), ne);
        assert_eq!(normalize(&ne), ne);
    }

    #[test]
    fn normalize_folds_scalars() {
        let two = C64::new(2.0, 0.0);
        let e = E::Prod(vec![E::scalar(two, b3()), E::scalar(two, E::Identity)]);
        match normalize(&e) {
            E::Scalar(z, _) => assert_eq!(z, C64::new(4.0, 0.0)),
            other => panic!("expected scalar, got {other:?}"),
        }
    }

    #[test]
    fn psi_examples() {
        let (m, p) = psi(&OpExpr::mult_ext(ExtendedFunction::c()));
        assert_eq!(m.expr(), &E::Identity);
        assert_eq!(p.expr(), &E::zero());
        let e1 = OpExpr::mult_periodic(PeriodicFunction::e(1));
        let (m, p) = psi(&e1);
        assert_eq!(m.expr(), &e1);
        assert_eq!(p.expr(), &e1);
        let fb = E::FMult(ExtendedFunction::b());
        let (m, p) = psi(&fb);
        assert_eq!((m.expr(), p.expr()), (&fb, &fb));
    }

    #[test]
    fn psi_lands_in_diamond() {
        for name in builtins::NAMES {
            let (m, p) = psi(&lookup(name).unwrap());
            assert!(DiamondExpr::new(m.into_expr()).is_some());
            assert!(DiamondExpr::new(p.into_expr()).is_some());
        }
    }

    #[test]
    fn band_width_counts_products() {
        assert_eq!(a1().band_width(), 1);
        assert_eq!(E::Prod(vec![a1(), a3()]).band_width(), 2);
        assert_eq!(b3().band_width(), 0);
    }
}
