//! Seeded test pools used by the verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::crossed::CPElement;
use crate::funcat::{ExtendedFunction, PeriodicFunction, SharpElement};
use crate::opalg::{builtins, OpExpr};
use crate::C64;

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Generators of the algebra, by name.
pub fn generator_pool() -> Vec<(&'static str, OpExpr)> {
    let m = OpExpr::mult_ext;
    vec![
        ("I", OpExpr::Identity),
        ("mult(c)", m(ExtendedFunction::c())),
        ("mult(b)", m(ExtendedFunction::b())),
        ("mult(t)", m(ExtendedFunction::t())),
        ("mult(l)", OpExpr::Mult(SharpElement::l())),
        ("mult(ltilde)", OpExpr::Mult(SharpElement::ltilde())),
        ("mult(e1)", OpExpr::mult_periodic(PeriodicFunction::e(1))),
        ("mult(e-1)", OpExpr::mult_periodic(PeriodicFunction::e(-1))),
        ("fmult(b)", OpExpr::FMult(ExtendedFunction::b())),
        ("fmult(c)", OpExpr::FMult(ExtendedFunction::c())),
        ("fmult(t)", OpExpr::FMult(ExtendedFunction::t())),
        ("A1", builtins::a1()),
        ("A2", builtins::a2()),
        ("A3", builtins::a3()),
        ("A4", builtins::a4()),
        ("B3", builtins::b3()),
        ("Uplus", builtins::u_plus()),
        ("Uminus", builtins::u_minus()),
    ]
}

/// `count` ordered pairs drawn uniformly from [`generator_pool`].
pub fn generator_pairs(seed: u64, count: usize) -> Vec<(String, OpExpr, String, OpExpr)> {
    let pool = generator_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (a, e) = &pool[rng.gen_range(0..pool.len())];
            let (b, f) = &pool[rng.gen_range(0..pool.len())];
            (a.to_string(), e.clone(), b.to_string(), f.clone())
        })
        .collect()
}

fn random_coefficient(rng: &mut ChaCha8Rng) -> ExtendedFunction {
    let base = match rng.gen_range(0..5) {
        0 => ExtendedFunction::c(),
        1 => ExtendedFunction::b(),
        2 => ExtendedFunction::t(),
        3 => ExtendedFunction::smoothstep(rng.gen_range(-1.0..1.0), rng.gen_range(0.2..1.0)),
        _ => ExtendedFunction::constant(C64::new(1.0, 0.0)),
    };
    let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    base.scale(z)
}

/// A random crossed-product element with support in `[-radius, radius]`.
pub fn random_cp_element(rng: &mut ChaCha8Rng, radius: i64) -> CPElement {
    let terms = rng.gen_range(1..=3);
    CPElement::from_coeffs((0..terms).map(|_| (rng.gen_range(-radius..=radius), random_coefficient(rng))))
}

pub fn cp_pairs(seed: u64, count: usize) -> Vec<(CPElement, CPElement)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ffee);
    (0..count).map(|_| (random_cp_element(&mut rng, 2), random_cp_element(&mut rng, 2))).collect()
}

/// Expressions of the commutative subalgebra with a nonvanishing boundary curve.
pub fn commutative_pool() -> Vec<(&'static str, OpExpr)> {
    let m = OpExpr::mult_ext;
    let f = OpExpr::FMult;
    vec![
        ("I", OpExpr::Identity),
        ("B3", builtins::b3()),
        ("Uplus", builtins::u_plus()),
        ("Uminus", builtins::u_minus()),
        ("B3*B3", OpExpr::Prod(vec![builtins::b3(), builtins::b3()])),
        ("adj(B3)", OpExpr::Adjoint(Box::new(builtins::b3()))),
        ("mult(t)", m(ExtendedFunction::t())),
        ("fmult(t)", f(ExtendedFunction::t())),
        ("B3*Uplus", OpExpr::Prod(vec![builtins::b3(), builtins::u_plus()])),
    ]
}

/// The bundled 20-expression pool of the Fredholm consistency check.
pub fn fredholm_pool() -> Vec<(&'static str, OpExpr)> {
    let m = OpExpr::mult_ext;
    let f = OpExpr::FMult;
    let two = C64::new(2.0, 0.0);
    vec![
        ("I", OpExpr::Identity),
        ("B1", builtins::b1()),
        ("B2", builtins::b2()),
        ("B3", builtins::b3()),
        ("Uplus", builtins::u_plus()),
        ("Uminus", builtins::u_minus()),
        ("A1", builtins::a1()),
        ("A2", builtins::a2()),
        ("A3", builtins::a3()),
        ("A4", builtins::a4()),
        ("fmult(t)", f(ExtendedFunction::t())),
        ("mult(t)", m(ExtendedFunction::t())),
        ("mult(e1)", OpExpr::mult_periodic(PeriodicFunction::e(1))),
        ("B3*B3", OpExpr::Prod(vec![builtins::b3(), builtins::b3()])),
        ("2*I + fmult(b)", OpExpr::Sum(vec![OpExpr::scalar(two, OpExpr::Identity), f(ExtendedFunction::b())])),
        ("fmult(b)", f(ExtendedFunction::b())),
        ("fmult(c)", f(ExtendedFunction::c())),
        ("mult(c)", m(ExtendedFunction::c())),
        ("mult(c) * fmult(b)", OpExpr::Prod(vec![m(ExtendedFunction::c()), f(ExtendedFunction::b())])),
        ("mult(b) + fmult(c)", OpExpr::Sum(vec![m(ExtendedFunction::b()), f(ExtendedFunction::c())])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pools_are_deterministic() {
        let a = generator_pairs(7, 10);
        let b = generator_pairs(7, 10);
        assert!(a.iter().zip(&b).all(|(x, y)| x.0 == y.0 && x.2 == y.2));
        let xs: Vec<f64> = (0..21).map(|k| -1.0 + 0.1 * k as f64).collect();
        let p = cp_pairs(3, 4);
        let q = cp_pairs(3, 4);
        assert!(p.iter().zip(&q).all(|(x, y)| x.0.sampled_distance(&y.0, &xs) == 0.0));
        assert_eq!(fredholm_pool().len(), 20);
    }
}
