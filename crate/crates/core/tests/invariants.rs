use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symbolkit::crossed::{alpha, circle_action, cp_mul, cp_star, CPElement};
use symbolkit::dsl::parse_expr;
use symbolkit::funcat::{ExtendedFunction, PeriodicFunction};
use symbolkit::kmap::delta1_with;
use symbolkit::opalg::{adjoint, builtins, normalize, psi, OpExpr};
use symbolkit::pools::{commutative_pool, generator_pool, random_cp_element};
use symbolkit::sigma::{index_commutative, sigma_at, SigmaPoint, XiEnd};

fn leaf() -> impl Strategy<Value = OpExpr> {
    let pool: Vec<OpExpr> = generator_pool().into_iter().map(|(_, e)| e).collect();
    proptest::sample::select(pool)
}

fn expr() -> impl Strategy<Value = OpExpr> {
    leaf().prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(OpExpr::Sum),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(OpExpr::Prod),
            (-3i32..=3, inner.clone()).prop_map(|(k, e)| OpExpr::scalar(C64::new(k as f64, 0.5), e)),
            inner.prop_map(|e| OpExpr::Adjoint(Box::new(e))),
        ]
    })
}

fn point() -> impl Strategy<Value = SigmaPoint> {
    let xi = prop_oneof![Just(XiEnd::Minus), Just(XiEnd::Plus)];
    prop_oneof![
        (-20.0f64..20.0, xi.clone()).prop_map(|(x, xi)| SigmaPoint::Line { x, xi }),
        (any::<bool>(), 0.0f64..std::f64::consts::TAU, xi).prop_map(|(plus, theta, xi)| SigmaPoint::Circle { plus, theta, xi }),
    ]
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalize_is_idempotent_and_symbol_preserving(e in expr(), p in point()) {
        let n = normalize(&e);
        prop_assert_eq!(normalize(&n), n.clone());
        prop_assert!(close(sigma_at(&n, p), sigma_at(&e, p)));
    }

    #[test]
    fn symbol_is_a_star_homomorphism(a in expr(), b in expr(), p in point()) {
        let (sa, sb) = (sigma_at(&a, p), sigma_at(&b, p));
        prop_assert!(close(sigma_at(&OpExpr::Prod(vec![a.clone(), b.clone()]), p), sa * sb));
        prop_assert!(close(sigma_at(&OpExpr::Sum(vec![a.clone(), b.clone()]), p), sa + sb));
        prop_assert!(close(sigma_at(&adjoint(&a), p), sa.conj()));
    }

    #[test]
    fn printed_expressions_parse_back(e in expr(), p in point()) {
        let back = parse_expr(&e.to_string()).unwrap();
        prop_assert!(close(sigma_at(&back, p), sigma_at(&e, p)));
    }

    #[test]
    fn restriction_to_infinity_is_multiplicative(a in expr(), b in expr(), theta in 0.0f64..6.28, plus in any::<bool>()) {
        let (pm, pp) = psi(&OpExpr::Prod(vec![a.clone(), b.clone()]));
        let side = if plus { pp } else { pm };
        for xi in [XiEnd::Minus, XiEnd::Plus] {
            let q = SigmaPoint::Circle { plus, theta, xi };
            prop_assert!(close(sigma_at(side.expr(), q), sigma_at(&a, q) * sigma_at(&b, q)));
        }
    }

    #[test]
    fn exponentials_multiply(k in -6i64..=6, m in -6i64..=6, x in -10.0f64..10.0) {
        let p = PeriodicFunction::e(k).mul(&PeriodicFunction::e(m));
        prop_assert!(close(p.eval(x), PeriodicFunction::e(k + m).eval(x)));
        prop_assert!((PeriodicFunction::e(k).eval(x).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn catalog_shapes(x in -30.0f64..30.0, h in 1e-3f64..2.0) {
        let c = ExtendedFunction::c();
        prop_assert!(c.eval(x + h).re <= c.eval(x).re + 1e-15);
        prop_assert!((ExtendedFunction::t().eval(x).norm() - 1.0).abs() < 1e-12);
        let b = ExtendedFunction::b().eval(x);
        prop_assert!(b.re >= -1e-15 && b.re <= 1.0 + 1e-15 && b.im == 0.0);
    }

    #[test]
    fn translation_action_composes(j in -4i64..=4, k in -4i64..=4, x in -8.0f64..8.0) {
        let g = ExtendedFunction::smoothstep(0.3, 0.8).mul(ExtendedFunction::t());
        prop_assert!(close(alpha(&alpha(&g, j), k).eval(x), alpha(&g, j + k).eval(x)));
        prop_assert!(close(alpha(&g, k).eval(x), g.eval(x + k as f64)));
    }
}

fn xs() -> Vec<f64> {
    (0..121).map(|k| -6.0 + 0.1 * k as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn crossed_star_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_cp_element(&mut rng, 2);
        let g = random_cp_element(&mut rng, 2);
        prop_assert!(cp_star(&cp_star(&f)).sampled_distance(&f, &xs()) < 1e-12);
        let lhs = cp_star(&cp_mul(&f, &g));
        let rhs = cp_mul(&cp_star(&g), &cp_star(&f));
        prop_assert!(lhs.sampled_distance(&rhs, &xs()) < 1e-11);
    }

    #[test]
    fn gauge_action_is_an_automorphism(seed in any::<u64>(), t in 0.0f64..6.28) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_cp_element(&mut rng, 2);
        let g = random_cp_element(&mut rng, 2);
        let z = C64::from_polar(1.0, t);
        let lhs = circle_action(z, &cp_mul(&f, &g)).unwrap();
        let rhs = cp_mul(&circle_action(z, &f).unwrap(), &circle_action(z, &g).unwrap());
        prop_assert!(lhs.sampled_distance(&rhs, &xs()) < 1e-11);
        let star = circle_action(z, &cp_star(&f)).unwrap();
        prop_assert!(star.sampled_distance(&cp_star(&circle_action(z, &f).unwrap()), &xs()) < 1e-11);
        prop_assert_eq!(cp_mul(&CPElement::d(1), &CPElement::d(-1)), CPElement::d(0));
    }
}

fn fredholm_commutative() -> Vec<OpExpr> {
    commutative_pool().into_iter().map(|(_, e)| e).filter(|e| index_commutative(e).is_ok()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn winding_index_is_additive(i in 0usize..64, j in 0usize..64) {
        let pool = fredholm_commutative();
        let (a, b) = (&pool[i % pool.len()], &pool[j % pool.len()]);
        let ab = OpExpr::Prod(vec![a.clone(), b.clone()]);
        prop_assert_eq!(index_commutative(&ab).unwrap(), index_commutative(a).unwrap() + index_commutative(b).unwrap());
        prop_assert_eq!(index_commutative(&adjoint(a)).unwrap(), -index_commutative(a).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn boundary_index_is_additive(i in 0usize..4, j in 0usize..4) {
        let gens = [builtins::a1(), builtins::a2(), builtins::a3(), builtins::a4()];
        let n = 48;
        let (a, b) = (&gens[i], &gens[j]);
        let ab = OpExpr::Prod(vec![a.clone(), b.clone()]);
        let lhs = delta1_with(&ab, n, 1e-6).unwrap();
        let rhs = delta1_with(a, n, 1e-6).unwrap() + delta1_with(b, n, 1e-6).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
