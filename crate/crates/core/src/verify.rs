//! Bundled verification suites, one per acceptance criterion.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::crossed::{alpha, circle_action, cond_expectation, cp_mul, cp_star, default_quadrature, phi_map, CPElement};
use crate::error::SymbolError;
use crate::funcat::ExtendedFunction;
use crate::gamma::{
    gamma_central_cols, gamma_central_rows, is_fredholm, y_entry, y_matrix, y_toeplitz_transposed, End,
    FredholmTols, FredholmVerdict,
};
use crate::kmap::{delta0_detailed, delta1_with, homotopy_delta0_check, HOMOTOPY_BLOCK};
use crate::linalg::operator_norm;
use crate::opalg::{builtins, OpExpr};
use crate::oracle::{
    discretize, null_report, numerical_index_detailed, w_gram, GridOperator, GridSpec, LinearOperator,
    INDEX_GRIDS, U_INDEX_GRIDS,
};
use crate::pools;
use crate::sigma::{index_commutative, sigma_symbol, SigmaGrid, Verdict};
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

fn check(label: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { label: label.into(), pass, detail: detail.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub suite: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

/// `(id, suite name, title)`.
pub const SUITES: [(usize, &str, &str); 10] = [
    (1, "b3-index", "index of B3 by winding and by the grid oracle"),
    (2, "u-index", "indices of U+ and U-"),
    (3, "delta1-table", "index pairs of A1..A4"),
    (4, "delta0", "exponential map on b(D) and c(D)"),
    (5, "homotopy", "unitary homotopy to I + (t(-phi) - 1)E"),
    (6, "homomorphism", "multiplicativity of both symbols"),
    (7, "y-family", "fractional shifts"),
    (8, "crossed", "crossed-product model"),
    (9, "w-transform", "Gram preservation of W"),
    (10, "fredholm-pool", "Fredholm verdicts against the oracle"),
];

/// Criterion ids selected by a suite name, a number, or `all`.
pub fn suite_ids(name: &str) -> Result<Vec<usize>, SymbolError> {
    if name == "all" {
        return Ok(SUITES.iter().map(|s| s.0).collect());
    }
    SUITES
        .iter()
        .find(|s| s.1 == name || s.0.to_string() == name)
        .map(|s| vec![s.0])
        .ok_or_else(|| SymbolError::UnknownCommand(format!("verify {name}")))
}

pub fn run_criterion(id: usize, seed: u64) -> CriterionReport {
    let (_, suite, title) = SUITES[id - 1];
    let start = Instant::now();
    let checks = match id {
        1 => b3_index(),
        2 => u_index(),
        3 => delta1_table(),
        4 => delta0_values(),
        5 => homotopy(),
        6 => homomorphism(seed),
        7 => y_family(),
        8 => crossed(seed),
        9 => w_transform(),
        10 => fredholm_pool(),
        _ => unreachable!("criterion ids are 1..=10"),
    };
    let seconds = start.elapsed().as_secs_f64();
    let pass = checks.iter().all(|c| c.pass);
    CriterionReport { id, suite, title, pass, seconds, checks }
}

fn index_checks(name: &str, e: &OpExpr, grids: [(f64, usize); 2], want: i64) -> (Vec<Check>, Option<(i64, i64)>) {
    let mut out = Vec::new();
    let w = index_commutative(e);
    out.push(check(format!("{name} winding index"), w == Ok(want), format!("{w:?}")));
    let specs = (GridSpec::new(grids[0].0, grids[0].1), GridSpec::new(grids[1].0, grids[1].1));
    let o = match specs {
        (Ok(a), Ok(b)) => numerical_index_detailed(&discretize(e, a), &discretize(e, b), 1e-6),
        (Err(e), _) | (_, Err(e)) => Err(e),
    };
    let detail = match &o {
        Ok((i, a, b)) => format!(
            "index {i}; (L={:.4}, n={}): ker {} coker {}; (L={:.4}, n={}): ker {} coker {}",
            grids[0].0, grids[0].1, a.kernel, a.cokernel, grids[1].0, grids[1].1, b.kernel, b.cokernel
        ),
        Err(e) => e.to_string(),
    };
    let oi = o.as_ref().ok().map(|r| r.0);
    out.push(check(format!("{name} oracle index at both grids"), oi == Some(want), detail));
    (out, w.ok().zip(oi))
}

fn b3_index() -> Vec<Check> {
    let start = Instant::now();
    let (mut out, _) = index_checks("B3", &builtins::b3(), INDEX_GRIDS, -1);
    let t = start.elapsed().as_secs_f64();
    out.push(check("runtime below 90 s", t < 90.0, format!("{t:.1} s")));
    out
}

fn u_index() -> Vec<Check> {
    let (mut out, a) = index_checks("U+", &builtins::u_plus(), U_INDEX_GRIDS, -1);
    let (more, b) = index_checks("U-", &builtins::u_minus(), U_INDEX_GRIDS, -1);
    out.extend(more);
    let equal = matches!((a, b), (Some(x), Some(y)) if x == y);
    out.push(check("ind U+ = ind U-", equal, format!("{a:?} vs {b:?}")));
    out
}

fn delta1_table() -> Vec<Check> {
    let start = Instant::now();
    let rows = [
        ("A1", builtins::a1(), (0, 1)),
        ("A2", builtins::a2(), (1, 0)),
        ("A3", builtins::a3(), (0, -1)),
        ("A4", builtins::a4(), (-1, 0)),
    ];
    let mut out: Vec<Check> = rows
        .into_iter()
        .map(|(name, e, want)| {
            let got = delta1_with(&e, 128, 1e-6).map(|p| (p.ind_minus, p.ind_plus));
            check(format!("delta1({name}) = {want:?}"), got == Ok(want), format!("{got:?}"))
        })
        .collect();
    let t = start.elapsed().as_secs_f64();
    out.push(check("runtime below 300 s", t < 300.0, format!("{t:.1} s")));
    out
}

fn delta0_values() -> Vec<Check> {
    let mut out = Vec::new();
    let mut sum = (0, 0);
    for (name, f, want) in [("b", ExtendedFunction::b(), 1), ("c", ExtendedFunction::c(), -1)] {
        match delta0_detailed(&OpExpr::FMult(f), 16, 256) {
            Ok(r) => {
                let res = (r.raw_windings.0 - r.raw_windings.0.round())
                    .abs()
                    .max((r.raw_windings.1 - r.raw_windings.1.round()).abs());
                out.push(check(
                    format!("delta0(fmult({name})) = ({want}, {want})"),
                    (r.class.u_coord, r.class.v_coord) == (want, want),
                    format!("({}, {})", r.class.u_coord, r.class.v_coord),
                ));
                out.push(check(format!("fmult({name}) winding residual below 1e-6"), res < 1e-6, format!("{res:.3e}")));
                sum.0 += r.class.u_coord;
                sum.1 += r.class.v_coord;
            }
            Err(e) => out.push(check(format!("delta0(fmult({name}))"), false, e.to_string())),
        }
    }
    out.push(check("sum is (0, 0)", sum == (0, 0), format!("{sum:?}")));
    out
}

fn homotopy() -> Vec<Check> {
    let a = homotopy_delta0_check(256, 9, 33);
    let b = homotopy_delta0_check(512, 9, 33);
    vec![
        check("winding of g is +1", a.g_winding == 1, format!("{}", a.g_winding)),
        check(
            "unitarity defect at N=256 below 5e-2",
            a.max_unitarity_defect < 5e-2,
            format!("{:.3e} on the {}-block", a.max_unitarity_defect, a.block),
        ),
        check(
            "unitarity defect decreases at N=512",
            b.max_unitarity_defect < a.max_unitarity_defect,
            format!("{:.3e}", b.max_unitarity_defect),
        ),
        check("U1 deviation below 5e-2", a.max_u1_deviation < 5e-2, format!("{:.3e}", a.max_u1_deviation)),
    ]
}

fn max_chart_distance(a: &crate::sigma::SigmaSymbol, b: &crate::sigma::SigmaSymbol, c: &crate::sigma::SigmaSymbol) -> f64 {
    let mut worst: f64 = 0.0;
    for ((ca, cb), cc) in a.charts.iter().zip(&b.charts).zip(&c.charts) {
        for ((x, y), z) in ca.values.iter().zip(&cb.values).zip(&cc.values) {
            worst = worst.max((x - y * z).norm());
        }
    }
    worst
}

/// Operator-norm error of `γ_{ef} ≈ γ_e γ_f` on the central block.
pub fn gamma_product_error(e: &OpExpr, f: &OpExpr, phi: f64, end: End, n: usize, r: usize) -> f64 {
    let ef = OpExpr::Prod(vec![e.clone(), f.clone()]);
    let rows = gamma_central_rows(e, phi, end, n, r);
    let cols = gamma_central_cols(f, phi, end, n, r);
    let whole = gamma_central_rows(&ef, phi, end, n, r).columns(n - r, 2 * r + 1).into_owned();
    operator_norm(&(rows * cols - whole))
}

pub const HOMOMORPHISM_PHIS: [f64; 4] = [0.0, 0.25, 0.5, 0.8];

fn homomorphism(seed: u64) -> Vec<Check> {
    let pairs = pools::generator_pairs(seed, 50);
    let grid = SigmaGrid::default();
    let r = HOMOTOPY_BLOCK;
    let mut sigma_worst: f64 = 0.0;
    let mut g256: f64 = 0.0;
    let mut g512: f64 = 0.0;
    let mut halving_failures = Vec::new();
    for (ne, e, nf, f) in &pairs {
        let prod = OpExpr::Prod(vec![e.clone(), f.clone()]);
        let d = max_chart_distance(&sigma_symbol(&prod, &grid), &sigma_symbol(e, &grid), &sigma_symbol(f, &grid));
        sigma_worst = sigma_worst.max(d);
        for phi in HOMOMORPHISM_PHIS {
            for end in End::BOTH {
                let a = gamma_product_error(e, f, phi, end, 256, r);
                let b = gamma_product_error(e, f, phi, end, 512, r);
                g256 = g256.max(a);
                g512 = g512.max(b);
                if a > 1e-12 && b > 0.5 * a {
                    halving_failures.push(format!("{ne}*{nf} phi={phi} end={}: {a:.2e} -> {b:.2e}", end.sign()));
                }
            }
        }
    }
    vec![
        check("sigma multiplicativity below 1e-12", sigma_worst < 1e-12, format!("{sigma_worst:.3e} over 50 pairs")),
        check("gamma product error at N=256 below 1e-2", g256 < 1e-2, format!("{g256:.3e}")),
        check(
            "gamma product error at least halves at N=512",
            halving_failures.is_empty(),
            if halving_failures.is_empty() {
                format!("max {g512:.3e}")
            } else {
                format!("{} samples do not halve, e.g. {}", halving_failures.len(), halving_failures[0])
            },
        ),
    ]
}

/// Central `(2r+1)`-block of `P Y_φ P Y_φ* P - I`.
pub fn y_unitarity_defect(phi: f64, n: usize, r: usize) -> f64 {
    let size = 2 * n + 1;
    let off = n - r;
    let rows = DMatrix::from_fn(2 * r + 1, size, |i, k| y_entry(phi, k as i64 - (i + off) as i64));
    let g = &rows * rows.adjoint() - DMatrix::identity(2 * r + 1, 2 * r + 1);
    operator_norm(&g)
}

/// Central block of `P Y_φ P M^b_φ P Y_{-φ} P`.
pub fn conjugated_multiplier(b: &ExtendedFunction, phi: f64, n: usize, r: usize) -> DMatrix<C64> {
    let size = 2 * n + 1;
    let off = n - r;
    let mut rows = DMatrix::from_fn(2 * r + 1, size, |i, k| y_entry(phi, k as i64 - (i + off) as i64));
    for k in 0..size {
        let d = b.eval(k as f64 - n as f64 - phi);
        for i in 0..2 * r + 1 {
            rows[(i, k)] *= d;
        }
    }
    let full = y_toeplitz_transposed(-phi, n).mul(&rows.transpose()).transpose();
    full.columns(off, 2 * r + 1).into_owned()
}

fn y_family() -> Vec<Check> {
    let r = HOMOTOPY_BLOCK;
    let phis: Vec<f64> = (0..16).map(|k| (k as f64 + 0.5) / 16.0).collect();
    let mut u = (0.0f64, 0.0f64);
    let mut p = (0.0f64, 0.0f64);
    let mut unit_halving = true;
    let mut per_halving = true;
    let b = ExtendedFunction::b();
    for &phi in &phis {
        let a = y_unitarity_defect(phi, 256, r);
        let c = y_unitarity_defect(phi, 512, r);
        unit_halving &= c <= 0.5 * a;
        u = (u.0.max(a), u.1.max(c));
        let pa = operator_norm(&(conjugated_multiplier(&b, phi, 256, r) - conjugated_multiplier(&b, phi + 1.0, 256, r)));
        let pc = operator_norm(&(conjugated_multiplier(&b, phi, 512, r) - conjugated_multiplier(&b, phi + 1.0, 512, r)));
        per_halving &= pc <= 0.5 * pa || pa < 1e-12;
        p = (p.0.max(pa), p.1.max(pc));
    }
    let mut shift_exact = true;
    for m in -3i64..=3 {
        let y = y_matrix(m as f64, 40);
        let s = DMatrix::from_fn(81, 81, |j, k| {
            if k as i64 == j as i64 + m {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        shift_exact &= y == s;
    }
    vec![
        check("Y unitarity defect at N=256 at most 1e-2", u.0 <= 1e-2, format!("{:.3e} on the {}-block", u.0, 2 * r + 1)),
        check("Y unitarity defect halves at N=512", unit_halving, format!("{:.3e}", u.1)),
        check("Y_m is the exact shift for m in -3..=3", shift_exact, ""),
        check("periodicity defect at N=256 at most 1e-2", p.0 <= 1e-2, format!("{:.3e}", p.0)),
        check("periodicity defect halves at N=512", per_halving, format!("{:.3e}", p.1)),
    ]
}

/// Grid used by the crossed-product comparisons: `L/π` is an integer so
/// `e^{ijx}` is exactly periodic on it.
pub const CROSSED_GRID: (f64, usize) = (16.0 * PI, 1024);

fn probes(op: &GridOperator) -> Vec<Vec<C64>> {
    [(0.0, 0.0), (1.5, 2.0), (-2.0, -3.0)]
        .iter()
        .map(|&(a, w)| op.sample(|x| C64::from_polar((-(x - a) * (x - a) / 2.0).exp(), w * x)))
        .collect()
}

/// `‖a - b‖ / ‖v‖`: a lower bound for the operator-norm residual.
fn probe_dist(a: &[C64], b: &[C64], v: &[C64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let n: f64 = v.iter().map(|y| y.norm_sqr()).sum();
    (d / n).sqrt()
}

fn crossed(seed: u64) -> Vec<Check> {
    let spec = GridSpec::new(CROSSED_GRID.0, CROSSED_GRID.1).expect("valid grid");
    let op = |f: &CPElement| discretize(phi_map(f).expr(), spec);
    let vs = probes(&op(&CPElement::d(0)));
    let pairs = pools::cp_pairs(seed, 25);
    let theta = 0.7;
    let z = C64::from_polar(1.0, theta);
    let xs: Vec<f64> = (0..401).map(|k| -10.0 + 0.05 * k as f64).collect();
    let (mut hom, mut star, mut gauge, mut quad, mut cov_alg, mut cov_grid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut support_ok = true;
    for (f, g) in &pairs {
        let (af, ag, afg) = (op(f), op(g), op(&cp_mul(f, g)));
        let fstar = op(&cp_star(f));
        let fz = op(&circle_action(z, f).expect("unimodular"));
        for v in &vs {
            hom = hom.max(probe_dist(&afg.apply(v), &af.apply(&ag.apply(v)), v));
            star = star.max(probe_dist(&fstar.apply(v), &af.apply_adjoint(v), v));
            let conj = af.translate(&af.apply(&af.translate(v, -theta)), theta);
            gauge = gauge.max(probe_dist(&fz.apply(v), &conj, v));
        }
        for h in [f, g] {
            match cond_expectation(h, default_quadrature(h)) {
                Ok(e) => {
                    quad = quad.max(e.quadrature_residual);
                    support_ok &= CPElement::embed(e.value).support_radius().unwrap_or(0) == 0;
                }
                Err(_) => quad = f64::INFINITY,
            }
        }
        for a in f.coeffs().values().chain(g.coeffs().values()) {
            let d1 = CPElement::d(1);
            let lhs = cp_mul(&cp_mul(&d1, &CPElement::embed(a.clone())), &cp_star(&d1));
            let rhs = CPElement::embed(alpha(a, 1));
            cov_alg = cov_alg.max(lhs.sampled_distance(&rhs, &xs));
            let (ol, or) = (op(&lhs), op(&rhs));
            for v in &vs {
                cov_grid = cov_grid.max(probe_dist(&ol.apply(v), &or.apply(v), v));
            }
        }
    }
    vec![
        check("phi-map homomorphism residual below 1e-8", hom < 1e-8, format!("{hom:.3e} over 25 pairs")),
        check("phi-map star residual below 1e-8", star < 1e-8, format!("{star:.3e}")),
        check("covariance residual below 1e-10", cov_alg < 1e-10 && cov_grid < 1e-10, format!("{cov_alg:.3e} in the algebra, {cov_grid:.3e} on the grid")),
        check("expectation quadrature below 1e-10", quad < 1e-10, format!("{quad:.3e}")),
        check("expectation lands in the fixed-point algebra", support_ok, ""),
        check("gauge equivariance residual below 1e-6", gauge < 1e-6, format!("{gauge:.3e}")),
    ]
}

/// `(center, width, frequency)` of the Gaussian test functions.
pub const W_GAUSSIANS: [(f64, f64, f64); 5] =
    [(0.0, 0.5, 0.0), (0.3, 0.4, 1.0), (-0.6, 0.7, 0.0), (1.2, 0.5, -2.0), (0.5, 1.0, 0.5)];

fn gaussian(g: (f64, f64, f64)) -> impl Fn(f64) -> C64 {
    move |x| C64::from_polar((-(x - g.0) * (x - g.0) / (2.0 * g.1 * g.1)).exp(), g.2 * x)
}

/// `∫ u v̄` in closed form.
pub fn gaussian_inner(u: (f64, f64, f64), v: (f64, f64, f64)) -> C64 {
    let a = 1.0 / (2.0 * u.1 * u.1) + 1.0 / (2.0 * v.1 * v.1);
    let b = C64::new(u.0 / (u.1 * u.1) + v.0 / (v.1 * v.1), u.2 - v.2);
    let c = u.0 * u.0 / (2.0 * u.1 * u.1) + v.0 * v.0 / (2.0 * v.1 * v.1);
    (PI / a).sqrt() * (b * b / (4.0 * a) - c).exp()
}

fn w_transform() -> Vec<Check> {
    let mut worst: f64 = 0.0;
    for (i, &p) in W_GAUSSIANS.iter().enumerate() {
        for &q in &W_GAUSSIANS[i..] {
            let got = w_gram(&gaussian(p), &gaussian(q), 128, 12);
            worst = worst.max((got - gaussian_inner(p, q)).norm());
        }
    }
    vec![check("Gram matrix of 5 Gaussians preserved to 1e-6", worst < 1e-6, format!("{worst:.3e}"))]
}

fn fredholm_pool() -> Vec<Check> {
    let tols = FredholmTols::default();
    let mut out = Vec::new();
    for (name, e) in pools::fredholm_pool() {
        let rep = is_fredholm(&e, &tols);
        match rep.verdict {
            FredholmVerdict::Fredholm => {
                let reports: Result<Vec<_>, _> = INDEX_GRIDS
                    .iter()
                    .map(|&(l, n)| GridSpec::new(l, n).and_then(|s| null_report(&discretize(&e, s), 1e-6)))
                    .collect();
                let (pass, detail) = match reports {
                    Ok(r) => (
                        r[1].kernel <= r[0].kernel,
                        format!("ker/coker {}/{} then {}/{}", r[0].kernel, r[0].cokernel, r[1].kernel, r[1].cokernel),
                    ),
                    Err(err) => (false, err.to_string()),
                };
                out.push(check(format!("{name}: fredholm, no kernel growth"), pass, detail));
            }
            FredholmVerdict::NotFredholm => {
                let by_sigma = rep.sigma.verdict == Verdict::NotInvertible && rep.sigma.min_modulus <= tols.sigma_tol;
                let by_gamma = rep.gamma.as_ref().is_some_and(|g| {
                    g.verdict == Verdict::NotInvertible && g.worst.as_ref().is_some_and(|w| w.min_singular_value <= tols.gamma_tol)
                });
                let detail = if by_sigma {
                    format!("sigma vanishes: {:.2e} on {}", rep.sigma.min_modulus, rep.sigma.chart)
                } else {
                    format!("gamma collapses: {:?}", rep.gamma.as_ref().and_then(|g| g.worst.as_ref()).map(|w| w.min_singular_value))
                };
                out.push(check(format!("{name}: not fredholm, certified"), by_sigma || by_gamma, detail));
            }
            FredholmVerdict::Inconclusive => {
                out.push(check(format!("{name}: inconclusive"), true, "no claim to check"));
            }
        }
    }
    out
}
