//! Connecting maps of the six-term sequence made computable: δ₀ through
//! determinant windings of exponentiated boundary symbols, δ₁ through index
//! pairs, the index idempotent, the explicit homotopy behind δ₀,
//! and the three K₁ coordinates of an invertible class modulo compacts.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::SymbolError;
use crate::funcat::{transition, ExtendedFunction};
use crate::gamma::{band_frame, gamma_frame, gamma_index, is_fredholm, y_entry, y_toeplitz_transposed, End, FredholmTols, FredholmVerdict};
use crate::linalg::{central_weight, operator_norm};
use crate::opalg::{adjoint, normalize, OpExpr};
use crate::sigma::{sigma_at, sigma_symbol, winding_number, SigmaGrid, SigmaPoint, XiEnd, CHART_NAMES};

/// The γ end read by the `u` coordinate. The other coordinate reads the
/// opposite end.
pub const U_END: End = End::Plus;

/// Coordinates in ℤ[u] ⊕ ℤ[v].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KClassE {
    pub u_coord: i64,
    pub v_coord: i64,
}

impl std::ops::Add for KClassE {
    type Output = KClassE;
    fn add(self, o: KClassE) -> KClassE {
        KClassE { u_coord: self.u_coord + o.u_coord, v_coord: self.v_coord + o.v_coord }
    }
}

/// Indices of `γ(1, -1)` and `γ(1, +1)`, in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndexPair {
    pub ind_minus: i64,
    pub ind_plus: i64,
}

impl std::ops::Add for IndexPair {
    type Output = IndexPair;
    fn add(self, o: IndexPair) -> IndexPair {
        IndexPair { ind_minus: self.ind_minus + o.ind_minus, ind_plus: self.ind_plus + o.ind_plus }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Delta0Report {
    pub class: KClassE,
    /// Unrounded windings, `(end -1, end +1)`.
    pub raw_windings: (f64, f64),
    pub min_det_modulus: f64,
    pub off_central_mass: f64,
}

pub fn delta0(e: &OpExpr, n: usize, phis: usize) -> Result<KClassE, SymbolError> {
    delta0_detailed(e, n, phis).map(|r| r.class)
}

/// `-[exp(2πi γ_e)]₁` for a self-adjoint lift `e` of a projection.
pub fn delta0_detailed(e: &OpExpr, n: usize, phis: usize) -> Result<Delta0Report, SymbolError> {
    let ne = normalize(e);
    if normalize(&adjoint(&ne)) != ne {
        return Err(SymbolError::NotSelfAdjoint);
    }
    let s = sigma_symbol(e, &SigmaGrid::default());
    let defect = s.charts.iter().flat_map(|c| c.values.iter()).map(|v| (v * v - v).norm()).fold(0.0, f64::max);
    if defect > 1e-10 {
        return Err(SymbolError::NotProjectionSymbol { defect });
    }
    let size = 2 * n + 1;
    let inner = central_weight(n, n / 2);
    let mut off_mass: f64 = 0.0;
    let mut min_mod = f64::INFINITY;
    let mut raw = [0.0; 2];
    let mut wind = [0i64; 2];
    for (slot, end) in End::BOTH.into_iter().enumerate() {
        let mut dets = Vec::with_capacity(phis);
        for q in 0..phis {
            let phi = q as f64 / phis as f64;
            let g = gamma_frame(e, phi, end, n);
            let w = (g * C64::new(0.0, 2.0 * PI)).exp();
            for j in 0..size {
                for k in 0..size {
                    if inner[j] == 0.0 || inner[k] == 0.0 {
                        let id = if j == k { 1.0 } else { 0.0 };
                        off_mass = off_mass.max((w[(j, k)] - id).norm());
                    }
                }
            }
            dets.push(w.determinant());
        }
        let m = dets.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
        min_mod = min_mod.min(m);
        if m <= 1e-8 {
            return Err(SymbolError::DeterminantThroughZero { min_modulus: m });
        }
        let (w, r) = crate::sigma::winding_number_detailed(&dets, 1e-8)?;
        wind[slot] = -w;
        raw[slot] = -r;
    }
    if off_mass > 1e-8 {
        return Err(SymbolError::NotTraceClassOnWindow { mass: off_mass });
    }
    let (v, u) = (wind[0], wind[1]);
    Ok(Delta0Report {
        class: KClassE { u_coord: u, v_coord: v },
        raw_windings: (raw[0], raw[1]),
        min_det_modulus: min_mod,
        off_central_mass: off_mass,
    })
}

/// Default truncation radius and rank tolerance of [`delta1`].
pub const DELTA1_N: usize = 128;
pub const DELTA1_TAU: f64 = 1e-6;

pub fn delta1(e: &OpExpr) -> Result<IndexPair, SymbolError> {
    delta1_with(e, DELTA1_N, DELTA1_TAU)
}

pub fn delta1_with(e: &OpExpr, n: usize, tau: f64) -> Result<IndexPair, SymbolError> {
    Ok(IndexPair { ind_minus: gamma_index(e, End::Minus, n, tau)?, ind_plus: gamma_index(e, End::Plus, n, tau)? })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexIdempotent {
    pub p: DMatrix<C64>,
    /// `‖P² - P‖` in operator norm.
    pub idempotency_residual: f64,
    /// `tr P - n`.
    pub trace_defect: C64,
}

impl IndexIdempotent {
    /// `tr(W P) - tr(W diag(I, 0))` with `W = diag(w, w)`: the trace defect
    /// seen through a window.
    pub fn localized_trace_defect(&self, weight: &[f64]) -> C64 {
        let n = weight.len();
        let mut s = C64::new(0.0, 0.0);
        for (i, w) in weight.iter().enumerate() {
            s += (self.p[(i, i)] - 1.0 + self.p[(n + i, n + i)]) * *w;
        }
        s
    }
}

/// The idempotent `[[2ab - (ab)², a(2 - ba)(1 - ba)], [(1 - ba)b, (1 - ba)²]]`.
pub fn index_idempotent(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<IndexIdempotent, SymbolError> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(SymbolError::DimensionMismatch(format!(
            "a is {}x{}, b is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let id = DMatrix::<C64>::identity(n, n);
    let ab = a * b;
    let ba = b * a;
    let one_ba = &id - &ba;
    let tl = &ab * C64::new(2.0, 0.0) - &ab * &ab;
    let tr = a * (&id * C64::new(2.0, 0.0) - &ba) * &one_ba;
    let bl = &one_ba * b;
    let br = &one_ba * &one_ba;
    let mut p = DMatrix::zeros(2 * n, 2 * n);
    p.view_mut((0, 0), (n, n)).copy_from(&tl);
    p.view_mut((0, n), (n, n)).copy_from(&tr);
    p.view_mut((n, 0), (n, n)).copy_from(&bl);
    p.view_mut((n, n), (n, n)).copy_from(&br);
    let idempotency_residual = operator_norm(&(&p * &p - &p));
    let trace_defect = p.trace() - n as f64;
    Ok(IndexIdempotent { p, idempotency_residual, trace_defect })
}

/// The fixed `h`: smooth, zero on [-1/4, 1/4], equal to `φ ∓ 1/4` well outside.
pub fn homotopy_h(phi: f64) -> f64 {
    transition(4.0 * (phi - 0.25)) * (phi - 0.25) - transition(4.0 * (-phi - 0.25)) * (-phi - 0.25)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomotopyReport {
    pub n: usize,
    pub block: usize,
    pub x_samples: usize,
    pub phi_samples: usize,
    pub max_unitarity_defect: f64,
    pub max_u1_deviation: f64,
    pub max_phi0_deviation: f64,
    pub g_winding: i64,
}

/// Radius of the central block the homotopy defects are measured on.
pub const HOMOTOPY_BLOCK: usize = 32;

/// Central rows `|j| <= r` of `P Y_α P (I + (τ - 1)E) P Y_{-α} P`.
fn homotopy_rows(alpha: f64, tau: C64, n: usize, r: usize) -> DMatrix<C64> {
    let size = 2 * n + 1;
    let rows = 2 * r + 1;
    let off = n - r;
    // Y_α restricted to the central rows, then transposed for the Toeplitz product.
    let ya_t = DMatrix::from_fn(size, rows, |k, i| y_entry(alpha, k as i64 - (i + off) as i64));
    let prod = y_toeplitz_transposed(-alpha, n).mul(&ya_t).transpose();
    let mut out = prod;
    for i in 0..rows {
        let c = (tau - 1.0) * ya_t[(n, i)];
        for k in 0..size {
            out[(i, k)] += c * y_entry(-alpha, k as i64 - n as i64);
        }
    }
    out
}

/// Samples the unitary path `U_x(φ)` from the boundary symbol of `t(D)`
/// to `I + (t(-φ) - 1)E` and reports its defects.
pub fn homotopy_delta0_check(n: usize, x_samples: usize, phi_samples: usize) -> HomotopyReport {
    let r = HOMOTOPY_BLOCK.min(n);
    let t = ExtendedFunction::t();
    let mut max_unit: f64 = 0.0;
    let mut max_u1: f64 = 0.0;
    let mut max_phi0: f64 = 0.0;
    let rows = 2 * r + 1;
    let id = DMatrix::<C64>::identity(rows, rows);
    for xi in 0..x_samples {
        let x = if x_samples > 1 { xi as f64 / (x_samples - 1) as f64 } else { 1.0 };
        for pi in 0..phi_samples {
            let phi = if phi_samples > 1 { -0.5 + pi as f64 / (phi_samples - 1) as f64 } else { 0.0 };
            let alpha = (1.0 - x) * phi + x * homotopy_h(phi);
            let tau = t.eval(-phi);
            let u = homotopy_rows(alpha, tau, n, r);
            max_unit = max_unit.max(operator_norm(&(&u * u.adjoint() - &id)));
            let block = u.columns(n - r, rows).into_owned();
            let mut target = id.clone();
            target[(r, r)] = tau;
            let dev = operator_norm(&(block - target));
            if xi + 1 == x_samples {
                max_u1 = max_u1.max(dev);
            }
            if phi == 0.0 {
                max_phi0 = max_phi0.max(dev);
            }
        }
    }
    let g: Vec<C64> = (0..4096).map(|k| t.eval(-(-0.5 + k as f64 / 4096.0))).collect();
    let g_winding = winding_number(&g, 1e-8).unwrap_or(i64::MIN);
    HomotopyReport {
        n,
        block: rows,
        x_samples,
        phi_samples,
        max_unitarity_defect: max_unit,
        max_u1_deviation: max_u1,
        max_phi0_deviation: max_phi0,
        g_winding,
    }
}

/// Coordinates in ℤ[B₁] ⊕ ℤ[B₂] ⊕ ℤ[B₃].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AkCoordinates {
    pub n_plus: i64,
    pub n_minus: i64,
    pub m: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AkReport {
    pub coordinates: AkCoordinates,
    /// Determinant windings of `γ L(1/f)` at ends -1 and +1.
    pub gamma_windings: (i64, i64),
    /// Winding of the loop along the ξ=+∞ line and back along ξ=-∞.
    pub line_winding: i64,
}

const AK_N: usize = 48;
const AK_PHIS: usize = 512;
const AK_THETAS: usize = 1024;
const AK_LINE: usize = 1 << 16;

fn circle_symbol(e: &OpExpr, end: End) -> Vec<C64> {
    (0..AK_THETAS)
        .map(|q| {
            let theta = 2.0 * PI * q as f64 / AK_THETAS as f64;
            sigma_at(e, SigmaPoint::Circle { plus: end == End::Plus, theta, xi: XiEnd::Plus })
        })
        .collect()
}

/// Laurent matrix of a sampled circle function, rows `|j| <= rows`,
/// columns `|k| <= cols`, entry `(j, k)` the coefficient of `e^{i(j-k)θ}`.
fn laurent(samples: &[C64], rows: usize, cols: usize) -> DMatrix<C64> {
    let m = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let coef = |d: i64| buf[d.rem_euclid(m as i64) as usize] / m as f64;
    DMatrix::from_fn(2 * rows + 1, 2 * cols + 1, |j, k| coef((j as i64 - rows as i64) - (k as i64 - cols as i64)))
}

fn gamma_winding(e: &OpExpr, end: End) -> Result<i64, SymbolError> {
    let f = circle_symbol(e, end);
    let inv: Vec<C64> = f.iter().map(|z| 1.0 / z).collect();
    let w = e.band_width();
    let l = laurent(&inv, AK_N + w, AK_N);
    let mut dets = Vec::with_capacity(AK_PHIS);
    for q in 0..AK_PHIS {
        let phi = q as f64 / AK_PHIS as f64;
        let g = band_frame(e, phi, end, AK_N + 2 * w + 2).dense(AK_N, AK_N + w);
        dets.push((g * &l).determinant());
    }
    let m = dets.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
    if m <= 1e-8 {
        return Err(SymbolError::DeterminantThroughZero { min_modulus: m });
    }
    winding_number(&dets, 1e-8)
}

fn line_winding(e: &OpExpr, half_length: f64) -> Result<i64, SymbolError> {
    let xs: Vec<f64> = (0..AK_LINE).map(|k| -half_length + 2.0 * half_length * k as f64 / (AK_LINE - 1) as f64).collect();
    let mut curve: Vec<C64> = xs.iter().map(|&x| sigma_at(e, SigmaPoint::Line { x, xi: XiEnd::Plus })).collect();
    curve.extend(xs.iter().rev().map(|&x| sigma_at(e, SigmaPoint::Line { x, xi: XiEnd::Minus })));
    winding_number(&curve, 1e-8)
}

pub fn k1_ak_coordinates(e: &OpExpr, tols: &FredholmTols) -> Result<AkCoordinates, SymbolError> {
    k1_ak_detailed(e, tols).map(|r| r.coordinates)
}

/// `n±` are the σ windings on the circles over `x = ±∞`; `m` is the sum of
/// the boundary-symbol determinant windings (end +1 minus end -1) after
/// dividing out the circle symbol, and the winding of σ around the line
/// loop. Normalized so that `l(M)`, `l̃(M)` and `B₃` are the unit vectors.
pub fn k1_ak_detailed(e: &OpExpr, tols: &FredholmTols) -> Result<AkReport, SymbolError> {
    let fr = is_fredholm(e, tols);
    if fr.verdict != FredholmVerdict::Fredholm {
        return Err(SymbolError::NotFredholm(format!("{:?}", fr.verdict)));
    }
    let s = sigma_symbol(e, &tols.grid);
    let mut w = [0i64; 4];
    for (slot, name) in w.iter_mut().zip(CHART_NAMES[2..].iter()) {
        *slot = winding_number(&s.chart(name).values, tols.sigma_tol)?;
    }
    // circneg_minusXi, circneg_plusXi, circpos_minusXi, circpos_plusXi
    let [neg_m, neg_p, pos_m, pos_p] = w;
    if pos_p != pos_m {
        return Err(SymbolError::SheetMismatch { plus: pos_p, minus: pos_m });
    }
    if neg_p != neg_m {
        return Err(SymbolError::SheetMismatch { plus: neg_p, minus: neg_m });
    }
    let gm = gamma_winding(e, End::Minus)?;
    let gp = gamma_winding(e, End::Plus)?;
    let lw = line_winding(e, tols.grid.line_half_length)?;
    Ok(AkReport {
        coordinates: AkCoordinates { n_plus: pos_p, n_minus: neg_p, m: gp - gm + lw },
        gamma_windings: (gm, gp),
        line_winding: lw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcat::PeriodicFunction;
    use crate::opalg::builtins;

    fn quick_tols() -> FredholmTols {
        FredholmTols { ns: vec![32, 64], phis: crate::gamma::phi_grid(16), ..Default::default() }
    }

    #[test]
    fn delta0_examples() {
        let b = OpExpr::FMult(ExtendedFunction::b());
        let c = OpExpr::FMult(ExtendedFunction::c());
        let db = delta0(&b, 16, 256).unwrap();
        let dc = delta0(&c, 16, 256).unwrap();
        assert_eq!(db, KClassE { u_coord: 1, v_coord: 1 });
        assert_eq!(dc, KClassE { u_coord: -1, v_coord: -1 });
        assert_eq!(db + dc, KClassE { u_coord: 0, v_coord: 0 });
        assert_eq!(delta0(&OpExpr::Identity, 16, 64).unwrap(), KClassE { u_coord: 0, v_coord: 0 });
    }

    #[test]
    fn delta0_rejects_bad_input() {
        assert_eq!(delta0(&OpExpr::FMult(ExtendedFunction::t()), 8, 16), Err(SymbolError::NotSelfAdjoint));
        let half = OpExpr::scalar(C64::new(0.5, 0.0), OpExpr::Identity);
        assert!(matches!(delta0(&half, 8, 16), Err(SymbolError::NotProjectionSymbol { .. })));
    }

    #[test]
    fn delta1_values_and_additivity() {
        let a1 = delta1_with(&builtins::a1(), 32, 1e-6).unwrap();
        let a3 = delta1_with(&builtins::a3(), 32, 1e-6).unwrap();
        assert_eq!(a1, IndexPair { ind_minus: 0, ind_plus: -1 });
        assert_eq!(a3, IndexPair { ind_minus: 0, ind_plus: 1 });
        let p = delta1_with(&OpExpr::Prod(vec![builtins::a1(), builtins::a3()]), 32, 1e-6).unwrap();
        assert_eq!(p, a1 + a3);
    }

    #[test]
    fn index_idempotent_exact_inverse() {
        let a = DMatrix::from_fn(4, 4, |j, k| C64::new(if j == k { 2.0 } else { 0.1 * (j + k) as f64 }, 0.3 * j as f64));
        let b = a.clone().try_inverse().unwrap();
        let lm = index_idempotent(&a, &b).unwrap();
        let mut want = DMatrix::zeros(8, 8);
        for i in 0..4 {
            want[(i, i)] = C64::new(1.0, 0.0);
        }
        assert!((&lm.p - want).norm() < 1e-12);
        assert!(lm.idempotency_residual < 1e-12);
    }

    #[test]
    fn index_idempotent_zero_pair() {
        let z = DMatrix::zeros(3, 3);
        let lm = index_idempotent(&z, &z).unwrap();
        for i in 0..6 {
            let want = if i >= 3 { 1.0 } else { 0.0 };
            assert_eq!(lm.p[(i, i)], C64::new(want, 0.0));
        }
        // tr P = n here, so the unlocalized defect is 0, not -n.
        assert_eq!(lm.trace_defect, C64::new(0.0, 0.0));
        assert!(matches!(index_idempotent(&z, &DMatrix::zeros(2, 2)), Err(SymbolError::DimensionMismatch(_))));
    }

    #[test]
    fn index_idempotent_localized_trace_is_index() {
        let n = 32;
        let a = gamma_frame(&builtins::a1(), 0.0, End::Plus, n);
        let b = a.clone().pseudo_inverse(1e-6).unwrap();
        let lm = index_idempotent(&a, &b).unwrap();
        let d = lm.localized_trace_defect(&central_weight(n, n / 2));
        assert!((d.re - -1.0).abs() < 1e-6 && d.im.abs() < 1e-6, "{d}");
    }

    #[test]
    fn homotopy_small() {
        let r = homotopy_delta0_check(64, 3, 9);
        assert_eq!(r.g_winding, 1);
        assert!(r.max_phi0_deviation < 1e-14);
        let r2 = homotopy_delta0_check(128, 3, 9);
        assert!(r2.max_unitarity_defect < r.max_unitarity_defect);
    }

    #[test]
    fn h_vanishes_in_middle() {
        assert_eq!(homotopy_h(0.2), 0.0);
        assert_eq!(homotopy_h(-0.25), 0.0);
        assert!(homotopy_h(0.4) > 0.0 && homotopy_h(-0.4) < 0.0);
    }

    #[test]
    fn ak_coordinates_of_generators() {
        let t = quick_tols();
        let c = |e: &OpExpr| k1_ak_coordinates(e, &t).unwrap();
        assert_eq!(c(&OpExpr::Identity), AkCoordinates { n_plus: 0, n_minus: 0, m: 0 });
        assert_eq!(c(&builtins::b1()), AkCoordinates { n_plus: 1, n_minus: 0, m: 0 });
        assert_eq!(c(&builtins::b2()), AkCoordinates { n_plus: 0, n_minus: 1, m: 0 });
        assert_eq!(c(&builtins::b3()), AkCoordinates { n_plus: 0, n_minus: 0, m: 1 });
        assert_eq!(c(&builtins::u_plus()).m, 1);
        assert_eq!(c(&builtins::u_minus()).m, 1);
        assert_eq!(c(&OpExpr::FMult(ExtendedFunction::t())).m, 0);
        let e2 = OpExpr::mult_periodic(PeriodicFunction::e(2));
        assert!(matches!(k1_ak_coordinates(&e2, &t), Ok(AkCoordinates { n_plus: 2, n_minus: 2, m: 0 })));
    }
}
