//! The boundary symbol: operators on ℓ²(ℤ) attached to each point
//! `(e^{2πiφ}, ±1)` of the co-sphere bundle of the circle.
//!
//! Every generator's boundary symbol has the form `Y_φ G Y_{-φ}` where `G` is
//! a band matrix: `a(M)` gives `a(±∞) I`, `e_k(M)` gives the exact shift
//! `Y_{-k}` and `b(D)` gives `diag(b(j - φ))`. Since the `Y_φ` commute with
//! shifts and with each other, the boundary symbol of any expression is
//! `Y_φ G_e(φ) Y_{-φ}` with `G_e(φ)` assembled exactly in the band algebra.
//! [`gamma_frame`] returns that band matrix; [`gamma_eval`] returns the
//! truncated conjugated matrix.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::SymbolError;
use crate::funcat::ExtendedFunction;
use crate::linalg::{central_weight, localized_null_count, smallest_singular_value, LocalizedCount, Toeplitz};
use crate::opalg::OpExpr;
use crate::sigma::{sigma_invertible, sigma_symbol, SigmaGrid, SigmaVerdict, Verdict};

/// Component of the co-sphere bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, PartialOrd, Ord)]
pub enum End {
    Minus,
    Plus,
}

impl End {
    pub fn sign(self) -> i64 {
        match self {
            End::Minus => -1,
            End::Plus => 1,
        }
    }

    pub fn from_sign(s: i64) -> Option<End> {
        match s {
            -1 => Some(End::Minus),
            1 => Some(End::Plus),
            _ => None,
        }
    }

    pub const BOTH: [End; 2] = [End::Minus, End::Plus];
}

/// Truncated boundary-symbol matrix, indices `j, k` in `[-N, N]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaMatrix {
    pub entries: DMatrix<C64>,
    pub phi: f64,
    pub end: End,
    pub n: usize,
}

impl GammaMatrix {
    /// Text export: header `gamma N phi end`, then one `re im` pair per line
    /// in row-major order.
    pub fn to_text(&self) -> String {
        let mut s = format!("gamma {} {:?} {}\n", self.n, self.phi, self.end.sign());
        for r in 0..self.entries.nrows() {
            for c in 0..self.entries.ncols() {
                let v = self.entries[(r, c)];
                let _ = writeln!(s, "{:.17e} {:.17e}", v.re, v.im);
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<GammaMatrix, SymbolError> {
        let bad = |m: &str| SymbolError::BadParameters(format!("gamma text: {m}"));
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if header.len() != 4 || header[0] != "gamma" {
            return Err(bad("header"));
        }
        let n: usize = header[1].parse().map_err(|_| bad("N"))?;
        let phi: f64 = header[2].parse().map_err(|_| bad("phi"))?;
        let end = End::from_sign(header[3].parse().map_err(|_| bad("end"))?).ok_or_else(|| bad("end"))?;
        let size = 2 * n + 1;
        let mut vals = Vec::with_capacity(size * size);
        for line in lines {
            let mut it = line.split_whitespace();
            let re: f64 = it.next().ok_or_else(|| bad("re"))?.parse().map_err(|_| bad("re"))?;
            let im: f64 = it.next().ok_or_else(|| bad("im"))?.parse().map_err(|_| bad("im"))?;
            vals.push(C64::new(re, im));
        }
        if vals.len() != size * size {
            return Err(bad("entry count"));
        }
        Ok(GammaMatrix { entries: DMatrix::from_row_slice(size, size, &vals), phi, end, n })
    }
}

/// Entry `y(m)` of `Y_φ` at offset `m = k - j`.
pub fn y_entry(phi: f64, m: i64) -> C64 {
    if phi.fract() == 0.0 {
        return if m as f64 == phi { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    }
    let num = C64::from_polar(1.0, -2.0 * PI * phi) - 1.0;
    num / (C64::new(0.0, 2.0 * PI) * (m as f64 - phi))
}

/// Truncation of `Y_φ` to `[-N, N]`.
pub fn y_matrix(phi: f64, n: usize) -> DMatrix<C64> {
    let size = 2 * n + 1;
    DMatrix::from_fn(size, size, |j, k| y_entry(phi, k as i64 - j as i64))
}

pub fn y_toeplitz(phi: f64, n: usize) -> Toeplitz {
    let size = 2 * n + 1;
    // a(d) with d = j - k, so the offset k - j is -d.
    let a: Vec<C64> = (0..2 * size - 1).map(|i| y_entry(phi, -(i as i64 - (size as i64 - 1)))).collect();
    Toeplitz::new(size, &a)
}

pub fn y_toeplitz_transposed(phi: f64, n: usize) -> Toeplitz {
    let size = 2 * n + 1;
    let a: Vec<C64> = (0..2 * size - 1).map(|i| y_entry(phi, i as i64 - (size as i64 - 1))).collect();
    Toeplitz::new(size, &a)
}

/// `diag(b(j - φ))` on `[-N, N]`.
pub fn m_diag(b: &ExtendedFunction, phi: f64, n: usize) -> DMatrix<C64> {
    let size = 2 * n + 1;
    DMatrix::from_fn(size, size, |j, k| if j == k { b.eval(j as f64 - n as f64 - phi) } else { C64::new(0.0, 0.0) })
}

/// The rank-one projection onto the coordinate `j = 0`.
pub struct RankOneProjector;

impl RankOneProjector {
    pub fn matrix(n: usize) -> DMatrix<C64> {
        let size = 2 * n + 1;
        DMatrix::from_fn(size, size, |j, k| if j == n && k == n { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }
}

/// A band matrix on the index window `[-r, r]`, stored by diagonals:
/// `diags[d][j + r]` is the entry `(j, j + d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    pub r: usize,
    pub diags: BTreeMap<i64, Vec<C64>>,
}

impl Band {
    fn len(&self) -> usize {
        2 * self.r + 1
    }

    pub fn zero(r: usize) -> Self {
        Band { r, diags: BTreeMap::new() }
    }

    pub fn diagonal<F: Fn(i64) -> C64>(r: usize, f: F) -> Self {
        let v: Vec<C64> = (0..2 * r + 1).map(|i| f(i as i64 - r as i64)).collect();
        let mut diags = BTreeMap::new();
        diags.insert(0, v);
        Band { r, diags }
    }

    pub fn identity(r: usize) -> Self {
        Self::diagonal(r, |_| C64::new(1.0, 0.0))
    }

    /// `z` times the shift with entries at `(j, j + d)`, cut to the window.
    pub fn shift(r: usize, d: i64, z: C64) -> Self {
        let ri = r as i64;
        let v = (0..2 * r + 1)
            .map(|i| {
                let k = i as i64 - ri + d;
                if k.abs() <= ri {
                    z
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let mut diags = BTreeMap::new();
        diags.insert(d, v);
        Band { r, diags }
    }

    pub fn scale(mut self, z: C64) -> Self {
        for v in self.diags.values_mut() {
            v.iter_mut().for_each(|x| *x *= z);
        }
        self
    }

    pub fn add(mut self, other: &Band) -> Self {
        for (d, v) in &other.diags {
            let e = self.diags.entry(*d).or_insert_with(|| vec![C64::new(0.0, 0.0); v.len()]);
            e.iter_mut().zip(v).for_each(|(a, b)| *a += b);
        }
        self
    }

    pub fn mul(&self, other: &Band) -> Band {
        let ri = self.r as i64;
        let mut out: BTreeMap<i64, Vec<C64>> = BTreeMap::new();
        for (d1, v1) in &self.diags {
            for (d2, v2) in &other.diags {
                let dst = out.entry(d1 + d2).or_insert_with(|| vec![C64::new(0.0, 0.0); self.len()]);
                for (i, a) in v1.iter().enumerate() {
                    if *a == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let k = i as i64 + d1;
                    if k < 0 || k > 2 * ri {
                        continue;
                    }
                    dst[i] += a * v2[k as usize];
                }
            }
        }
        Band { r: self.r, diags: out }
    }

    pub fn adjoint(&self) -> Band {
        let ri = self.r as i64;
        let mut out = BTreeMap::new();
        for (d, v) in &self.diags {
            // entry (j, j - d) of the adjoint is conj of entry (j - d, j).
            let w = (0..self.len())
                .map(|i| {
                    let src = i as i64 - d;
                    if src < 0 || src > 2 * ri {
                        C64::new(0.0, 0.0)
                    } else {
                        v[src as usize].conj()
                    }
                })
                .collect();
            out.insert(-d, w);
        }
        Band { r: self.r, diags: out }
    }

    pub fn width(&self) -> usize {
        self.diags
            .iter()
            .filter(|(_, v)| v.iter().any(|x| *x != C64::new(0.0, 0.0)))
            .map(|(d, _)| d.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn get(&self, j: i64, k: i64) -> C64 {
        let ri = self.r as i64;
        if j.abs() > ri || k.abs() > ri {
            return C64::new(0.0, 0.0);
        }
        self.diags.get(&(k - j)).map(|v| v[(j + ri) as usize]).unwrap_or(C64::new(0.0, 0.0))
    }

    /// `P_n B P_n m` for `m` with rows indexed by `[-n, n]`.
    pub fn apply_dense(&self, n: usize, m: &DMatrix<C64>) -> DMatrix<C64> {
        let (ni, ri) = (n as i64, self.r as i64);
        let mut out = DMatrix::zeros(m.nrows(), m.ncols());
        for (d, v) in &self.diags {
            for j in -ni..=ni {
                let k = j + d;
                if k.abs() > ni {
                    continue;
                }
                let b = v[(j + ri) as usize];
                if b == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..m.ncols() {
                    out[((j + ni) as usize, c)] += b * m[((k + ni) as usize, c)];
                }
            }
        }
        out
    }

    /// `m P_n B P_n` for `m` with columns indexed by `[-n, n]`.
    pub fn left_apply_dense(&self, n: usize, m: &DMatrix<C64>) -> DMatrix<C64> {
        let (ni, ri) = (n as i64, self.r as i64);
        let mut out = DMatrix::zeros(m.nrows(), m.ncols());
        for (d, v) in &self.diags {
            for j in -ni..=ni {
                let k = j + d;
                if k.abs() > ni {
                    continue;
                }
                let b = v[(j + ri) as usize];
                if b == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..m.nrows() {
                    out[(i, (k + ni) as usize)] += m[(i, (j + ni) as usize)] * b;
                }
            }
        }
        out
    }

    /// Dense block with rows `|j| <= rows` and columns `|k| <= cols`.
    pub fn dense(&self, rows: usize, cols: usize) -> DMatrix<C64> {
        let (ri, ci) = (rows as i64, cols as i64);
        let mut m = DMatrix::zeros(2 * rows + 1, 2 * cols + 1);
        for (d, v) in &self.diags {
            for j in -ri..=ri {
                let k = j + d;
                if k.abs() <= ci && j.abs() <= self.r as i64 && k.abs() <= self.r as i64 {
                    m[((j + ri) as usize, (k + ci) as usize)] = v[(j + self.r as i64) as usize];
                }
            }
        }
        m
    }
}

/// Band matrix `G_e(φ)` with `γ_e(e^{2πiφ}, end) = Y_φ G_e(φ) Y_{-φ}`, built on
/// the window `[-r, r]`. Entries with `|j|, |k| <= r - e.band_width()` are
/// exact entries of the infinite matrix.
pub fn band_frame(e: &OpExpr, phi: f64, end: End, r: usize) -> Band {
    frame_rec(e, phi, end, r, false)
}

/// The Laurent part of the frame: every `b(D)` replaced by `b(-∞)`. It
/// commutes with `Y_φ`.
fn band_laurent(e: &OpExpr, end: End, r: usize) -> Band {
    frame_rec(e, 0.0, end, r, true)
}

fn frame_rec(e: &OpExpr, phi: f64, end: End, r: usize, laurent: bool) -> Band {
    match e {
        OpExpr::Identity => Band::identity(r),
        OpExpr::Scalar(z, c) => frame_rec(c, phi, end, r, laurent).scale(*z),
        OpExpr::Mult(s) => {
            let mut acc = Band::zero(r);
            for (a, p) in &s.terms {
                let lim = match end {
                    End::Plus => a.limit_plus(),
                    End::Minus => a.limit_minus(),
                };
                if lim == C64::new(0.0, 0.0) {
                    continue;
                }
                for (k, ck) in p.coeffs() {
                    // e_k(M) acts as Y_{-k}: (Y_{-k} u)_j = u_{j-k}.
                    acc = acc.add(&Band::shift(r, -*k, lim * *ck));
                }
            }
            acc
        }
        OpExpr::FMult(b) => {
            if laurent {
                let v = b.limit_minus();
                Band::diagonal(r, |_| v)
            } else {
                Band::diagonal(r, |j| b.eval(j as f64 - phi))
            }
        }
        OpExpr::Sum(cs) => cs.iter().fold(Band::zero(r), |acc, c| acc.add(&frame_rec(c, phi, end, r, laurent))),
        OpExpr::Prod(cs) => {
            let mut it = cs.iter();
            let first = match it.next() {
                Some(c) => frame_rec(c, phi, end, r, laurent),
                None => return Band::identity(r),
            };
            it.fold(first, |acc, c| acc.mul(&frame_rec(c, phi, end, r, laurent)))
        }
        OpExpr::Adjoint(c) => frame_rec(c, phi, end, r, laurent).adjoint(),
    }
}

fn frame_pad(e: &OpExpr) -> usize {
    e.band_width() + 2
}

/// Exact compression of `G_e(φ)` to `[-N, N]` as a dense matrix.
pub fn gamma_frame(e: &OpExpr, phi: f64, end: End, n: usize) -> DMatrix<C64> {
    band_frame(e, phi, end, n + frame_pad(e)).dense(n, n)
}

/// Truncated boundary symbol `P_N Y_φ P_N G P_N Y_{-φ} P_N` plus the Laurent
/// part of `G`, which commutes with `Y_φ` and is added unconjugated.
pub fn gamma_eval(e: &OpExpr, phi: f64, end: End, n: usize) -> GammaMatrix {
    let r = n + frame_pad(e);
    let g = band_frame(e, phi, end, r);
    let l = band_laurent(e, end, r);
    let rest = g.add(&l.clone().scale(C64::new(-1.0, 0.0))).dense(n, n);
    let laurent = l.dense(n, n);
    let entries = if phi.fract() == 0.0 {
        // Y at integers is an exact shift.
        let y = y_matrix(phi, n);
        let ym = y_matrix(-phi, n);
        &y * rest * &ym + laurent
    } else {
        // rest * Y_{-φ} = (Y_{-φ}^T rest^T)^T
        let right_t = y_toeplitz_transposed(-phi, n);
        let rest_y = right_t.mul(&rest.transpose()).transpose();
        y_toeplitz(phi, n).mul(&rest_y) + laurent
    };
    GammaMatrix { entries, phi, end, n }
}

fn split_frame(e: &OpExpr, phi: f64, end: End, n: usize) -> (Band, Band) {
    let r = n + frame_pad(e);
    let g = band_frame(e, phi, end, r);
    let l = band_laurent(e, end, r);
    (g.add(&l.clone().scale(C64::new(-1.0, 0.0))), l)
}

/// Rows `|j| <= r` of [`gamma_eval`]`(e, φ, end, N)`, all columns.
pub fn gamma_central_rows(e: &OpExpr, phi: f64, end: End, n: usize, r: usize) -> DMatrix<C64> {
    let (rest, l) = split_frame(e, phi, end, n);
    let size = 2 * n + 1;
    let off = n - r;
    let y = DMatrix::from_fn(2 * r + 1, size, |i, k| y_entry(phi, k as i64 - (i + off) as i64));
    let b = rest.left_apply_dense(n, &y);
    // b Y_{-φ} = (Y_{-φ}^T b^T)^T
    let by = y_toeplitz_transposed(-phi, n).mul(&b.transpose()).transpose();
    by + l.dense(n, n).rows(off, 2 * r + 1)
}

/// Columns `|k| <= r` of [`gamma_eval`]`(e, φ, end, N)`, all rows.
pub fn gamma_central_cols(e: &OpExpr, phi: f64, end: End, n: usize, r: usize) -> DMatrix<C64> {
    let (rest, l) = split_frame(e, phi, end, n);
    let size = 2 * n + 1;
    let off = n - r;
    let y = DMatrix::from_fn(size, 2 * r + 1, |j, i| y_entry(-phi, (i + off) as i64 - j as i64));
    let b = rest.apply_dense(n, &y);
    y_toeplitz(phi, n).mul(&b) + l.dense(n, n).columns(off, 2 * r + 1)
}

/// Invertibility certificate at one `(φ, end, N)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaCertificate {
    pub phi: f64,
    pub end: i64,
    pub n: usize,
    pub min_singular_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaVerdict {
    pub verdict: Verdict,
    pub certificates: Vec<GammaCertificate>,
    pub worst: Option<GammaCertificate>,
}

/// Lower bound of `‖G x‖ / ‖x‖` and of `‖G* x‖ / ‖x‖` over vectors supported
/// in `|j| <= N/2`. Both are positive and stable in `N` exactly when the
/// boundary symbol is invertible; they can only decrease as `N` grows.
pub fn central_lower_bound(e: &OpExpr, phi: f64, end: End, n: usize) -> f64 {
    let c = n / 2;
    let w = e.band_width();
    let band = band_frame(e, phi, end, c + 2 * w + 2);
    if band.width() == 0 {
        let r = band.r as i64;
        return match band.diags.get(&0) {
            Some(d) => (-(c as i64)..=c as i64).map(|j| d[(j + r) as usize].norm()).fold(f64::INFINITY, f64::min),
            None => 0.0,
        };
    }
    let rows = c + w;
    let t = band.dense(rows, c);
    let ts = band.adjoint().dense(rows, c);
    smallest_singular_value(&t).min(smallest_singular_value(&ts))
}

/// Sampled invertibility verdict for the boundary symbol.
pub fn gamma_invertible(e: &OpExpr, tol: f64, ns: &[usize], phis: &[f64]) -> GammaVerdict {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let mut certificates = Vec::new();
    let mut verdict = Verdict::Invertible;
    let mut worst: Option<GammaCertificate> = None;
    for &phi in phis {
        for end in End::BOTH {
            let vals: Vec<f64> = ns.iter().map(|&n| central_lower_bound(e, phi, end, n)).collect();
            for (&n, &v) in ns.iter().zip(&vals) {
                let cert = GammaCertificate { phi, end: end.sign(), n, min_singular_value: v };
                if worst.as_ref().map_or(true, |w| v < w.min_singular_value) {
                    worst = Some(cert.clone());
                }
                certificates.push(cert);
            }
            let last = *vals.last().unwrap_or(&f64::INFINITY);
            let first = *vals.first().unwrap_or(&f64::INFINITY);
            if last.is_nan() {
                if verdict == Verdict::Invertible {
                    verdict = Verdict::Inconclusive;
                }
            } else if last <= tol {
                verdict = Verdict::NotInvertible;
            } else if last < 0.5 * first && verdict == Verdict::Invertible {
                verdict = Verdict::Inconclusive;
            }
        }
    }
    GammaVerdict { verdict, certificates, worst }
}

/// Default φ grid: `m` uniform points in [0, 1).
pub fn phi_grid(m: usize) -> Vec<f64> {
    (0..m).map(|k| k as f64 / m as f64).collect()
}

/// Index of `γ_e(1, end)` with the near-null analysis at `N` and `2N`.
pub fn gamma_index(e: &OpExpr, end: End, n: usize, tau: f64) -> Result<i64, SymbolError> {
    gamma_index_detailed(e, end, n, tau).map(|r| r.index)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexReport {
    pub index: i64,
    pub counts: Vec<(usize, LocalizedCount)>,
}

pub fn gamma_index_detailed(e: &OpExpr, end: End, n: usize, tau: f64) -> Result<IndexReport, SymbolError> {
    let sv = sigma_invertible(&sigma_symbol(e, &SigmaGrid::default()), 1e-8);
    if sv.verdict != Verdict::Invertible {
        return Err(SymbolError::HypothesisViolated(format!(
            "principal symbol not invertible (min modulus {:e} on {})",
            sv.min_modulus, sv.chart
        )));
    }
    let mut counts = Vec::new();
    for size in [n, 2 * n] {
        let m = gamma_frame(e, 0.0, end, size);
        let c = localized_null_count(&m, tau, &central_weight(size, size / 2))?;
        counts.push((size, c));
    }
    let (a, b) = (counts[0].1.index(), counts[1].1.index());
    if a != b {
        return Err(SymbolError::NoPlateau { first: a, second: b });
    }
    Ok(IndexReport { index: a, counts })
}

/// Tail profile of one boundary-symbol sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySample {
    pub phi: f64,
    pub end: i64,
    pub total_mass: f64,
    /// `(block width k, fraction of Frobenius mass outside the central k x k block)`.
    pub tail: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub n: usize,
    pub samples: Vec<DecaySample>,
}

impl DecayReport {
    /// Largest tail fraction at block width `k` over all samples.
    pub fn max_tail_at(&self, k: usize) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| s.tail.iter().find(|(w, _)| *w >= k).map(|(_, f)| *f))
            .fold(0.0, f64::max)
    }
}

/// Frobenius mass of `γ_e` outside growing central blocks, for an element
/// whose principal symbol vanishes identically.
pub fn compactness_decay(e: &OpExpr, n: usize, phis: &[f64]) -> Result<DecayReport, SymbolError> {
    let s = sigma_symbol(e, &SigmaGrid::default());
    let m = s.max_modulus();
    if m > 1e-12 {
        return Err(SymbolError::PreconditionFailed(format!("principal symbol does not vanish (max modulus {m:e})")));
    }
    let mut samples = Vec::new();
    for &phi in phis {
        for end in End::BOTH {
            let g = gamma_eval(e, phi, end, n).entries;
            let size = 2 * n + 1;
            let total: f64 = g.iter().map(|v| v.norm_sqr()).sum();
            let mut tail = Vec::new();
            let mut k = 1;
            while k <= size {
                let r = (k - 1) / 2;
                let inside: f64 = crate::linalg::central_block(&g, r).iter().map(|v| v.norm_sqr()).sum();
                let frac = if total > 0.0 { ((total - inside) / total).max(0.0) } else { 0.0 };
                tail.push((k, frac));
                if k == size {
                    break;
                }
                k = (2 * k).min(size);
            }
            samples.push(DecaySample { phi, end: end.sign(), total_mass: total, tail });
        }
    }
    Ok(DecayReport { n, samples })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FredholmVerdict {
    Fredholm,
    NotFredholm,
    Inconclusive,
}

/// Tolerances and sampling for [`is_fredholm`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FredholmTols {
    pub sigma_tol: f64,
    pub gamma_tol: f64,
    pub ns: Vec<usize>,
    pub phis: Vec<f64>,
    pub grid: SigmaGrid,
}

impl Default for FredholmTols {
    fn default() -> Self {
        FredholmTols { sigma_tol: 1e-8, gamma_tol: 1e-8, ns: vec![128, 256], phis: phi_grid(64), grid: SigmaGrid::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FredholmReport {
    pub verdict: FredholmVerdict,
    pub sigma: SigmaVerdict,
    pub gamma: Option<GammaVerdict>,
}

/// Fredholm verdict: both symbols must be invertible.
pub fn is_fredholm(e: &OpExpr, tols: &FredholmTols) -> FredholmReport {
    let sigma = sigma_invertible(&sigma_symbol(e, &tols.grid), tols.sigma_tol);
    if sigma.verdict == Verdict::NotInvertible {
        return FredholmReport { verdict: FredholmVerdict::NotFredholm, sigma, gamma: None };
    }
    let gamma = gamma_invertible(e, tols.gamma_tol, &tols.ns, &tols.phis);
    let verdict = match (sigma.verdict, gamma.verdict) {
        (_, Verdict::NotInvertible) => FredholmVerdict::NotFredholm,
        (Verdict::Invertible, Verdict::Invertible) => FredholmVerdict::Fredholm,
        _ => FredholmVerdict::Inconclusive,
    };
    FredholmReport { verdict, sigma, gamma: Some(gamma) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::builtins;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    fn max_abs(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn y_half_matches_quadrature() {
        let n = 6;
        let y = y_matrix(0.5, n);
        let nodes = 4096;
        for j in 0..2 * n + 1 {
            for k in 0..2 * n + 1 {
                let m = k as f64 - j as f64 - 0.5;
                // trapezoid rule on a non-periodic integrand needs the endpoint correction
                let f = |th: f64| C64::from_polar(1.0, m * th);
                let h = 2.0 * PI / nodes as f64;
                let mut s = (f(0.0) + f(2.0 * PI)) * 0.5;
                for i in 1..nodes {
                    s += f(i as f64 * h);
                }
                // Euler-Maclaurin: subtract h^2/12 (f'(2π) - f'(0))
                let df = |th: f64| C64::new(0.0, m) * f(th);
                let quad = (s * h - (df(2.0 * PI) - df(0.0)) * (h * h / 12.0)) / (2.0 * PI);
                let closed = C64::new(0.0, 1.0) / (PI * m);
                assert!((quad - closed).norm() < 1e-10, "{j} {k}");
                assert!((y[(j, k)] - closed).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn y_integer_is_shift() {
        let y = y_matrix(1.0, 4);
        for j in 0..9 {
            for k in 0..9 {
                let want = if k == j + 1 { one() } else { C64::new(0.0, 0.0) };
                assert_eq!(y[(j, k)], want);
            }
        }
        assert_eq!(y_matrix(0.0, 3), DMatrix::identity(7, 7));
    }

    #[test]
    fn y_unitarity_defect_decays() {
        // On a block of fixed size the defect is first order in 1/N. On a
        // block growing with N it is not: the kernel is scale invariant.
        let defect = |phi: f64, n: usize, r: usize| {
            let y = y_matrix(phi, n);
            let c = crate::linalg::central_block(&(&y * y.adjoint()), r);
            crate::linalg::operator_norm(&(c - DMatrix::identity(2 * r + 1, 2 * r + 1)))
        };
        for phi in [0.1, 0.37, 0.5, 0.93] {
            let (a, b) = (defect(phi, 64, 8), defect(phi, 128, 8));
            assert!(b < 0.6 * a, "{phi}: {a} {b}");
            let (a, b) = (defect(phi, 64, 32), defect(phi, 128, 64));
            assert!((a - b).abs() < 0.1 * a, "{phi}: {a} {b}");
        }
    }

    #[test]
    fn y_shift_covariance() {
        let n = 80;
        let lhs = crate::linalg::central_block(&y_matrix(2.3, n), 20);
        let rhs = crate::linalg::central_block(&(y_matrix(2.0, n) * y_matrix(0.3, n)), 20);
        assert!(max_abs(&(lhs - rhs)) < 1e-2);
    }

    #[test]
    fn m_diag_catalog_examples() {
        let d = m_diag(&ExtendedFunction::b(), 0.0, 3);
        assert_eq!(d[(2, 2)], C64::new(0.0, 0.0));
        assert_eq!(d[(4, 4)], one());
        assert!((d[(3, 3)] - ExtendedFunction::b().eval(0.0)).norm() < 1e-15);
        // t(D) gives I + (t(-φ) - 1) E for |φ| <= 1/2
        let phi = 0.07;
        let t = m_diag(&ExtendedFunction::t(), phi, 5);
        let want = DMatrix::identity(11, 11) + RankOneProjector::matrix(5) * (ExtendedFunction::t().eval(-phi) - 1.0);
        assert!(max_abs(&(t - want)) < 1e-14);
    }

    #[test]
    fn gamma_examples() {
        let n = 16;
        let c = OpExpr::mult_ext(ExtendedFunction::c());
        assert_eq!(max_abs(&gamma_eval(&c, 0.3, End::Plus, n).entries), 0.0);
        let fb = OpExpr::FMult(ExtendedFunction::b());
        for end in End::BOTH {
            assert_eq!(gamma_eval(&fb, 0.0, end, n).entries, m_diag(&ExtendedFunction::b(), 0.0, n));
        }
        for phi in [0.0, 0.21, 0.5, 0.8] {
            let g = gamma_eval(&builtins::b3(), phi, End::Minus, n).entries;
            assert!(max_abs(&(g - DMatrix::identity(2 * n + 1, 2 * n + 1))) < 1e-14);
        }
    }

    #[test]
    fn gamma_matches_conjugation_rule() {
        let n = 96;
        let phi = 0.3;
        let fb = OpExpr::FMult(ExtendedFunction::b());
        let g = gamma_eval(&fb, phi, End::Plus, n).entries;
        let direct = y_matrix(phi, n) * m_diag(&ExtendedFunction::b(), phi, n) * y_matrix(-phi, n);
        let diff = crate::linalg::central_block(&(g - direct), 24);
        assert!(max_abs(&diff) < 2e-2);
    }

    #[test]
    fn gamma_homomorphism_on_central_block() {
        let e = builtins::a1();
        let f = builtins::a3();
        let prod = OpExpr::Prod(vec![e.clone(), f.clone()]);
        let err = |n: usize| {
            let ge = gamma_eval(&e, 0.3, End::Plus, n).entries;
            let gf = gamma_eval(&f, 0.3, End::Plus, n).entries;
            let gp = gamma_eval(&prod, 0.3, End::Plus, n).entries;
            let r = n / 4;
            let lhs = crate::linalg::central_block(&(ge * gf), r);
            max_abs(&(lhs - crate::linalg::central_block(&gp, r)))
        };
        let (a, b) = (err(48), err(96));
        assert!(b < a && b < 2e-2, "{a} {b}");
    }

    #[test]
    fn central_rows_and_cols_match_full() {
        let e = OpExpr::Prod(vec![builtins::a2(), builtins::u_minus()]);
        for phi in [0.0, 0.37] {
            let full = gamma_eval(&e, phi, End::Plus, 24).entries;
            let rows = gamma_central_rows(&e, phi, End::Plus, 24, 5);
            let cols = gamma_central_cols(&e, phi, End::Plus, 24, 5);
            assert!(max_abs(&(rows - full.rows(19, 11))) < 1e-13);
            assert!(max_abs(&(cols - full.columns(19, 11))) < 1e-13);
        }
    }

    #[test]
    fn gamma_one_periodic() {
        let e = builtins::a2();
        let n = 96;
        let g0 = gamma_eval(&e, 0.25, End::Plus, n).entries;
        let g1 = gamma_eval(&e, 1.25, End::Plus, n).entries;
        let d = crate::linalg::central_block(&(g0 - g1), 24);
        assert!(max_abs(&d) < 2e-2);
    }

    #[test]
    fn text_roundtrip() {
        let g = gamma_eval(&builtins::a1(), 0.4, End::Minus, 3);
        let back = GammaMatrix::from_text(&g.to_text()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn invertibility_verdicts() {
        let phis = phi_grid(8);
        let id = gamma_invertible(&OpExpr::Identity, 1e-8, &[32, 64], &phis);
        assert_eq!(id.verdict, Verdict::Invertible);
        assert!((id.worst.unwrap().min_singular_value - 1.0).abs() < 1e-12);
        let c = OpExpr::mult_ext(ExtendedFunction::c());
        assert_eq!(gamma_invertible(&c, 1e-8, &[32, 64], &phis).verdict, Verdict::NotInvertible);
        let a1 = gamma_invertible(&builtins::a1(), 1e-8, &[32, 64], &phis);
        assert_ne!(a1.verdict, Verdict::Invertible);
        assert_eq!(gamma_invertible(&builtins::b3(), 1e-8, &[32, 64], &phis).verdict, Verdict::Invertible);
    }

    #[test]
    fn fredholm_examples() {
        let tols = FredholmTols { ns: vec![32, 64], phis: phi_grid(8), ..Default::default() };
        assert_eq!(is_fredholm(&OpExpr::Identity, &tols).verdict, FredholmVerdict::Fredholm);
        let fb = OpExpr::FMult(ExtendedFunction::b());
        let r = is_fredholm(&fb, &tols);
        assert_eq!(r.verdict, FredholmVerdict::NotFredholm);
        assert!(r.gamma.is_none());
        assert_eq!(is_fredholm(&builtins::b3(), &tols).verdict, FredholmVerdict::Fredholm);
    }

    #[test]
    fn index_of_generators() {
        assert_eq!(gamma_index(&OpExpr::Identity, End::Plus, 32, 1e-6), Ok(0));
        // A₁ at end +1 maps u_0 to (u_0/2)(e_0 + e_1) and u_k to e_{k+1}: one
        // missing direction in the range, none in the kernel.
        assert_eq!(gamma_index(&builtins::a1(), End::Plus, 32, 1e-6), Ok(-1));
        assert_eq!(gamma_index(&builtins::a1(), End::Minus, 32, 1e-6), Ok(0));
        assert_eq!(gamma_index(&builtins::a4(), End::Minus, 32, 1e-6), Ok(1));
        assert_eq!(gamma_index(&builtins::a4(), End::Plus, 32, 1e-6), Ok(0));
        assert!(matches!(
            gamma_index(&OpExpr::FMult(ExtendedFunction::b()), End::Plus, 16, 1e-6),
            Err(SymbolError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn compactness_examples() {
        assert!(matches!(compactness_decay(&OpExpr::Identity, 16, &[0.0]), Err(SymbolError::PreconditionFailed(_))));
        let bc = ExtendedFunction::b().mul(ExtendedFunction::c());
        let e = OpExpr::Prod(vec![OpExpr::mult_periodic(crate::funcat::PeriodicFunction::e(1)), OpExpr::FMult(bc.clone())]);
        let r = compactness_decay(&e, 256, &phi_grid(4)).unwrap();
        assert!(r.max_tail_at(128) < 0.1);
        let r = compactness_decay(&OpExpr::FMult(bc), 64, &phi_grid(4)).unwrap();
        for s in &r.samples {
            assert!(s.tail.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
        }
    }
}
