//! Dense linear-algebra helpers shared by the symbol and oracle modules.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::SymbolError;

/// Matrix `A` with `A[j, k] = a(j - k)` for `j, k` in `0..n`, applied through
/// circulant embedding and FFT.
pub struct Toeplitz {
    n: usize,
    len: usize,
    symbol_fft: Vec<C64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Toeplitz {
    /// `a` is indexed by `d + (n - 1)` for `d = j - k` in `-(n-1)..=(n-1)`.
    pub fn new(n: usize, a: &[C64]) -> Self {
        assert_eq!(a.len(), 2 * n - 1);
        let len = (2 * n - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let mut col = vec![C64::new(0.0, 0.0); len];
        for (i, v) in a.iter().enumerate() {
            let d = i as i64 - (n as i64 - 1);
            col[d.rem_euclid(len as i64) as usize] = *v;
        }
        fwd.process(&mut col);
        Toeplitz { n, len, symbol_fft: col, fwd, inv }
    }

    /// `A * X`.
    pub fn mul(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        assert_eq!(x.nrows(), self.n);
        let mut out = DMatrix::zeros(self.n, x.ncols());
        let mut buf = vec![C64::new(0.0, 0.0); self.len];
        let scale = 1.0 / self.len as f64;
        for c in 0..x.ncols() {
            buf.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            for r in 0..self.n {
                buf[r] = x[(r, c)];
            }
            self.fwd.process(&mut buf);
            for (b, s) in buf.iter_mut().zip(&self.symbol_fft) {
                *b *= s;
            }
            self.inv.process(&mut buf);
            for r in 0..self.n {
                out[(r, c)] = buf[r] * scale;
            }
        }
        out
    }
}

/// Smallest singular value.
pub fn smallest_singular_value(m: &DMatrix<C64>) -> f64 {
    if m.ncols() == 0 || m.nrows() == 0 {
        return f64::INFINITY;
    }
    let s = m.clone().svd(false, false).singular_values;
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    s.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Counts of near-null directions whose mass lies in a central window.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LocalizedCount {
    pub near_null: usize,
    pub kernel_mass: f64,
    pub cokernel_mass: f64,
    pub kernel: i64,
    pub cokernel: i64,
}

impl LocalizedCount {
    pub fn index(&self) -> i64 {
        self.kernel - self.cokernel
    }
}

fn round_mass(mass: f64) -> Result<i64, SymbolError> {
    let r = mass.round();
    if (mass - r).abs() > 0.25 {
        return Err(SymbolError::UnresolvedNullSpace { mass });
    }
    Ok(r as i64)
}

/// Index of a square truncation read from its near-null singular vectors.
///
/// A square truncation always has as many small singular values on the
/// kernel side as on the cokernel side; the ones produced by cutting the
/// operator off at the window edge sit at the edge. Each near-null subspace
/// is weighted by `weight`, a nonnegative function of the row index that is
/// 1 in the central region and 0 near the edges, and the traces are rounded.
pub fn localized_null_count(m: &DMatrix<C64>, tau: f64, weight: &[f64]) -> Result<LocalizedCount, SymbolError> {
    assert_eq!(m.nrows(), m.ncols());
    assert_eq!(weight.len(), m.nrows());
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u");
    let vt = svd.v_t.as_ref().expect("v_t");
    let mut kernel_mass = 0.0;
    let mut cokernel_mass = 0.0;
    let mut near_null = 0;
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < tau {
            near_null += 1;
            for (r, w) in weight.iter().enumerate() {
                kernel_mass += w * vt[(i, r)].norm_sqr();
                cokernel_mass += w * u[(r, i)].norm_sqr();
            }
        }
    }
    Ok(LocalizedCount {
        near_null,
        kernel_mass,
        cokernel_mass,
        kernel: round_mass(kernel_mass)?,
        cokernel: round_mass(cokernel_mass)?,
    })
}

/// Indicator weight of the central `|j| <= r` window on `[-n, n]`.
pub fn central_weight(n: usize, r: usize) -> Vec<f64> {
    (0..2 * n + 1).map(|i| if (i as i64 - n as i64).unsigned_abs() as usize <= r { 1.0 } else { 0.0 }).collect()
}

/// Operator norm (largest singular value).
pub fn operator_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Central `(2r+1) x (2r+1)` block of a matrix indexed by `[-n, n]`.
pub fn central_block(m: &DMatrix<C64>, r: usize) -> DMatrix<C64> {
    let n = (m.nrows() - 1) / 2;
    let start = n - r.min(n);
    let len = 2 * r.min(n) + 1;
    m.view((start, start), (len, len)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toeplitz_matches_dense() {
        let n = 7;
        let a: Vec<C64> = (0..2 * n - 1).map(|i| C64::new(i as f64 * 0.3 - 1.0, (i * i) as f64 * 0.01)).collect();
        let dense = DMatrix::from_fn(n, n, |j, k| a[j + n - 1 - k]);
        let x = DMatrix::from_fn(n, 3, |r, c| C64::new((r + 2 * c) as f64, -(r as f64)));
        let diff = (&dense * &x) - Toeplitz::new(n, &a).mul(&x);
        assert!(diff.norm() < 1e-12 * (dense.norm() * x.norm()));
    }

    #[test]
    fn truncated_shift_has_edge_null_vectors() {
        // Truncated shift: kernel at the right edge, cokernel at the left edge.
        let n = 20;
        let m = DMatrix::from_fn(2 * n + 1, 2 * n + 1, |j, k| if k == j + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let c = localized_null_count(&m, 1e-6, &central_weight(n, n / 2)).unwrap();
        assert_eq!(c.near_null, 1);
        assert_eq!((c.kernel, c.cokernel), (0, 0));
    }
}
