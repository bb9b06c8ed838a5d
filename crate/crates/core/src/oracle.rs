//! Independent numerical ground truth on L²(ℝ): expressions discretized on a
//! periodic grid through the FFT, a numerical Fredholm index from near-null
//! singular vectors, and the W-transform.
//!
//! Grid operators are matrix free. Multiplications are diagonal in `x`,
//! Fourier multipliers are diagonal in the discrete dual variable, and a
//! product costs two FFTs per Fourier factor.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand_chacha::ChaCha8Rng;
use rand::{RngCore, SeedableRng};
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::SymbolError;
use crate::gamma::{y_entry, GammaMatrix};
use crate::linalg::central_weight;
use crate::opalg::OpExpr;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// The interval `[-L, L)` sampled at `n` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub l: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(l: f64, n: usize) -> Result<Self, SymbolError> {
        if !(l > 0.0) || n < 16 || !n.is_power_of_two() {
            return Err(SymbolError::BadParameters(format!("grid needs L > 0 and n >= 16 a power of two, got L={l}, n={n}")));
        }
        Ok(GridSpec { l, n })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.dx()
    }

    /// Frequency of FFT bin `k`, symmetric ordering `[-n/2, n/2)` scaled by π/L.
    pub fn xi(&self, k: usize) -> f64 {
        let kk = if k < self.n / 2 { k as i64 } else { k as i64 - self.n as i64 };
        kk as f64 * PI / self.l
    }

    pub fn xi_max(&self) -> f64 {
        self.n as f64 / 2.0 * PI / self.l
    }

    pub fn doubled(&self) -> Self {
        GridSpec { l: 2.0 * self.l, n: 2 * self.n }
    }
}

/// A linear operator on `C^n` with a notion of where its truncation can be
/// trusted.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[C64]) -> Vec<C64>;
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64>;
    /// Part of `‖v‖²` lying in the trusted region.
    fn localized_mass(&self, v: &[C64]) -> f64;

    fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![ZERO; n];
        for k in 0..n {
            e[k] = C64::new(1.0, 0.0);
            let col = self.apply(&e);
            m.set_column(k, &DVector::from_vec(col));
            e[k] = ZERO;
        }
        m
    }
}

/// A dense matrix with a weight describing its trusted index window.
pub struct DenseOp {
    pub matrix: DMatrix<C64>,
    pub weight: Vec<f64>,
}

impl DenseOp {
    pub fn from_gamma(g: &GammaMatrix) -> Self {
        DenseOp { matrix: g.entries.clone(), weight: central_weight(g.n, g.n / 2) }
    }
}

impl LinearOperator for DenseOp {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        (&self.matrix * DVector::from_column_slice(v)).as_slice().to_vec()
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        (self.matrix.adjoint() * DVector::from_column_slice(v)).as_slice().to_vec()
    }
    fn localized_mass(&self, v: &[C64]) -> f64 {
        v.iter().zip(&self.weight).map(|(a, w)| w * a.norm_sqr()).sum()
    }
    fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.clone()
    }
}

enum Node {
    Identity,
    Scalar(C64, Box<Node>),
    /// Multiplication by samples on the `x` grid.
    Diag(Vec<C64>),
    /// Multiplication by samples on the frequency grid, FFT order.
    FDiag(Vec<C64>),
    Sum(Vec<Node>),
    Prod(Vec<Node>),
    Adjoint(Box<Node>),
}

/// Matrix-free discretization of an expression.
pub struct GridOperator {
    pub spec: GridSpec,
    root: Node,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn compile(e: &OpExpr, spec: &GridSpec) -> Node {
    match e {
        OpExpr::Identity => Node::Identity,
        OpExpr::Scalar(z, c) => Node::Scalar(*z, Box::new(compile(c, spec))),
        OpExpr::Mult(s) => Node::Diag((0..spec.n).map(|j| s.eval(spec.x(j))).collect()),
        OpExpr::FMult(b) => Node::FDiag((0..spec.n).map(|k| b.eval(spec.xi(k))).collect()),
        OpExpr::Sum(cs) => Node::Sum(cs.iter().map(|c| compile(c, spec)).collect()),
        OpExpr::Prod(cs) => Node::Prod(cs.iter().map(|c| compile(c, spec)).collect()),
        OpExpr::Adjoint(c) => Node::Adjoint(Box::new(compile(c, spec))),
    }
}

/// Grid discretization of `e`.
pub fn discretize(e: &OpExpr, spec: GridSpec) -> GridOperator {
    let mut planner = FftPlanner::new();
    GridOperator { spec, root: compile(e, &spec), fwd: planner.plan_fft_forward(spec.n), inv: planner.plan_fft_inverse(spec.n) }
}

impl GridOperator {
    fn fourier_multiply(&self, v: &[C64], sym: &[C64], conj: bool) -> Vec<C64> {
        let mut buf = v.to_vec();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.spec.n as f64;
        for (b, s) in buf.iter_mut().zip(sym) {
            *b *= if conj { s.conj() } else { *s } * scale;
        }
        self.inv.process(&mut buf);
        buf
    }

    fn eval(&self, node: &Node, v: &[C64], adj: bool) -> Vec<C64> {
        match node {
            Node::Identity => v.to_vec(),
            Node::Scalar(z, c) => {
                let z = if adj { z.conj() } else { *z };
                self.eval(c, v, adj).into_iter().map(|a| a * z).collect()
            }
            Node::Diag(d) => v.iter().zip(d).map(|(a, s)| a * if adj { s.conj() } else { *s }).collect(),
            Node::FDiag(d) => self.fourier_multiply(v, d, adj),
            Node::Sum(cs) => {
                let mut acc = vec![ZERO; v.len()];
                for c in cs {
                    for (a, b) in acc.iter_mut().zip(self.eval(c, v, adj)) {
                        *a += b;
                    }
                }
                acc
            }
            Node::Prod(cs) => {
                let mut cur = v.to_vec();
                if adj {
                    for c in cs {
                        cur = self.eval(c, &cur, true);
                    }
                } else {
                    for c in cs.iter().rev() {
                        cur = self.eval(c, &cur, false);
                    }
                }
                cur
            }
            Node::Adjoint(c) => self.eval(c, v, !adj),
        }
    }

    /// `‖P_x P_ξ v‖²` with `P_ξ` keeping `|ξ| < ξmax/2` and `P_x` keeping
    /// `|x| < L/2`.
    pub fn phase_space_mass(&self, v: &[C64]) -> f64 {
        let half = self.spec.xi_max() / 2.0;
        let sym: Vec<C64> =
            (0..self.spec.n).map(|k| if self.spec.xi(k).abs() < half { C64::new(1.0, 0.0) } else { ZERO }).collect();
        let g = self.fourier_multiply(v, &sym, false);
        (0..self.spec.n).filter(|&j| self.spec.x(j).abs() < self.spec.l / 2.0).map(|j| g[j].norm_sqr()).sum()
    }

    /// Samples of `x ↦ f(x)` on the grid.
    pub fn sample<F: Fn(f64) -> C64>(&self, f: F) -> Vec<C64> {
        (0..self.spec.n).map(|j| f(self.spec.x(j))).collect()
    }

    /// Translation by `θ`, realized as the multiplier `e^{-iθξ}`.
    pub fn translate(&self, v: &[C64], theta: f64) -> Vec<C64> {
        let sym: Vec<C64> = (0..self.spec.n).map(|k| C64::from_polar(1.0, -theta * self.spec.xi(k))).collect();
        self.fourier_multiply(v, &sym, false)
    }
}

impl LinearOperator for GridOperator {
    fn dim(&self) -> usize {
        self.spec.n
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.eval(&self.root, v, false)
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        self.eval(&self.root, v, true)
    }
    fn localized_mass(&self, v: &[C64]) -> f64 {
        self.phase_space_mass(v)
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += a * v;
    }
}

fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(v, -c, q);
        }
    }
}

/// One near-null singular direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NullVector {
    pub singular_value: f64,
    pub mass: f64,
}

/// Near-null analysis at one resolution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NullReport {
    pub dim: usize,
    pub right: Vec<NullVector>,
    pub left: Vec<NullVector>,
    /// Smallest singular value found above the threshold, if any was resolved.
    pub gap: Option<f64>,
    pub kernel: i64,
    pub cokernel: i64,
}

impl NullReport {
    pub fn index(&self) -> i64 {
        self.kernel - self.cokernel
    }
}

const LANCZOS_STEPS: usize = 60;
const LANCZOS_RESTARTS: usize = 40;
const MAX_NULL: usize = 8;

/// Smallest eigenpair of a Hermitian positive operator restricted to the
/// orthogonal complement of `locked`, by restarted Lanczos with full
/// reorthogonalization.
fn lanczos_smallest<H: Fn(&[C64]) -> Vec<C64>>(h: &H, n: usize, locked: &[Vec<C64>], rng: &mut ChaCha8Rng) -> (f64, Vec<C64>, f64) {
    let mut start: Vec<C64> = (0..n)
        .map(|_| {
            let a = rng.next_u64() as f64 / u64::MAX as f64 - 0.5;
            let b = rng.next_u64() as f64 / u64::MAX as f64 - 0.5;
            C64::new(a, b)
        })
        .collect();
    let mut best = (f64::INFINITY, start.clone(), f64::INFINITY);
    for _ in 0..LANCZOS_RESTARTS {
        orthogonalize(&mut start, locked);
        let s = norm(&start);
        if s == 0.0 {
            break;
        }
        start.iter_mut().for_each(|x| *x /= s);
        let mut q: Vec<Vec<C64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let steps = LANCZOS_STEPS.min(n - locked.len());
        for i in 0..steps {
            let mut w = h(&q[i]);
            let a = dot(&q[i], &w).re;
            alpha.push(a);
            orthogonalize(&mut w, locked);
            orthogonalize(&mut w, &q);
            let b = norm(&w);
            if i + 1 == steps || b < 1e-13 {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            q.push(w);
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let mut y = vec![ZERO; n];
        for (k, qk) in q.iter().take(m).enumerate() {
            axpy(&mut y, C64::new(eig.eigenvectors[(k, idx)], 0.0), qk);
        }
        orthogonalize(&mut y, locked);
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);
        let hy = h(&y);
        let rq = dot(&y, &hy).re;
        let mut r = hy;
        axpy(&mut r, C64::new(-rq, 0.0), &y);
        let res = norm(&r);
        if rq < best.0 {
            best = (rq, y.clone(), res);
        }
        if res < 1e-10 * (1.0 + rq.abs()) || res < 1e-9 * rq.abs().sqrt().max(1e-3) {
            return (rq, y, res);
        }
        start = y;
    }
    best
}

/// Right near-null vectors (`adjoint = false`) or left ones, with their
/// singular values, plus the smallest singular value above `tau` when it was
/// resolved.
fn near_null<O: LinearOperator>(op: &O, tau: f64, adjoint: bool) -> (Vec<(f64, Vec<C64>)>, Option<f64>) {
    let n = op.dim();
    let a = |v: &[C64]| if adjoint { op.apply_adjoint(v) } else { op.apply(v) };
    let h = |v: &[C64]| if adjoint { op.apply(&op.apply_adjoint(v)) } else { op.apply_adjoint(&op.apply(v)) };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + adjoint as u64);
    let mut found: Vec<(f64, Vec<C64>)> = Vec::new();
    let mut locked: Vec<Vec<C64>> = Vec::new();
    // Restarted Lanczos can settle on a tiny but not the tiniest eigenvalue,
    // so a miss is only trusted after CONFIRM_MISSES in a row, each deflated.
    let mut misses: Vec<f64> = Vec::new();
    while found.len() < MAX_NULL.min(n) && locked.len() < n {
        let (_, y, _) = lanczos_smallest(&h, n, &locked, &mut rng);
        let sv = norm(&a(&y));
        locked.push(y.clone());
        if sv < tau {
            found.push((sv, y));
            misses.clear();
        } else {
            misses.push(sv);
            if misses.len() == CONFIRM_MISSES {
                return (found, misses.into_iter().reduce(f64::min));
            }
        }
    }
    (found, misses.into_iter().reduce(f64::min))
}

fn dense_near_null<O: LinearOperator>(op: &O, tau: f64) -> (Vec<(f64, Vec<C64>)>, Vec<(f64, Vec<C64>)>, Option<f64>) {
    let svd = op.to_dense().svd(true, true);
    let u = svd.u.as_ref().expect("u");
    let vt = svd.v_t.as_ref().expect("v_t");
    let mut right = Vec::new();
    let mut left = Vec::new();
    let mut gap: Option<f64> = None;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < tau {
            right.push((s, vt.row(i).iter().map(|z| z.conj()).collect()));
            left.push((s, u.column(i).iter().copied().collect()));
        } else {
            gap = Some(gap.map_or(s, |g: f64| g.min(s)));
        }
    }
    (right, left, gap)
}

const CONFIRM_MISSES: usize = 2;

/// Dimension at which the index switches from a dense SVD to Lanczos.
pub const DENSE_LIMIT: usize = 1024;

fn round_mass(mass: f64) -> Result<i64, SymbolError> {
    let r = mass.round();
    if (mass - r).abs() > 0.25 {
        return Err(SymbolError::UnresolvedNullSpace { mass });
    }
    Ok(r as i64)
}

/// Near-null singular directions of `op` and the number of them that live
/// in the trusted region.
pub fn null_report<O: LinearOperator>(op: &O, tau: f64) -> Result<NullReport, SymbolError> {
    let (right, left, gap) = if op.dim() <= DENSE_LIMIT {
        dense_near_null(op, tau)
    } else {
        let (r, g1) = near_null(op, tau, false);
        let (l, g2) = near_null(op, tau, true);
        let gap = match (g1, g2) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        (r, l, gap)
    };
    let tag = |vs: Vec<(f64, Vec<C64>)>| -> Vec<NullVector> {
        vs.into_iter().map(|(s, v)| NullVector { singular_value: s, mass: op.localized_mass(&v) / norm(&v).powi(2) }).collect()
    };
    let right = tag(right);
    let left = tag(left);
    let kernel = round_mass(right.iter().map(|v| v.mass).sum())?;
    let cokernel = round_mass(left.iter().map(|v| v.mass).sum())?;
    Ok(NullReport { dim: op.dim(), right, left, gap, kernel, cokernel })
}

/// Index at two resolutions; they must agree.
pub fn numerical_index<O: LinearOperator>(first: &O, second: &O, tau: f64) -> Result<i64, SymbolError> {
    numerical_index_detailed(first, second, tau).map(|(i, _, _)| i)
}

pub fn numerical_index_detailed<O: LinearOperator>(
    first: &O,
    second: &O,
    tau: f64,
) -> Result<(i64, NullReport, NullReport), SymbolError> {
    let a = null_report(first, tau)?;
    let b = null_report(second, tau)?;
    if a.index() != b.index() {
        return Err(SymbolError::NoPlateau { first: a.index(), second: b.index() });
    }
    Ok((a.index(), a, b))
}

/// Default grids of the index oracle.
pub const INDEX_GRIDS: [(f64, usize); 2] = [(40.0 * PI, 4096), (80.0 * PI, 8192)];

/// Coarser grids for the `U±` pair: their near-kernel vectors are well
/// localized in x, and the smaller spread in ξ keeps Lanczos fast.
pub const U_INDEX_GRIDS: [(f64, usize); 2] = [(16.0 * PI, 4096), (32.0 * PI, 8192)];

/// Oracle index of an expression on the default pair of grids.
pub fn oracle_index(e: &OpExpr, grids: [(f64, usize); 2], tau: f64) -> Result<i64, SymbolError> {
    let a = discretize(e, GridSpec::new(grids[0].0, grids[0].1)?);
    let b = discretize(e, GridSpec::new(grids[1].0, grids[1].1)?);
    numerical_index(&a, &b, tau)
}

/// `ψ'(x)` for `x > 0`.
fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x + x2 / 2.0 + (x2 / x) * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 / 30.0)))
}

/// `Σ_{i>=0} 1/((i+a)(i+b))` for `a, b > 0` with `a - b` an integer.
fn pair_tail(a: f64, b: f64) -> f64 {
    let d = (a - b).round() as i64;
    if d == 0 {
        return trigamma(a);
    }
    let (lo, d) = if d > 0 { (b, d) } else { (a, -d) };
    (0..d).map(|i| 1.0 / (lo + i as f64)).sum::<f64>() / d as f64
}

/// Samples of `Wu` at the midpoints `φ_m = (m + 1/2)/M`, sequence slots
/// `-K..=K`. Row `m`, column `k + K`.
pub fn w_transform(u: &dyn Fn(f64) -> C64, m_phi: usize, k: usize) -> DMatrix<C64> {
    let ki = k as i64;
    DMatrix::from_fn(m_phi, 2 * k + 1, |m, col| {
        let phi = (m as f64 + 0.5) / m_phi as f64;
        let row = col as i64 - ki;
        (-ki..=ki).map(|j| y_entry(phi, j - row) * u(phi - j as f64)).sum()
    })
}

/// `⟨Wu, Wv⟩` by the midpoint rule in φ, with the sequence slots beyond `K`
/// summed in closed form.
pub fn w_gram(u: &dyn Fn(f64) -> C64, v: &dyn Fn(f64) -> C64, m_phi: usize, k: usize) -> C64 {
    let wu = w_transform(u, m_phi, k);
    let wv = w_transform(v, m_phi, k);
    let ki = k as i64;
    let mut total = ZERO;
    for m in 0..m_phi {
        let phi = (m as f64 + 0.5) / m_phi as f64;
        let mut s: C64 = (0..2 * k + 1).map(|c| wu[(m, c)] * wv[(m, c)].conj()).sum();
        let cphi = C64::from_polar(1.0, -2.0 * PI * phi) - 1.0;
        let pref = cphi.norm_sqr() / (4.0 * PI * PI);
        let us: Vec<C64> = (-ki..=ki).map(|j| u(phi - j as f64)).collect();
        let vs: Vec<C64> = (-ki..=ki).map(|j| v(phi - j as f64)).collect();
        for (ia, j) in (-ki..=ki).enumerate() {
            if us[ia] == ZERO {
                continue;
            }
            for (ib, jp) in (-ki..=ki).enumerate() {
                let up = (ki + 1 - j) as f64 + phi;
                let bp = (ki + 1 - jp) as f64 + phi;
                let am = (ki + 1 + j) as f64 - phi;
                let bm = (ki + 1 + jp) as f64 - phi;
                s += us[ia] * vs[ib].conj() * pref * (pair_tail(up, bp) + pair_tail(am, bm));
            }
        }
        total += s;
    }
    total / m_phi as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcat::ExtendedFunction;
    use crate::opalg::builtins;

    #[test]
    fn grid_basics() {
        let g = GridSpec::new(PI, 16).unwrap();
        assert_eq!(g.x(0), -PI);
        assert_eq!(g.xi(1), 1.0);
        assert_eq!(g.xi(8), -8.0);
        assert!(GridSpec::new(1.0, 24).is_err());
        let id = discretize(&OpExpr::Identity, g).to_dense();
        assert_eq!(id, DMatrix::identity(16, 16));
        let one = discretize(&OpExpr::FMult(ExtendedFunction::real(1.0)), g).to_dense();
        assert!((one - DMatrix::<C64>::identity(16, 16)).norm() < 1e-14);
    }

    #[test]
    fn adjoint_matches_dense() {
        let g = GridSpec::new(4.0 * PI, 64).unwrap();
        let op = discretize(&builtins::a2(), g);
        let d = op.to_dense();
        let v: Vec<C64> = (0..64).map(|j| C64::new((j as f64).sin(), (j as f64 * 0.3).cos())).collect();
        let lhs = op.apply_adjoint(&v);
        let rhs = d.adjoint() * DVector::from_vec(v);
        assert!(lhs.iter().zip(rhs.iter()).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn trigamma_values() {
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-12);
        let direct: f64 = (0..200000).map(|i| 1.0 / ((i as f64 + 2.5) * (i as f64 + 4.5))).sum();
        assert!((pair_tail(2.5, 4.5) - direct).abs() < 1e-5);
    }

    #[test]
    fn small_dense_index() {
        // Truncated shift with the trusted window in the middle: no index.
        let n = 40;
        let m = DMatrix::from_fn(2 * n + 1, 2 * n + 1, |j, k| if k == j + 1 { C64::new(1.0, 0.0) } else { ZERO });
        let op = DenseOp { matrix: m, weight: central_weight(n, n / 2) };
        assert_eq!(null_report(&op, 1e-6).unwrap().index(), 0);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        // The same operator analyzed both ways.
        let g = GridSpec::new(16.0 * PI, 1024).unwrap();
        let op = discretize(&builtins::u_minus(), g);
        let dense = null_report(&op, 1e-6).unwrap();
        let (r, _) = near_null(&op, 1e-6, false);
        let (l, _) = near_null(&op, 1e-6, true);
        assert_eq!(r.len(), dense.right.len());
        assert_eq!(l.len(), dense.left.len());
    }
}
