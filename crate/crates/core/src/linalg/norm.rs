//! p-operator norm estimation.
//!
//! The operator is first transported to unweighted `ℓ^p` by
//! `Ã = Λ_cod^{1/p} T Λ_dom^{-1/p}`. For `p = 2` the norm is the largest
//! singular value of `Ã`, computed exactly. For other `p` the norm is
//! maximized by Boyd's power method from many starts; every returned value
//! is attained by the returned witness, so it is always a lower bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{conjugate_exponent, czero, Real, C};

use super::{LpOperator, Matrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormConfig {
    /// Random starts, in addition to the constant vector and the basis vectors.
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for NormConfig {
    fn default() -> Self {
        Self { restarts: 32, tol: 1e-10, max_iter: 10_000, seed: 0 }
    }
}

impl NormConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormEstimate<T> {
    pub value: T,
    /// Unit vector of the domain attaining `value`.
    pub witness: Vec<C<T>>,
    pub converged: bool,
    /// Number of starts run.
    pub restarts: usize,
}

/// Estimates `‖T‖_{p→p}`. Exact for `p = 2`.
pub fn op_norm<T: Real>(op: &LpOperator<T>, cfg: &NormConfig) -> Result<NormEstimate<T>> {
    op_norm_with_start(op, cfg, None)
}

/// As [`op_norm`], with one extra start vector (in the coordinates of the
/// domain) tried after the default ones. Used to warm-start a sequence of
/// related problems.
pub fn op_norm_with_start<T: Real>(op: &LpOperator<T>, cfg: &NormConfig, start: Option<&[C<T>]>) -> Result<NormEstimate<T>> {
    let (p, q) = (op.dom().p(), op.cod().p());
    if p != q {
        return Err(Error::ExponentMismatch(p.as_f64(), q.as_f64()));
    }
    let n = op.dom().dim();
    if n == 0 || op.cod().dim() == 0 {
        let witness = (0..n).map(|i| if i == 0 { C::new(T::one(), T::zero()) } else { czero() }).collect();
        return Ok(NormEstimate { value: T::zero(), witness, converged: true, restarts: 0 });
    }
    if let Some(s) = start {
        if s.len() != n {
            return Err(Error::ShapeMismatch(format!("start vector has length {}, domain has dimension {n}", s.len())));
        }
    }
    let inv_p = T::one() / p;
    let left: Vec<T> = op.cod().weights().iter().map(|w| w.powf(inv_p)).collect();
    let right: Vec<T> = op.dom().weights().iter().map(|w| w.powf(-inv_p)).collect();
    let a = op.matrix().scale_rows_cols(&left, &right);

    let (x, converged, restarts) = if p == T::lit(2.0) {
        (top_singular_vector(&a), true, 1)
    } else {
        // Unweighted coordinates of the extra start: multiply by λ^{1/p}.
        let extra: Option<Vec<C<T>>> = start.map(|s| s.iter().zip(&right).map(|(&v, &r)| v / r).collect());
        power_method(&a, p, cfg, extra)
    };
    let mut witness: Vec<C<T>> = x.iter().zip(&right).map(|(&v, &r)| v * r).collect();
    let norm = op.dom().norm(&witness);
    if norm > T::zero() {
        witness.iter_mut().for_each(|v| *v = *v / norm);
    }
    let value = op.ratio(&witness);
    Ok(NormEstimate { value, witness, converged, restarts })
}

/// `‖T‖_{1→1}` on the weighted spaces (testing only).
pub fn op_norm_1<T: Real>(op: &LpOperator<T>) -> T {
    let m = op.matrix();
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)].norm() * op.cod().weight(i)).sum::<T>() / op.dom().weight(j))
        .fold(T::zero(), T::max)
}

/// `‖T‖_{∞→∞}`; weights do not matter (testing only).
pub fn op_norm_inf<T: Real>(op: &LpOperator<T>) -> T {
    op.matrix().norm_inf()
}

fn lp_norm<T: Real>(v: &[C<T>], p: T) -> T {
    v.iter().map(|z| z.norm().powf(p)).sum::<T>().powf(T::one() / p)
}

/// Duality map of unweighted `ℓ^p`: the unit vector `J` of `ℓ^{p'}` with
/// `Σ y_i conj(J_i) = ‖y‖_p`. `None` for `y = 0`.
fn duality<T: Real>(y: &[C<T>], p: T) -> Option<Vec<C<T>>> {
    let n = lp_norm(y, p);
    if !(n > T::zero()) || !n.is_finite() {
        return None;
    }
    Some(
        y.iter()
            .map(|&z| {
                let r = z.norm();
                if r == T::zero() {
                    czero()
                } else {
                    z * ((r / n).powf(p - T::lit(2.0)) / n)
                }
            })
            .collect(),
    )
}

fn start_vector<T: Real>(k: usize, n: usize, seed: u64) -> Vec<C<T>> {
    let one = C::new(T::one(), T::zero());
    match k {
        0 => vec![one; n],
        k if k <= n => (0..n).map(|i| if i + 1 == k { one } else { czero() }).collect(),
        k => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            (0..n).map(|_| C::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))).collect()
        }
    }
}

/// Compressed sparse rows; the power method only needs products.
struct Csr<T> {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C<T>>,
}

impl<T: Real> Csr<T> {
    fn new(m: &Matrix<T>) -> Self {
        let mut offsets = vec![0];
        let (mut cols, mut vals) = (Vec::new(), Vec::new());
        for i in 0..m.rows() {
            for (j, &z) in m.row(i).iter().enumerate() {
                if z != czero() {
                    cols.push(j);
                    vals.push(z);
                }
            }
            offsets.push(cols.len());
        }
        Self { offsets, cols, vals }
    }

    fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        self.offsets
            .windows(2)
            .map(|w| (w[0]..w[1]).fold(czero(), |acc, k| acc + self.vals[k] * x[self.cols[k]]))
            .collect()
    }
}

/// Runs every start; returns the best unit vector, its convergence flag and
/// the number of starts.
fn power_method<T: Real>(a: &Matrix<T>, p: T, cfg: &NormConfig, extra: Option<Vec<C<T>>>) -> (Vec<C<T>>, bool, usize) {
    let n = a.cols();
    let total = 1 + n + cfg.restarts;
    let (fwd, back) = (Csr::new(a), Csr::new(&a.adjoint()));
    let q = conjugate_exponent(p);
    let mut runs: Vec<(T, Vec<C<T>>, bool)> = (0..total)
        .into_par_iter()
        .map(|k| run_start(&fwd, &back, p, q, start_vector(k, n, cfg.seed), cfg))
        .collect();
    if let Some(x0) = extra {
        runs.push(run_start(&fwd, &back, p, q, x0, cfg));
    }
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.0 > runs[best].0 {
            best = k;
        }
    }
    let count = runs.len();
    let (_, x, conv) = runs.into_iter().nth(best).expect("at least one start");
    (x, conv, count)
}

fn run_start<T: Real>(a: &Csr<T>, ah: &Csr<T>, p: T, q: T, x0: Vec<C<T>>, cfg: &NormConfig) -> (T, Vec<C<T>>, bool) {
    let nx = lp_norm(&x0, p);
    if !(nx > T::zero()) {
        return (T::zero(), x0, true);
    }
    let mut x: Vec<C<T>> = x0.iter().map(|&v| v / nx).collect();
    let mut y = a.mul_vec(&x);
    let mut value = lp_norm(&y, p);
    let tol = T::lit(cfg.tol);
    let step_tol = T::lit(cfg.tol.sqrt());
    for _ in 0..cfg.max_iter {
        let Some(jy) = duality(&y, p) else {
            return (value, x, true);
        };
        let z = ah.mul_vec(&jy);
        let Some(x_new) = duality(&z, q) else {
            return (value, x, true);
        };
        let y_new = a.mul_vec(&x_new);
        let v_new = lp_norm(&y_new, p);
        let step = x.iter().zip(&x_new).fold(T::zero(), |m, (u, v)| m.max((*u - *v).norm()));
        if v_new < value {
            // Monotone in exact arithmetic; a drop is rounding noise.
            return (value, x, true);
        }
        let done = v_new - value < tol && step < step_tol;
        x = x_new;
        y = y_new;
        value = v_new;
        if done {
            return (value, x, true);
        }
    }
    (value, x, false)
}

/// Top right singular vector of `a` (unit in `ℓ^2`), from the Hermitian
/// eigendecomposition of `a^H a` in double precision.
fn top_singular_vector<T: Real>(a: &Matrix<T>) -> Vec<C<T>> {
    let b = &a.adjoint() * a;
    let n = b.rows();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| nalgebra::Complex::new(b[(i, j)].re.as_f64(), b[(i, j)].im.as_f64()));
    let eig = m.symmetric_eigen();
    let k = eig.eigenvalues.imax();
    let v: Vec<C<T>> = (0..n).map(|i| {
        let z = eig.eigenvectors[(i, k)];
        C::new(T::lit(z.re), T::lit(z.im))
    }).collect();
    let nv = lp_norm(&v, T::lit(2.0));
    v.into_iter().map(|z| z / nv).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::WeightedLpSpace;

    fn real(rows: &[&[f64]], p: f64) -> LpOperator<f64> {
        LpOperator::unweighted(Matrix::from_real_rows(rows), p).unwrap()
    }

    #[test]
    fn identity_has_norm_one() {
        for p in [1.5, 2.0, 3.0, 7.0] {
            let est = op_norm(&real(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]], p), &NormConfig::default()).unwrap();
            assert!((est.value - 1.0).abs() < 1e-12, "p = {p}: {}", est.value);
        }
    }

    #[test]
    fn all_ones_has_norm_two() {
        for p in [1.2, 1.5, 2.0, 3.0, 10.0] {
            let est = op_norm(&real(&[&[1.0, 1.0], &[1.0, 1.0]], p), &NormConfig::default()).unwrap();
            assert!((est.value - 2.0).abs() < 1e-9, "p = {p}: {}", est.value);
        }
    }

    #[test]
    fn golden_ratio_at_p2() {
        let est = op_norm(&real(&[&[1.0, 1.0], &[0.0, 1.0]], 2.0), &NormConfig::default()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((est.value - phi).abs() < 1e-12);
        assert!(est.converged);
    }

    #[test]
    fn witness_attains_value() {
        let op: LpOperator<f64> = LpOperator::new(
            Matrix::from_real_rows(&[&[1.0, -2.0, 0.5], &[0.3, 1.0, 1.0]]),
            WeightedLpSpace::new(vec![0.5, 1.0, 2.0], 3.0).unwrap(),
            WeightedLpSpace::new(vec![3.0, 0.25], 3.0).unwrap(),
        )
        .unwrap();
        let est = op_norm(&op, &NormConfig::default()).unwrap();
        assert!((op.ratio(&est.witness) - est.value).abs() < 1e-12);
        assert!((op.dom().norm(&est.witness) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_mismatch() {
        let m: Matrix<f64> = Matrix::identity(1);
        let op = LpOperator::new(
            m,
            WeightedLpSpace::unweighted(1, 2.0).unwrap(),
            WeightedLpSpace::unweighted(1, 3.0).unwrap(),
        )
        .unwrap();
        assert_eq!(op_norm(&op, &NormConfig::default()).unwrap_err(), Error::ExponentMismatch(2.0, 3.0));
    }

    #[test]
    fn endpoint_norms() {
        let op = real(&[&[1.0, -2.0], &[3.0, 0.5]], 2.0);
        assert_eq!(op_norm_1(&op), 4.0);
        assert_eq!(op_norm_inf(&op), 3.5);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let op = real(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, -1.0], &[0.5, 0.0, 1.0]], 2.5);
        let a = op_norm(&op, &NormConfig::with_seed(7)).unwrap();
        let b = op_norm(&op, &NormConfig::with_seed(7)).unwrap();
        assert_eq!(a, b);
    }
}
