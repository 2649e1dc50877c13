use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};

use super::{op_norm, LpOperator, Matrix, NormConfig, WeightedLpSpace};

/// Sample points `r` at which `‖exp(irT)‖ ≤ 1` is tested.
pub const HERMITIAN_SAMPLES: [f64; 8] = [1e-3, -1e-3, 1e-2, -1e-2, 0.1, -0.1, 1.0, -1.0];

/// The dual operator `T'` with respect to `⟨ξ, η⟩ = Σ ξ_i conj(η_i) λ_i`:
/// it maps `L^{p'}(λ_cod)` to `L^{p'}(λ_dom)` and satisfies
/// `⟨Tξ, η⟩ = ⟨ξ, T'η⟩`.
pub fn dual_operator<T: Real>(op: &LpOperator<T>) -> LpOperator<T> {
    let m = op.matrix();
    let (dom, cod) = (op.dom(), op.cod());
    let dual = Matrix::from_fn(m.cols(), m.rows(), |j, i| m[(i, j)].conj() * (cod.weight(i) / dom.weight(j)));
    LpOperator::new(dual, cod.conjugate(), dom.conjugate()).expect("shapes agree by construction")
}

/// `[f, g] = ‖g‖^{2-p} Σ f_i conj(g_i) |g_i|^{p-2} λ_i`.
pub fn semi_inner_product<T: Real>(f: &[C<T>], g: &[C<T>], space: &WeightedLpSpace<T>) -> Result<C<T>> {
    assert!(f.len() == space.dim() && g.len() == space.dim(), "vector length does not match the space");
    let ng = space.norm(g);
    if ng == T::zero() {
        return Err(Error::ZeroSecondArgument);
    }
    let p = space.p();
    let two = T::lit(2.0);
    let s = f.iter().zip(g).zip(space.weights()).fold(czero(), |acc, ((&a, &b), &w)| {
        let r = b.norm();
        if r == T::zero() {
            acc
        } else {
            acc + a * b.conj() * (r.powf(p - two) * w)
        }
    });
    Ok(s * ng.powf(two - p))
}

/// Matrix exponential by scaling and squaring of the order-12 Taylor
/// series, with the scaled matrix of norm below 1/2.
pub fn expm<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    assert!(a.is_square(), "expm of a non-square matrix");
    let norm = a.norm_one().max(a.norm_inf());
    let half = T::lit(0.5);
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm * scale >= half {
        scale = scale * half;
        squarings += 1;
    }
    let b = a.scale_real(scale);
    let n = a.rows();
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..=12 {
        term = (&term * &b).scale_real(T::one() / T::from_usize_lossy(k));
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Whether `T` is hermitian on its (single) space: `‖exp(irT)‖ ≤ 1 + tol`
/// for every sampled `r`. Real diagonal matrices are accepted directly.
pub fn is_hermitian<T: Real>(op: &LpOperator<T>, tol: T, cfg: &NormConfig) -> Result<bool> {
    if op.dom() != op.cod() {
        return Err(Error::SpaceMismatch("hermitian operators act on one space".into()));
    }
    let m = op.matrix();
    if m.is_diagonal(T::zero()) && (0..m.rows()).all(|i| m[(i, i)].im == T::zero()) {
        return Ok(true);
    }
    for r in HERMITIAN_SAMPLES {
        let e = expm(&m.scale(C::new(T::zero(), T::lit(r))));
        let est = op_norm(&LpOperator::on(e, op.dom().clone())?, cfg)?;
        if est.value > T::one() + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `m` is an idempotent with diagonal `0/1` matrix, to `tol`.
pub fn is_diagonal_projection<T: Real>(m: &Matrix<T>, tol: T) -> bool {
    m.is_square()
        && m.is_diagonal(tol)
        && (0..m.rows()).all(|i| {
            let d = m[(i, i)];
            d.norm() <= tol || (d - C::new(T::one(), T::zero())).norm() <= tol
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn exp_of_diagonal_and_nilpotent() {
        let d = Matrix::diagonal(&[c(1.0, 0.0), c(0.0, 2.0)]);
        let e = expm(&d);
        assert!((e[(0, 0)] - c(1f64.exp(), 0.0)).norm() < 1e-13);
        assert!((e[(1, 1)] - c(2f64.cos(), 2f64.sin())).norm() < 1e-13);
        let n = Matrix::from_real_rows(&[&[0.0, 3.0], &[0.0, 0.0]]);
        let e = expm(&n);
        assert!(e.approx_eq(&Matrix::from_real_rows(&[&[1.0, 3.0], &[0.0, 1.0]]), 1e-13));
    }

    #[test]
    fn semi_inner_product_hand_value() {
        let s = WeightedLpSpace::unweighted(2, 3.0).unwrap();
        let v = semi_inner_product(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)], &s).unwrap();
        assert!((v - c(2f64.powf(-1.0 / 3.0), 0.0)).norm() < 1e-14);
        assert_eq!(semi_inner_product(&[c(1.0, 0.0)], &[c(0.0, 0.0)], &WeightedLpSpace::unweighted(1, 3.0).unwrap()), Err(Error::ZeroSecondArgument));
    }

    #[test]
    fn hermitian_examples() {
        let cfg = NormConfig::default();
        for p in [1.5, 2.0, 3.0] {
            let d = LpOperator::unweighted(Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]), p).unwrap();
            assert!(is_hermitian(&d, 1e-9, &cfg).unwrap());
            let i = LpOperator::unweighted(Matrix::<f64>::identity(2).scale(c(0.0, 1.0)), p).unwrap();
            assert!(!is_hermitian(&i, 1e-9, &cfg).unwrap());
        }
        let swap = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(!is_hermitian(&LpOperator::unweighted(swap.clone(), 3.0).unwrap(), 1e-9, &cfg).unwrap());
        assert!(is_hermitian(&LpOperator::unweighted(swap, 2.0).unwrap(), 1e-9, &cfg).unwrap());
    }

    #[test]
    fn dual_of_diagonal_and_involution() {
        let op = LpOperator::unweighted(Matrix::diagonal(&[c(1.0, 2.0), c(0.0, -1.0)]), 3.0).unwrap();
        let d = dual_operator(&op);
        assert_eq!(d.matrix(), &Matrix::diagonal(&[c(1.0, -2.0), c(0.0, 1.0)]));
        assert!((d.dom().p() - 1.5).abs() < 1e-15);
        let dd = dual_operator(&d);
        assert!(dd.matrix().approx_eq(op.matrix(), 1e-15));
    }
}
