use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{conjugate_exponent, czero, Real, C};

use super::Matrix;

/// `ℓ^p` over a finite index set with positive weights `λ`:
/// `‖ξ‖_p = (Σ |ξ_i|^p λ_i)^{1/p}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedLpSpace<T> {
    weights: Vec<T>,
    p: T,
}

impl<T: Real> WeightedLpSpace<T> {
    pub fn new(weights: Vec<T>, p: T) -> Result<Self> {
        check_exponent(p)?;
        if let Some(w) = weights.iter().find(|w| !(**w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidParams(format!("weights must be positive and finite, got {w}")));
        }
        Ok(Self { weights, p })
    }

    /// Counting measure on `n` points.
    pub fn unweighted(n: usize, p: T) -> Result<Self> {
        Self::new(vec![T::one(); n], p)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    /// The same index set and weights with the conjugate exponent.
    pub fn conjugate(&self) -> Self {
        Self { weights: self.weights.clone(), p: conjugate_exponent(self.p) }
    }

    pub fn with_exponent(&self, p: T) -> Result<Self> {
        Self::new(self.weights.clone(), p)
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == T::one())
    }

    pub fn norm(&self, xi: &[C<T>]) -> T {
        assert_eq!(xi.len(), self.dim(), "vector length does not match the space");
        let s: T = xi.iter().zip(&self.weights).map(|(x, &w)| x.norm().powf(self.p) * w).sum();
        s.powf(T::one() / self.p)
    }

    /// The pairing `⟨ξ, η⟩ = Σ ξ_i conj(η_i) λ_i`.
    pub fn pairing(&self, xi: &[C<T>], eta: &[C<T>]) -> C<T> {
        xi.iter().zip(eta).zip(&self.weights).fold(czero(), |acc, ((x, y), &w)| acc + *x * y.conj() * w)
    }

    /// Same weights (to `tol`, relative) and exponent.
    pub fn same_as(&self, other: &Self, tol: T) -> bool {
        self.p == other.p
            && self.dim() == other.dim()
            && self.weights.iter().zip(&other.weights).all(|(&a, &b)| (a - b).abs() <= tol * a.max(b))
    }

    /// Weighted direct sum: block `k` is scaled by `outer[k]`.
    pub fn direct_sum(blocks: &[Self], outer: &[T], p: T) -> Result<Self> {
        assert_eq!(blocks.len(), outer.len());
        let weights = blocks.iter().zip(outer).flat_map(|(b, &m)| b.weights.iter().map(move |&w| w * m)).collect();
        Self::new(weights, p)
    }
}

pub(crate) fn check_exponent<T: Real>(p: T) -> Result<()> {
    if p > T::one() && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p.as_f64()))
    }
}

/// A linear map between weighted `ℓ^p` spaces, stored as a dense matrix
/// of shape `cod.dim() × dom.dim()`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpOperator<T> {
    matrix: Matrix<T>,
    dom: WeightedLpSpace<T>,
    cod: WeightedLpSpace<T>,
}

impl<T: Real> LpOperator<T> {
    pub fn new(matrix: Matrix<T>, dom: WeightedLpSpace<T>, cod: WeightedLpSpace<T>) -> Result<Self> {
        if matrix.shape() != (cod.dim(), dom.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, spaces need {}x{}",
                matrix.rows(),
                matrix.cols(),
                cod.dim(),
                dom.dim()
            )));
        }
        Ok(Self { matrix, dom, cod })
    }

    /// Operator on a single space.
    pub fn on(matrix: Matrix<T>, space: WeightedLpSpace<T>) -> Result<Self> {
        Self::new(matrix, space.clone(), space)
    }

    /// Operator on unweighted `ℓ^p`.
    pub fn unweighted(matrix: Matrix<T>, p: T) -> Result<Self> {
        let dom = WeightedLpSpace::unweighted(matrix.cols(), p)?;
        let cod = WeightedLpSpace::unweighted(matrix.rows(), p)?;
        Self::new(matrix, dom, cod)
    }

    pub fn identity(space: WeightedLpSpace<T>) -> Self {
        let m = Matrix::identity(space.dim());
        Self { matrix: m, dom: space.clone(), cod: space }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn dom(&self) -> &WeightedLpSpace<T> {
        &self.dom
    }

    pub fn cod(&self) -> &WeightedLpSpace<T> {
        &self.cod
    }

    pub fn apply(&self, xi: &[C<T>]) -> Vec<C<T>> {
        self.matrix.mul_vec(xi)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !self.dom.same_as(&other.cod, T::lit(1e-12)) {
            return Err(Error::SpaceMismatch("codomain of the right factor is not the domain of the left".into()));
        }
        Ok(Self { matrix: &self.matrix * &other.matrix, dom: other.dom.clone(), cod: self.cod.clone() })
    }

    pub fn map_matrix(&self, f: impl FnOnce(&Matrix<T>) -> Matrix<T>) -> Result<Self> {
        Self::new(f(&self.matrix), self.dom.clone(), self.cod.clone())
    }

    /// `‖Tξ‖ / ‖ξ‖`.
    pub fn ratio(&self, xi: &[C<T>]) -> T {
        let d = self.dom.norm(xi);
        if d == T::zero() {
            T::zero()
        } else {
            self.cod.norm(&self.apply(xi)) / d
        }
    }
}

/// Serialized operator: `{"space": {"weights": [...], "p": 2.5}, "matrix": [[[re, im], ...], ...]}`.
/// An optional `"codomain"` space may be given for non-square operators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorFile {
    pub space: SpaceFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<SpaceFile>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceFile {
    pub weights: Vec<f64>,
    pub p: f64,
}

impl SpaceFile {
    pub fn to_space<T: Real>(&self) -> Result<WeightedLpSpace<T>> {
        WeightedLpSpace::new(self.weights.iter().map(|&w| T::lit(w)).collect(), T::lit(self.p))
    }

    pub fn from_space<T: Real>(s: &WeightedLpSpace<T>) -> Self {
        Self { weights: s.weights().iter().map(|w| w.as_f64()).collect(), p: s.p().as_f64() }
    }
}

pub fn matrix_from_json<T: Real>(rows: &[Vec<[f64; 2]>]) -> Result<Matrix<T>> {
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != c) {
        return Err(Error::Format("ragged matrix".into()));
    }
    Ok(Matrix::from_rows(
        rows.iter().map(|r| r.iter().map(|&[a, b]| C::new(T::lit(a), T::lit(b))).collect()).collect(),
    ))
}

pub fn matrix_to_json<T: Real>(m: &Matrix<T>) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()).collect()
}

impl OperatorFile {
    pub fn to_operator<T: Real>(&self) -> Result<LpOperator<T>> {
        let dom = self.space.to_space()?;
        let cod = match &self.codomain {
            Some(c) => c.to_space()?,
            None => dom.clone(),
        };
        LpOperator::new(matrix_from_json(&self.matrix)?, dom, cod)
    }

    pub fn from_operator<T: Real>(op: &LpOperator<T>) -> Self {
        let codomain = (op.cod != op.dom).then(|| SpaceFile::from_space(&op.cod));
        Self { space: SpaceFile::from_space(&op.dom), codomain, matrix: matrix_to_json(&op.matrix) }
    }
}
