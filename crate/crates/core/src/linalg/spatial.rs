//! Spatial partial isometries of weighted `ℓ^p` spaces in Lamperti normal
//! form: `(sξ)(y) = g(y) ξ(φ⁻¹(y))` for `y ∈ F`, zero off `F`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

use super::{LpOperator, Matrix, WeightedLpSpace};

/// Entries below this modulus are treated as zero when reading a matrix.
pub const SPARSITY_THRESHOLD: f64 = 1e-12;

/// Relative tolerance of the isometry condition `|g(y)|^p λ_cod(y) = λ_dom(φ⁻¹ y)`.
pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SpatialPartialIsometry<T> {
    dom: WeightedLpSpace<T>,
    cod: WeightedLpSpace<T>,
    /// `x ↦ (φ(x), g(φ(x)))` for `x ∈ E`.
    map: BTreeMap<usize, (usize, C<T>)>,
    /// False at `p = 2`, where the decomposition of a matrix is not the
    /// only spatial structure it admits.
    unique: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpatialEntry {
    pub from: usize,
    pub to: usize,
    pub weight: [f64; 2],
}

impl<T: Real> SpatialPartialIsometry<T> {
    /// Builds from triples `(x, φ(x), g(φ(x)))`, checking that `φ` is a
    /// partial bijection and the isometry condition.
    pub fn new(
        dom: WeightedLpSpace<T>,
        cod: WeightedLpSpace<T>,
        entries: impl IntoIterator<Item = (usize, usize, C<T>)>,
    ) -> Result<Self> {
        if dom.p() != cod.p() {
            return Err(Error::ExponentMismatch(dom.p().as_f64(), cod.p().as_f64()));
        }
        let mut map = BTreeMap::new();
        let mut seen = vec![false; cod.dim()];
        for (x, y, g) in entries {
            if x >= dom.dim() || y >= cod.dim() {
                return Err(Error::ShapeMismatch(format!("entry ({x} -> {y}) outside the spaces")));
            }
            if map.insert(x, (y, g)).is_some() || std::mem::replace(&mut seen[y], true) {
                return Err(Error::NotSpatial(format!("index map is not injective at {x} -> {y}")));
            }
            let lhs = g.norm().powf(dom.p()) * cod.weight(y);
            let rhs = dom.weight(x);
            if !((lhs - rhs).abs() <= T::lit(ISOMETRY_TOL) * rhs) {
                return Err(Error::NotAnIsometryOnSupport(format!(
                    "|g|^p λ_cod = {lhs} but λ_dom = {rhs} at {x} -> {y}"
                )));
            }
        }
        let unique = dom.p() != T::lit(2.0);
        Ok(Self { dom, cod, map, unique })
    }

    /// Weighted permutation with weights chosen to make it isometric and
    /// the given unit phases.
    pub fn from_permutation(
        dom: WeightedLpSpace<T>,
        cod: WeightedLpSpace<T>,
        pairs: impl IntoIterator<Item = (usize, usize, C<T>)>,
    ) -> Result<Self> {
        let p = dom.p();
        let entries: Vec<_> = pairs
            .into_iter()
            .map(|(x, y, phase)| {
                let modulus = (dom.weight(x) / cod.weight(y)).powf(T::one() / p);
                (x, y, phase * modulus)
            })
            .collect();
        Self::new(dom, cod, entries)
    }

    /// The hermitian idempotent onto the coordinates `support`.
    pub fn projection(space: WeightedLpSpace<T>, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let one = C::new(T::one(), T::zero());
        Self::new(space.clone(), space, support.into_iter().map(|x| (x, x, one)))
    }

    pub fn dom(&self) -> &WeightedLpSpace<T> {
        &self.dom
    }

    pub fn cod(&self) -> &WeightedLpSpace<T> {
        &self.cod
    }

    /// `E`.
    pub fn domain_support(&self) -> Vec<usize> {
        self.map.keys().copied().collect()
    }

    /// `F`.
    pub fn range_support(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self.map.values().map(|&(y, _)| y).collect();
        f.sort_unstable();
        f
    }

    pub fn phi(&self, x: usize) -> Option<usize> {
        self.map.get(&x).map(|&(y, _)| y)
    }

    /// `g(y)` for `y ∈ F`.
    pub fn weight(&self, y: usize) -> Option<C<T>> {
        self.map.values().find(|&&(z, _)| z == y).map(|&(_, g)| g)
    }

    /// Triples `(x, φ(x), g(φ(x)))` in increasing `x`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C<T>)> + '_ {
        self.map.iter().map(|(&x, &(y, g))| (x, y, g))
    }

    pub fn is_unique(&self) -> bool {
        self.unique
    }

    pub fn is_zero(&self) -> bool {
        self.map.is_empty()
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.cod.dim(), self.dom.dim());
        for (x, y, g) in self.entries() {
            m[(y, x)] = g;
        }
        m
    }

    pub fn to_operator(&self) -> LpOperator<T> {
        LpOperator::new(self.to_matrix(), self.dom.clone(), self.cod.clone()).expect("shape by construction")
    }

    pub fn describe(&self) -> Vec<SpatialEntry> {
        self.entries().map(|(x, y, g)| SpatialEntry { from: x, to: y, weight: [g.re.as_f64(), g.im.as_f64()] }).collect()
    }
}

/// Reads `(E, F, φ, g)` off the sparsity pattern of `op` and checks the
/// isometry condition. With `require_p_not_2`, `p = 2` is rejected.
pub fn lamperti_decompose<T: Real>(op: &LpOperator<T>, require_p_not_2: bool) -> Result<SpatialPartialIsometry<T>> {
    let p = op.dom().p();
    if p != op.cod().p() {
        return Err(Error::ExponentMismatch(p.as_f64(), op.cod().p().as_f64()));
    }
    if require_p_not_2 && p == T::lit(2.0) {
        return Err(Error::InvalidExponent(2.0));
    }
    let m = op.matrix();
    let eps = T::lit(SPARSITY_THRESHOLD);
    let mut row_hit: Vec<Option<usize>> = vec![None; m.rows()];
    let mut entries = Vec::new();
    for j in 0..m.cols() {
        let nz: Vec<usize> = (0..m.rows()).filter(|&i| m[(i, j)].norm() > eps).collect();
        match nz.as_slice() {
            [] => {}
            [i] => {
                if let Some(j0) = row_hit[*i].replace(j) {
                    return Err(Error::NotSpatial(format!("row {i} has entries in columns {j0} and {j}")));
                }
                entries.push((j, *i, m[(*i, j)]));
            }
            _ => return Err(Error::NotSpatial(format!("column {j} has {} entries", nz.len()))),
        }
    }
    SpatialPartialIsometry::new(op.dom().clone(), op.cod().clone(), entries)
}

/// The reverse `t` of `s`: `t s` and `s t` are the hermitian idempotents
/// onto `E` and `F`. On weighted spaces its weight is `1 / (g ∘ φ)`.
pub fn spatial_reverse<T: Real>(s: &SpatialPartialIsometry<T>) -> SpatialPartialIsometry<T> {
    let one = C::new(T::one(), T::zero());
    let map = s.entries().map(|(x, y, g)| (y, (x, one / g))).collect();
    SpatialPartialIsometry { dom: s.cod.clone(), cod: s.dom.clone(), map, unique: s.unique }
}

/// `s ∘ t`.
pub fn spatial_compose<T: Real>(s: &SpatialPartialIsometry<T>, t: &SpatialPartialIsometry<T>) -> Result<SpatialPartialIsometry<T>> {
    if !s.dom.same_as(&t.cod, T::lit(1e-12)) {
        return Err(Error::SpaceMismatch("codomain of t is not the domain of s".into()));
    }
    let map = t
        .entries()
        .filter_map(|(x, y, gt)| s.map.get(&y).map(|&(z, gs)| (x, (z, gs * gt))))
        .collect();
    Ok(SpatialPartialIsometry { dom: t.dom.clone(), cod: s.cod.clone(), map, unique: s.unique && t.unique })
}
