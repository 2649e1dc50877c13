use serde::Serialize;

use crate::bitset::BitSet;
use crate::convolution::AlgebraElement;
use crate::error::{Error, Result};
use crate::groupoid::SliceSemigroup;
use crate::linalg::{
    is_diagonal_projection, lamperti_decompose, spatial_reverse, LpOperator, Matrix, SpatialPartialIsometry,
    WeightedLpSpace,
};
use crate::scalar::Real;

use super::{is_tight_semilattice, FiniteInverseSemigroup, Semilattice, SemilatticeRep};

/// A representation of a finite inverse semigroup by operators on one
/// weighted `ℓ^p` space. The operators are kept as matrices; the spatial
/// structure of each is recovered on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialSemigroupRep<T> {
    semigroup: FiniteInverseSemigroup,
    space: WeightedLpSpace<T>,
    images: Vec<Matrix<T>>,
}

impl<T: Real> SpatialSemigroupRep<T> {
    /// Checks shapes only; see [`Self::violations`].
    pub fn new(semigroup: FiniteInverseSemigroup, space: WeightedLpSpace<T>, images: Vec<Matrix<T>>) -> Result<Self> {
        if images.len() != semigroup.len() {
            return Err(Error::ShapeMismatch(format!("{} images for {} elements", images.len(), semigroup.len())));
        }
        let n = space.dim();
        if let Some(m) = images.iter().find(|m| m.shape() != (n, n)) {
            return Err(Error::ShapeMismatch(format!("image is {}x{}, space has dimension {n}", m.rows(), m.cols())));
        }
        Ok(Self { semigroup, space, images })
    }

    pub fn from_spatial(semigroup: FiniteInverseSemigroup, space: WeightedLpSpace<T>, images: &[SpatialPartialIsometry<T>]) -> Result<Self> {
        Self::new(semigroup, space, images.iter().map(SpatialPartialIsometry::to_matrix).collect())
    }

    pub fn semigroup(&self) -> &FiniteInverseSemigroup {
        &self.semigroup
    }

    pub fn space(&self) -> &WeightedLpSpace<T> {
        &self.space
    }

    pub fn image(&self, s: usize) -> &Matrix<T> {
        &self.images[s]
    }

    pub fn operator(&self, s: usize) -> LpOperator<T> {
        LpOperator::on(self.images[s].clone(), self.space.clone()).expect("shape checked")
    }

    pub fn spatial(&self, s: usize) -> Result<SpatialPartialIsometry<T>> {
        lamperti_decompose(&self.operator(s), false)
    }

    /// Checks `ρ(στ) = ρ(σ)ρ(τ)`, that every image is spatial with
    /// `ρ(σ*)` its reverse, and `ρ(0) = 0`, to `tol`.
    pub fn violations(&self, tol: T) -> Vec<String> {
        let s = &self.semigroup;
        let mut v = Vec::new();
        for a in 0..s.len() {
            for b in 0..s.len() {
                let prod = &self.images[a] * &self.images[b];
                if !prod.approx_eq(&self.images[s.mul(a, b)], tol) {
                    v.push(format!("ρ({}·{}) != ρ({})ρ({})", s.label(a), s.label(b), s.label(a), s.label(b)));
                }
            }
        }
        for a in 0..s.len() {
            match self.spatial(a) {
                Ok(sp) => {
                    if !spatial_reverse(&sp).to_matrix().approx_eq(&self.images[s.star(a)], tol) {
                        v.push(format!("ρ({}*) is not the reverse of ρ({})", s.label(a), s.label(a)));
                    }
                }
                Err(e) => v.push(format!("ρ({}) is not a spatial partial isometry: {e}", s.label(a))),
            }
        }
        if let Some(z) = s.zero() {
            if !self.images[z].is_zero(tol) {
                v.push("ρ(0) != 0".into());
            }
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightSpatialViolation {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub missed_point: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightSpatialReport {
    pub tight: bool,
    /// Always true for finite slice semigroups: every slice is compact open.
    pub regular: bool,
    pub counterexample: Option<TightSpatialViolation>,
    /// Union of the supports of the idempotent images.
    pub essential_support: Vec<usize>,
}

/// Maps `E(Σ)` into the Boolean algebra of diagonal supports and checks
/// tightness there.
pub fn is_tight_spatial<T: Real>(rho: &SpatialSemigroupRep<T>, cap: usize) -> Result<TightSpatialReport> {
    let s = rho.semigroup();
    let n = rho.space().dim();
    let idem = s.idempotents();
    let tol = T::lit(1e-9);
    let mut supports = Vec::with_capacity(idem.len());
    for &e in &idem {
        let m = rho.image(e);
        if !is_diagonal_projection(m, tol) {
            return Err(Error::NotHermitianIdempotent { element: s.label(e).to_string() });
        }
        supports.push(BitSet::from_indices(n, (0..n).filter(|&i| m[(i, i)].re > T::lit(0.5))));
    }
    let (lattice, elements) = idempotent_lattice(s, &idem)?;
    // `elements[k]` is `None` for an adjoined zero.
    let images = elements
        .iter()
        .map(|e| match e {
            Some(e) => supports[idem.iter().position(|x| x == e).expect("idempotent")].clone(),
            None => BitSet::empty(n),
        })
        .collect();
    let beta = SemilatticeRep::new(lattice, n, images)?;
    let report = is_tight_semilattice(&beta, cap)?;
    let names = |v: &[usize]| -> Vec<String> {
        v.iter().filter_map(|&k| elements[k]).map(|e| s.label(e).to_string()).collect()
    };
    let counterexample = report.counterexample.map(|cx| TightSpatialViolation {
        x: names(&cx.x),
        y: names(&cx.y),
        z: names(&cx.z),
        missed_point: cx.missed_point,
    });
    let essential = supports.iter().fold(BitSet::empty(n), |acc, b| acc.union(b));
    Ok(TightSpatialReport { tight: report.tight, regular: true, counterexample, essential_support: essential.iter().collect() })
}

/// Semilattice of idempotents; a zero is adjoined when the semigroup has none.
fn idempotent_lattice(s: &FiniteInverseSemigroup, idem: &[usize]) -> Result<(Semilattice, Vec<Option<usize>>)> {
    if s.zero().is_some() {
        let (lattice, map) = Semilattice::of_idempotents(s)?;
        return Ok((lattice, map.into_iter().map(Some).collect()));
    }
    let k = idem.len();
    let pos = |e: usize| idem.iter().position(|&x| x == e);
    let mut meet = vec![vec![k; k + 1]; k + 1];
    for (i, &a) in idem.iter().enumerate() {
        for (j, &b) in idem.iter().enumerate() {
            meet[i][j] = pos(s.mul(a, b)).ok_or_else(|| Error::InvalidParams("product of idempotents is not idempotent".into()))?;
        }
    }
    let mut labels: Vec<String> = idem.iter().map(|&e| s.label(e).to_string()).collect();
    labels.push("0".into());
    let lattice = Semilattice::new(labels, meet, k)?;
    let mut map: Vec<Option<usize>> = idem.iter().copied().map(Some).collect();
    map.push(None);
    Ok((lattice, map))
}

/// `ρ_π(A) = π(χ_A)` on the slices of `sigma`. Fails with `NotSpatial` when
/// some `π(χ_A)` is not a spatial partial isometry.
pub fn rho_from_pi<T: Real>(
    pi: impl Fn(&AlgebraElement<T>) -> Result<LpOperator<T>>,
    sigma: &SliceSemigroup,
) -> Result<SpatialSemigroupRep<T>> {
    let g = sigma.groupoid();
    let mut space: Option<WeightedLpSpace<T>> = None;
    let mut images = Vec::with_capacity(sigma.len());
    for a in sigma.slices() {
        let op = pi(&AlgebraElement::chi(g, a))?;
        if let Err(e) = lamperti_decompose(&op, false) {
            return Err(Error::NotSpatial(format!("π(χ_{}) : {e}", a.label(g))));
        }
        match &space {
            None => space = Some(op.dom().clone()),
            Some(s) if s != op.dom() || s != op.cod() => {
                return Err(Error::SpaceMismatch("π does not act on a single space".into()))
            }
            Some(_) => {}
        }
        images.push(op.into_matrix());
    }
    let space = space.ok_or_else(|| Error::InvalidParams("empty slice semigroup".into()))?;
    SpatialSemigroupRep::new(sigma.semigroup().clone(), space, images)
}
