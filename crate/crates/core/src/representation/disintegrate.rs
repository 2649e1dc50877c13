use std::collections::BTreeMap;

use crate::convolution::AlgebraElement;
use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, ObjectId, SliceSemigroup};
use crate::linalg::{Matrix, WeightedLpSpace};
use crate::measure::ObjectMeasure;
use crate::scalar::Real;
use crate::semigroup::{is_tight_spatial, SpatialSemigroupRep};

use super::{integrate, BundleRepresentation};

pub const DEFAULT_DISINTEGRATION_TOL: f64 = 1e-8;

/// Largest idempotent semilattice checked for tightness.
const TIGHTNESS_CAP: usize = 64;

#[derive(Clone, Debug)]
pub struct DisintegrationResult<T> {
    /// `q(z)` for every coordinate `z` of the underlying space.
    pub q: Vec<ObjectId>,
    /// `q_* λ`.
    pub mu: ObjectMeasure<T>,
    /// Support of `ρ(U)` for every idempotent slice `U`, by semigroup index.
    pub phi: BTreeMap<usize, Vec<usize>>,
    pub rep: BundleRepresentation<T>,
    /// `max_A |π_T(χ_A) - ρ(A)|` entrywise, after reordering coordinates.
    pub residual: T,
}

/// Recovers the bundle representation `(μ, T)` whose integrated form
/// restricts to `ρ` on the slices of `sigma`.
pub fn disintegrate<T: Real>(
    rho: &SpatialSemigroupRep<T>,
    sigma: &SliceSemigroup,
    tol: T,
) -> Result<DisintegrationResult<T>> {
    let g = sigma.groupoid();
    if rho.semigroup().len() != sigma.len() {
        return Err(Error::ShapeMismatch(format!("{} images for {} slices", rho.semigroup().len(), sigma.len())));
    }
    let report = is_tight_spatial(rho, TIGHTNESS_CAP)?;
    if !report.tight {
        let detail = report
            .counterexample
            .map(|c| format!("X={:?} Y={:?} Z={:?} misses coordinate {}", c.x, c.y, c.z, c.missed_point))
            .unwrap_or_default();
        return Err(Error::NotTight(detail));
    }

    let space = rho.space();
    let n = space.dim();
    let half = T::lit(0.5);
    let phi: BTreeMap<usize, Vec<usize>> = sigma
        .idempotents()
        .into_iter()
        .map(|u| (u, (0..n).filter(|&z| rho.image(u)[(z, z)].re > half).collect()))
        .collect();

    let mut q = Vec::with_capacity(n);
    for z in 0..n {
        let candidates: Vec<ObjectId> = g
            .objects()
            .filter(|&x| {
                phi.iter().all(|(&u, sup)| sigma.slice(u).contains(g.unit(x)) == sup.binary_search(&z).is_ok())
            })
            .collect();
        match candidates.as_slice() {
            [x] => q.push(*x),
            [] => return Err(Error::FibrationFailure { index: z, reason: "no object matches its idempotent supports".into() }),
            _ => {
                return Err(Error::FibrationFailure {
                    index: z,
                    reason: format!("idempotents do not separate {} objects", candidates.len()),
                })
            }
        }
    }

    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); g.num_objects()];
    for (z, x) in q.iter().enumerate() {
        blocks[x.0].push(z);
    }
    let mut weights = vec![T::zero(); g.num_objects()];
    for z in 0..n {
        weights[q[z].0] += space.weight(z);
    }
    let mu = ObjectMeasure::new(weights)?;
    let p = space.p();
    let fibers = g
        .objects()
        .map(|x| WeightedLpSpace::new(blocks[x.0].iter().map(|&z| space.weight(z) / mu.weight(x)).collect(), p))
        .collect::<Result<Vec<_>>>()?;

    let exp = T::one() / p;
    let mut t: Vec<Option<Matrix<T>>> = vec![None; g.num_arrows()];
    for (k, slice) in sigma.slices().iter().enumerate() {
        let image = rho.image(k);
        for gamma in slice.arrows() {
            let (x, y) = (g.rng(gamma), g.src(gamma));
            if !(mu.in_support(x) && mu.in_support(y)) {
                continue;
            }
            let d = mu.weight(x) / mu.weight(y);
            let block = image.select(&blocks[x.0], &blocks[y.0]).scale_real(d.powf(exp));
            match &t[gamma.0] {
                Some(prev) => {
                    let diff = prev.max_abs_diff(&block);
                    if diff > tol {
                        return Err(Error::InconsistentSlices { arrow: g.arrow_label(gamma).to_string(), difference: diff.as_f64() });
                    }
                }
                None => t[gamma.0] = Some(block),
            }
        }
    }
    let t = g
        .arrows()
        .map(|a: ArrowId| match t[a.0].take() {
            Some(m) => Ok(m),
            None if mu.in_support(g.src(a)) && mu.in_support(g.rng(a)) => Err(Error::InvalidParams(format!(
                "arrow {} lies in no slice of the semigroup",
                g.arrow_label(a)
            ))),
            None => Ok(Matrix::zeros(blocks[g.rng(a).0].len(), blocks[g.src(a).0].len())),
        })
        .collect::<Result<Vec<_>>>()?;
    let rep = BundleRepresentation::new(g.clone(), mu.clone(), p, fibers, t)?;

    let order: Vec<usize> = mu.support().into_iter().flat_map(|x| blocks[x.0].iter().copied()).collect();
    let mut residual = T::zero();
    for (k, slice) in sigma.slices().iter().enumerate() {
        let pi = integrate(&rep, &AlgebraElement::chi(g, slice))?;
        let target = rho.image(k).select(&order, &order);
        residual = residual.max(pi.operator.matrix().max_abs_diff(&target));
    }
    Ok(DisintegrationResult { q, mu, phi, rep, residual })
}
