//! Measures on the objects of a finite groupoid, the induced arrow
//! measures `ν`, `ν⁻¹`, and the modular cocycle `D = dν/dν⁻¹`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid, ObjectId, Slice};
use crate::scalar::Real;

/// Object weights below this are treated as zero.
pub const SUPPORT_TOL: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectMeasure<T> {
    weights: Vec<T>,
}

impl<T: Real> ObjectMeasure<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w >= T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidParams(format!("measure weights must be finite and nonnegative, got {w}")));
        }
        Ok(Self { weights })
    }

    /// Normalized counting measure on all objects.
    pub fn uniform(g: &FiniteGroupoid) -> Self {
        let n = g.num_objects();
        Self { weights: vec![T::one() / T::from_usize_lossy(n); n] }
    }

    pub fn point_mass(g: &FiniteGroupoid, x: ObjectId) -> Self {
        let mut weights = vec![T::zero(); g.num_objects()];
        weights[x.0] = T::one();
        Self { weights }
    }

    /// Sparse form keyed by object label; missing objects get weight 0.
    pub fn from_labels(g: &FiniteGroupoid, weights: &BTreeMap<String, T>) -> Result<Self> {
        let mut w = vec![T::zero(); g.num_objects()];
        for (label, &v) in weights {
            w[g.find_object(label)?.0] = v;
        }
        Self::new(w)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, x: ObjectId) -> T {
        self.weights[x.0]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn total(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total() - T::one()).abs() <= T::lit(1e-12)
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.total();
        if !(t > T::zero()) {
            return Err(Error::InvalidParams("cannot normalize the zero measure".into()));
        }
        Ok(Self { weights: self.weights.iter().map(|&w| w / t).collect() })
    }

    pub fn in_support(&self, x: ObjectId) -> bool {
        self.weights[x.0] >= T::lit(SUPPORT_TOL)
    }

    pub fn support(&self) -> Vec<ObjectId> {
        (0..self.len()).map(ObjectId).filter(|&x| self.in_support(x)).collect()
    }

    /// Whether every object of positive weight for one measure has
    /// positive weight for the other.
    pub fn equivalent(&self, other: &Self) -> bool {
        self.len() == other.len() && (0..self.len()).all(|i| self.in_support(ObjectId(i)) == other.in_support(ObjectId(i)))
    }

    /// `dμ/dμ̃` on the common support.
    pub fn derivative(&self, other: &Self, x: ObjectId) -> Option<T> {
        (self.in_support(x) && other.in_support(x)).then(|| self.weight(x) / other.weight(x))
    }

    pub fn to_labels(&self, g: &FiniteGroupoid) -> BTreeMap<String, T> {
        g.objects().map(|x| (g.object_label(x).to_string(), self.weight(x))).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrowMeasure<T> {
    weights: Vec<T>,
}

impl<T: Real> ArrowMeasure<T> {
    pub fn weight(&self, a: ArrowId) -> T {
        self.weights[a.0]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn in_support(&self, a: ArrowId) -> bool {
        self.weights[a.0] >= T::lit(SUPPORT_TOL)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Induced<T> {
    pub nu: ArrowMeasure<T>,
    pub nu_inv: ArrowMeasure<T>,
    pub quasi_invariant: bool,
    /// An arrow in exactly one of the two supports.
    pub witness: Option<ArrowId>,
}

/// `ν({γ}) = μ(r(γ))`, `ν⁻¹({γ}) = μ(s(γ))`.
pub fn induce<T: Real>(g: &FiniteGroupoid, mu: &ObjectMeasure<T>) -> Induced<T> {
    assert_eq!(mu.len(), g.num_objects(), "measure does not match the groupoid");
    let nu = ArrowMeasure { weights: g.arrows().map(|a| mu.weight(g.rng(a))).collect() };
    let nu_inv = ArrowMeasure { weights: g.arrows().map(|a| mu.weight(g.src(a))).collect() };
    let witness = g.arrows().find(|&a| nu.in_support(a) != nu_inv.in_support(a));
    Induced { nu, nu_inv, quasi_invariant: witness.is_none(), witness }
}

/// `D = dν/dν⁻¹`, stored on `supp ν` only.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle<T> {
    values: Vec<Option<T>>,
}

impl<T: Real> Cocycle<T> {
    /// `None` outside `supp ν`.
    pub fn get(&self, a: ArrowId) -> Option<T> {
        self.values[a.0]
    }

    /// Checks `D(γρ) = D(γ)D(ρ)`, `D(unit) = 1` and `D(γ⁻¹) = D(γ)⁻¹`
    /// on the support, to relative `tol`.
    pub fn violations(&self, g: &FiniteGroupoid, tol: T) -> Vec<String> {
        let close = |a: T, b: T| (a - b).abs() <= tol * a.abs().max(b.abs()).max(T::one());
        let mut v = Vec::new();
        for (a, b, c) in g.composition_entries() {
            if let (Some(da), Some(db), Some(dc)) = (self.get(a), self.get(b), self.get(c)) {
                if !close(dc, da * db) {
                    v.push(format!("D({}) != D({}) D({})", g.arrow_label(c), g.arrow_label(a), g.arrow_label(b)));
                }
            }
        }
        for a in g.arrows() {
            if let Some(d) = self.get(a) {
                if g.is_unit(a) && !close(d, T::one()) {
                    v.push(format!("D({}) != 1", g.arrow_label(a)));
                }
                if let Some(di) = self.get(g.inverse(a)) {
                    if !close(d * di, T::one()) {
                        v.push(format!("D({}) D(inverse) != 1", g.arrow_label(a)));
                    }
                }
            }
        }
        v
    }
}

/// `D(γ) = μ(r(γ)) / μ(s(γ))` on `supp ν`.
pub fn cocycle<T: Real>(g: &FiniteGroupoid, mu: &ObjectMeasure<T>) -> Result<Cocycle<T>> {
    let ind = induce(g, mu);
    if let Some(a) = ind.witness {
        return Err(Error::NotQuasiInvariant { arrow: g.arrow_label(a).to_string() });
    }
    let values = g
        .arrows()
        .map(|a| ind.nu.in_support(a).then(|| ind.nu.weight(a) / ind.nu_inv.weight(a)))
        .collect();
    Ok(Cocycle { values })
}

/// Uniform probability measure on the orbit of `x`.
pub fn transitive_measure<T: Real>(g: &FiniteGroupoid, x: ObjectId) -> ObjectMeasure<T> {
    let orbit = g.orbit(x);
    let w = T::one() / T::from_usize_lossy(orbit.len());
    ObjectMeasure { weights: g.objects().map(|y| if orbit.contains(&y) { w } else { T::zero() }).collect() }
}

/// `(d(θ_A)_*μ / dμ)(y)` for `y ∈ r(A)`: `μ(θ_A⁻¹ y) / μ(y)`. `None` when
/// `y ∉ r(A)` or `μ(y) = 0`.
pub fn slice_derivative<T: Real>(g: &FiniteGroupoid, mu: &ObjectMeasure<T>, a: &Slice, y: ObjectId) -> Option<T> {
    let gamma = a.arrow_with_range(g, y)?;
    mu.in_support(y).then(|| mu.weight(g.src(gamma)) / mu.weight(y))
}

/// Slice criterion: `(θ_A)_*(μ|_{s(A)})` and `μ|_{r(A)}` have the same
/// null sets for every slice `A` given. Returns the first failing slice.
pub fn quasi_invariant_on_slices<T: Real>(g: &FiniteGroupoid, mu: &ObjectMeasure<T>, slices: &[Slice]) -> Option<usize> {
    slices.iter().position(|a| {
        a.arrows().any(|gamma| mu.in_support(g.src(gamma)) != mu.in_support(g.rng(gamma)))
    })
}

/// Serialized measure: `{"mu": {"object": weight}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureFile {
    pub mu: BTreeMap<String, f64>,
}

impl MeasureFile {
    pub fn to_measure<T: Real>(&self, g: &FiniteGroupoid) -> Result<ObjectMeasure<T>> {
        ObjectMeasure::from_labels(g, &self.mu.iter().map(|(k, &v)| (k.clone(), T::lit(v))).collect())
    }

    pub fn from_measure<T: Real>(g: &FiniteGroupoid, mu: &ObjectMeasure<T>) -> Self {
        Self { mu: mu.to_labels(g).into_iter().map(|(k, v)| (k, v.as_f64())).collect() }
    }
}
