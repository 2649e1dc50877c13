//! Representations of finite groupoids on bundles of weighted `ℓ^p`
//! spaces, their integrated forms, induced representations and the
//! disintegration of spatial representations of slice semigroups.

mod disintegrate;
mod induced;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::convolution::{AlgebraElement, MatrixElement};
use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid, ObjectId};
use crate::linalg::{dual_operator, lamperti_decompose, matrix_from_json, matrix_to_json, LpOperator, Matrix, WeightedLpSpace};
use crate::measure::{cocycle, Cocycle, ObjectMeasure};
use crate::scalar::{conjugate_exponent, Real, C};

pub use disintegrate::{disintegrate, DisintegrationResult, DEFAULT_DISINTEGRATION_TOL};
pub use induced::{
    check_p_mean, ind_matrix_at, ind_matrix_measure, invariant_mean, kernel_support_check, p_mean, reduced_norm,
    regular_intertwiner, PMeanCheck, ReducedNorm,
};

/// Tolerance used by [`validate_rep`].
pub const REP_TOL: f64 = 1e-10;

/// A measure `μ` on `G⁰`, a weighted `ℓ^p` fiber over every object and an
/// invertible isometry `T_γ : fiber(s(γ)) → fiber(r(γ))` for every arrow.
#[derive(Clone, Debug)]
pub struct BundleRepresentation<T> {
    groupoid: Arc<FiniteGroupoid>,
    mu: ObjectMeasure<T>,
    p: T,
    fibers: Vec<WeightedLpSpace<T>>,
    t: Vec<Matrix<T>>,
}

impl<T: Real> BundleRepresentation<T> {
    /// Checks shapes and exponents; the homomorphism and isometry
    /// conditions are checked by [`validate_rep`].
    pub fn new(
        groupoid: Arc<FiniteGroupoid>,
        mu: ObjectMeasure<T>,
        p: T,
        fibers: Vec<WeightedLpSpace<T>>,
        t: Vec<Matrix<T>>,
    ) -> Result<Self> {
        let g = &groupoid;
        if mu.len() != g.num_objects() || fibers.len() != g.num_objects() || t.len() != g.num_arrows() {
            return Err(Error::ShapeMismatch("need one weight and fiber per object, one matrix per arrow".into()));
        }
        if let Some(f) = fibers.iter().find(|f| f.p() != p) {
            return Err(Error::ExponentMismatch(f.p().as_f64(), p.as_f64()));
        }
        for a in g.arrows() {
            let want = (fibers[g.rng(a).0].dim(), fibers[g.src(a).0].dim());
            if t[a.0].shape() != want {
                return Err(Error::ShapeMismatch(format!(
                    "T_{} is {}x{}, fibers need {}x{}",
                    g.arrow_label(a),
                    t[a.0].rows(),
                    t[a.0].cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(Self { groupoid, mu, p, fibers, t })
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn measure(&self) -> &ObjectMeasure<T> {
        &self.mu
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn fiber(&self, x: ObjectId) -> &WeightedLpSpace<T> {
        &self.fibers[x.0]
    }

    pub fn fibers(&self) -> &[WeightedLpSpace<T>] {
        &self.fibers
    }

    pub fn t(&self, a: ArrowId) -> &Matrix<T> {
        &self.t[a.0]
    }

    /// `T_γ` as an operator between its fibers.
    pub fn t_operator(&self, a: ArrowId) -> LpOperator<T> {
        let g = &self.groupoid;
        LpOperator::new(self.t[a.0].clone(), self.fibers[g.src(a).0].clone(), self.fibers[g.rng(a).0].clone())
            .expect("shape checked")
    }

    pub fn cocycle(&self) -> Result<Cocycle<T>> {
        cocycle(&self.groupoid, &self.mu)
    }

    /// Arrows with both ends in `supp μ`.
    pub fn supported_arrows(&self) -> Vec<ArrowId> {
        let g = &self.groupoid;
        g.arrows().filter(|&a| self.mu.in_support(g.src(a)) && self.mu.in_support(g.rng(a))).collect()
    }

    /// Index layout of `L^p(μ, 𝒵) = ⊕_{x ∈ supp μ} fiber(x)`.
    pub fn layout(&self) -> Result<BundleLayout<T>> {
        let objects = self.mu.support();
        let mut offsets = Vec::with_capacity(objects.len());
        let mut weights = Vec::new();
        for &x in &objects {
            offsets.push(weights.len());
            let m = self.mu.weight(x);
            weights.extend(self.fibers[x.0].weights().iter().map(|&w| m * w));
        }
        let space = WeightedLpSpace::new(weights, self.p)?;
        Ok(BundleLayout { objects, offsets, space })
    }
}

/// Block layout of the direct-sum space.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleLayout<T> {
    /// `supp μ` in increasing order.
    pub objects: Vec<ObjectId>,
    /// First coordinate of each object's block.
    pub offsets: Vec<usize>,
    /// Weights `μ(x) λ_x(i)`.
    pub space: WeightedLpSpace<T>,
}

impl<T: Real> BundleLayout<T> {
    pub fn block_of(&self, x: ObjectId) -> Option<usize> {
        self.objects.binary_search(&x).ok().map(|k| self.offsets[k])
    }
}

/// `π_T(f)` together with the layout of its space.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegratedOperator<T> {
    pub operator: LpOperator<T>,
    pub layout: BundleLayout<T>,
}

/// Checks the representation axioms on `supp μ`.
pub fn validate_rep<T: Real>(r: &BundleRepresentation<T>) -> Vec<String> {
    let g = &r.groupoid;
    let tol = T::lit(REP_TOL);
    let mut v = Vec::new();
    if let Err(e) = r.cocycle() {
        v.push(e.to_string());
        return v;
    }
    let supported = r.supported_arrows();
    for &a in &supported {
        let label = g.arrow_label(a);
        if g.is_unit(a) {
            if !r.t[a.0].approx_eq(&Matrix::identity(r.fibers[g.src(a).0].dim()), tol) {
                v.push(format!("T_{label} is not the identity"));
            }
            continue;
        }
        match lamperti_decompose(&r.t_operator(a), false) {
            Ok(s) => {
                let (ds, dr) = (r.fibers[g.src(a).0].dim(), r.fibers[g.rng(a).0].dim());
                if s.domain_support().len() != ds || s.range_support().len() != dr {
                    v.push(format!("T_{label} is not invertible"));
                }
            }
            Err(e) => v.push(format!("T_{label} is not an invertible isometry: {e}")),
        }
    }
    for (a, b, c) in g.composition_entries() {
        if !(r.mu.in_support(g.src(b)) && r.mu.in_support(g.rng(a))) {
            continue;
        }
        if !(&r.t[a.0] * &r.t[b.0]).approx_eq(&r.t[c.0], tol) {
            v.push(format!("T_{} T_{} != T_{}", g.arrow_label(a), g.arrow_label(b), g.arrow_label(c)));
        }
    }
    v.sort();
    v
}

/// `(π_T(f)ξ)_x = Σ_{γ∈xG} f(γ) D(γ)^{-1/p} T_γ ξ_{s(γ)}`.
pub fn integrate<T: Real>(r: &BundleRepresentation<T>, f: &AlgebraElement<T>) -> Result<IntegratedOperator<T>> {
    if !crate::convolution::same_groupoid(f.groupoid(), &r.groupoid) {
        return Err(Error::GroupoidMismatch);
    }
    let d = r.cocycle()?;
    let layout = r.layout()?;
    let n = layout.space.dim();
    let g = &r.groupoid;
    let mut m = Matrix::zeros(n, n);
    let exp = -T::one() / r.p;
    for a in r.supported_arrows() {
        let c = f.coeff(a);
        if c == C::new(T::zero(), T::zero()) {
            continue;
        }
        let row = layout.block_of(g.rng(a)).expect("supported");
        let col = layout.block_of(g.src(a)).expect("supported");
        let dg = d.get(a).expect("cocycle defined on the support");
        m.add_block(row, col, &r.t[a.0], c * dg.powf(exp));
    }
    let operator = LpOperator::on(m, layout.space.clone())?;
    Ok(IntegratedOperator { operator, layout })
}

/// `π_T^{(n)}([f_ij])`: the block matrix `[π_T(f_ij)]` on `L^p(μ, 𝒵)^n`.
pub fn integrate_matrix<T: Real>(r: &BundleRepresentation<T>, f: &MatrixElement<T>) -> Result<LpOperator<T>> {
    let n = f.size();
    let mut blocks = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            blocks.push(integrate(r, f.entry(i, j))?);
        }
    }
    let layout = &blocks[0].layout;
    let k = layout.space.dim();
    let mut m = Matrix::zeros(n * k, n * k);
    for i in 0..n {
        for j in 0..n {
            m.set_block(i * k, j * k, blocks[i * n + j].operator.matrix());
        }
    }
    let weights: Vec<T> = (0..n).flat_map(|_| layout.space.weights().iter().copied()).collect();
    LpOperator::on(m, WeightedLpSpace::new(weights, r.p)?)
}

/// The left regular representation: fibers `ℓ^p(xG)` and
/// `(T_γ ξ)(ρ) = ξ(γ⁻¹ρ)`.
pub fn regular_rep<T: Real>(g: &Arc<FiniteGroupoid>, mu: &ObjectMeasure<T>, p: T) -> Result<BundleRepresentation<T>> {
    cocycle(g, mu)?;
    let fibers = g
        .objects()
        .map(|x| WeightedLpSpace::unweighted(g.range_fiber(x).len(), p))
        .collect::<Result<Vec<_>>>()?;
    let pos = |x: ObjectId, a: ArrowId| g.range_fiber(x).iter().position(|&b| b == a).expect("arrow in fiber");
    let one = C::new(T::one(), T::zero());
    let t = g
        .arrows()
        .map(|gamma| {
            let (x, y) = (g.rng(gamma), g.src(gamma));
            let mut m = Matrix::zeros(g.range_fiber(x).len(), g.range_fiber(y).len());
            let inv = g.inverse(gamma);
            for (i, &rho) in g.range_fiber(x).iter().enumerate() {
                let sigma = g.composite(inv, rho).expect("γ⁻¹ρ composable");
                m[(i, pos(y, sigma))] = one;
            }
            m
        })
        .collect();
    BundleRepresentation::new(g.clone(), mu.clone(), p, fibers, t)
}

/// The dual representation on `p'`: `T'_γ = (T_{γ⁻¹})'`.
pub fn dual_rep<T: Real>(r: &BundleRepresentation<T>) -> BundleRepresentation<T> {
    let g = &r.groupoid;
    let fibers: Vec<_> = r.fibers.iter().map(WeightedLpSpace::conjugate).collect();
    let t = g.arrows().map(|a| dual_operator(&r.t_operator(g.inverse(a))).into_matrix()).collect();
    BundleRepresentation::new(g.clone(), r.mu.clone(), conjugate_exponent(r.p), fibers, t).expect("shapes preserved")
}

/// The amplified representation on `G_n`, where `amplified` is
/// `amplify(G, n)`: fiber `fiber(x)` at `(x, j)`, `T_{(i,γ,j)} = T_γ` and
/// measure `μ(x)/n`.
pub fn amplify_rep<T: Real>(r: &BundleRepresentation<T>, amplified: &Arc<FiniteGroupoid>, n: usize) -> Result<BundleRepresentation<T>> {
    let g = &r.groupoid;
    let (k, m) = (g.num_objects(), g.num_arrows());
    if amplified.num_objects() != n * k || amplified.num_arrows() != n * n * m {
        return Err(Error::ShapeMismatch("target is not the amplification of the base groupoid".into()));
    }
    let scale = T::one() / T::from_usize_lossy(n);
    let weights = (0..n * k).map(|o| r.mu.weight(ObjectId(o % k)) * scale).collect();
    let fibers = (0..n * k).map(|o| r.fibers[o % k].clone()).collect();
    let t = (0..n * n * m).map(|a| r.t[(a / n) % m].clone()).collect();
    BundleRepresentation::new(amplified.clone(), ObjectMeasure::new(weights)?, r.p, fibers, t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// First arrow where `T̃_γ v_{s(γ)} != v_{r(γ)} T_γ`.
    pub failing_arrow: Option<String>,
    /// Whether the induced `u` intertwines `π_T(δ_γ)` and `π_{T̃}(δ_γ)` for every arrow.
    pub integrated_intertwined: bool,
}

/// Checks `T̃_γ v_{s(γ)} = v_{r(γ)} T_γ` on `supp μ` and that
/// `u = ⊕_x (μ(x)/μ̃(x))^{1/p} v_x` intertwines the integrated forms.
pub fn verify_equivalence<T: Real>(
    r: &BundleRepresentation<T>,
    rt: &BundleRepresentation<T>,
    v: &[Matrix<T>],
    tol: T,
) -> Result<EquivalenceReport> {
    let g = &r.groupoid;
    if !crate::convolution::same_groupoid(g, &rt.groupoid) {
        return Err(Error::GroupoidMismatch);
    }
    if v.len() != g.num_objects() {
        return Err(Error::ShapeMismatch(format!("{} intertwiners for {} objects", v.len(), g.num_objects())));
    }
    for x in g.objects() {
        let want = (rt.fibers[x.0].dim(), r.fibers[x.0].dim());
        if v[x.0].shape() != want {
            return Err(Error::ShapeMismatch(format!("v_{} has the wrong shape", g.object_label(x))));
        }
    }
    if !r.mu.equivalent(&rt.mu) {
        return Ok(EquivalenceReport { equivalent: false, failing_arrow: None, integrated_intertwined: false });
    }
    let failing_arrow = r
        .supported_arrows()
        .into_iter()
        .find(|&a| !(&rt.t[a.0] * &v[g.src(a).0]).approx_eq(&(&v[g.rng(a).0] * &r.t[a.0]), tol))
        .map(|a| g.arrow_label(a).to_string());

    let layout = r.layout()?;
    let blocks: Vec<Matrix<T>> = layout
        .objects
        .iter()
        .map(|&x| v[x.0].scale_real((r.mu.weight(x) / rt.mu.weight(x)).powf(T::one() / r.p)))
        .collect();
    let u = Matrix::block_diagonal(&blocks);
    let mut integrated_intertwined = true;
    for a in g.arrows() {
        let f = AlgebraElement::delta(g, a);
        let lhs = integrate(rt, &f)?.operator.into_matrix();
        let rhs = integrate(r, &f)?.operator.into_matrix();
        if !(&lhs * &u).approx_eq(&(&u * &rhs), tol) {
            integrated_intertwined = false;
            break;
        }
    }
    Ok(EquivalenceReport { equivalent: failing_arrow.is_none() && integrated_intertwined, failing_arrow, integrated_intertwined })
}

/// Serialized representation:
/// `{"mu": {"x": w}, "p": 2.5, "fibers": {"x": {"weights": [...]}}, "T": {"arrow": [[[re, im], ...], ...]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleFile {
    pub mu: BTreeMap<String, f64>,
    #[serde(default)]
    pub p: Option<f64>,
    pub fibers: BTreeMap<String, FiberFile>,
    #[serde(rename = "T")]
    pub t: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberFile {
    pub weights: Vec<f64>,
}

impl BundleFile {
    /// `p` overrides the file's exponent when given.
    pub fn to_rep<T: Real>(&self, g: &Arc<FiniteGroupoid>, p: Option<f64>) -> Result<BundleRepresentation<T>> {
        let p = p.or(self.p).ok_or_else(|| Error::Format("no exponent given".into()))?;
        let p = T::lit(p);
        let mu = ObjectMeasure::from_labels(g, &self.mu.iter().map(|(k, &v)| (k.clone(), T::lit(v))).collect())?;
        let fibers = g
            .objects()
            .map(|x| {
                let w = self.fibers.get(g.object_label(x)).map(|f| f.weights.clone()).unwrap_or_default();
                WeightedLpSpace::new(w.into_iter().map(T::lit).collect(), p)
            })
            .collect::<Result<Vec<_>>>()?;
        let t = g
            .arrows()
            .map(|a| match self.t.get(g.arrow_label(a)) {
                Some(m) if !m.is_empty() => matrix_from_json(m),
                _ => Ok(Matrix::zeros(fibers[g.rng(a).0].dim(), fibers[g.src(a).0].dim())),
            })
            .collect::<Result<Vec<_>>>()?;
        BundleRepresentation::new(g.clone(), mu, p, fibers, t)
    }

    pub fn from_rep<T: Real>(r: &BundleRepresentation<T>) -> Self {
        let g = &r.groupoid;
        Self {
            mu: g.objects().map(|x| (g.object_label(x).to_string(), r.mu.weight(x).as_f64())).collect(),
            p: Some(r.p.as_f64()),
            fibers: g
                .objects()
                .map(|x| {
                    (g.object_label(x).to_string(), FiberFile { weights: r.fibers[x.0].weights().iter().map(|w| w.as_f64()).collect() })
                })
                .collect(),
            t: g.arrows().map(|a| (g.arrow_label(a).to_string(), matrix_to_json(&r.t[a.0]))).collect(),
        }
    }
}
