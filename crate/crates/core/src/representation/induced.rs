use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::convolution::{convolve, AlgebraElement};
use crate::error::Result;
use crate::groupoid::{ArrowId, FiniteGroupoid, ObjectId};
use crate::linalg::{op_norm, LpOperator, Matrix, NormConfig, NormEstimate, WeightedLpSpace};
use crate::measure::{cocycle, ObjectMeasure};
use crate::scalar::{conjugate_exponent, Real, C};

/// Matrix of `ξ ↦ f ∗ ξ` on functions supported on `arrows`, all of which
/// share one source orbit structure: `M[ρ, σ] = f(ρσ⁻¹)` when `s(ρ) = s(σ)`.
fn convolution_matrix<T: Real>(f: &AlgebraElement<T>, arrows: &[ArrowId]) -> Matrix<T> {
    let g = f.groupoid();
    let n = arrows.len();
    let mut m = Matrix::zeros(n, n);
    for (i, &rho) in arrows.iter().enumerate() {
        for (j, &sigma) in arrows.iter().enumerate() {
            if g.src(rho) == g.src(sigma) {
                let gamma = g.composite(rho, g.inverse(sigma)).expect("same source");
                m[(i, j)] = f.coeff(gamma);
            }
        }
    }
    m
}

/// `Ind(x) f` on `ℓ^p(Gx)`, coordinates in the order of `source_fiber(x)`.
pub fn ind_matrix_at<T: Real>(f: &AlgebraElement<T>, x: ObjectId, p: T) -> Result<LpOperator<T>> {
    let arrows = f.groupoid().source_fiber(x);
    LpOperator::unweighted(convolution_matrix(f, arrows), p)
}

/// `Ind(μ) f` on `L^p(ν⁻¹)`: coordinates are the arrows with source in
/// `supp μ`, in increasing order, weighted by `μ(s(ρ))`.
pub fn ind_matrix_measure<T: Real>(f: &AlgebraElement<T>, mu: &ObjectMeasure<T>, p: T) -> Result<LpOperator<T>> {
    let g = f.groupoid();
    let arrows = ind_arrows(g, mu);
    let space = WeightedLpSpace::new(arrows.iter().map(|&a| mu.weight(g.src(a))).collect(), p)?;
    LpOperator::on(convolution_matrix(f, &arrows), space)
}

fn ind_arrows<T: Real>(g: &FiniteGroupoid, mu: &ObjectMeasure<T>) -> Vec<ArrowId> {
    g.arrows().filter(|&a| mu.in_support(g.src(a))).collect()
}

/// The isometry `V : L^p(ν⁻¹) → L^p(μ, ℓ^p(xG))`, `(Vη)(σ) = D(σ)^{-1/p} η(σ)`,
/// which satisfies `π(f) V = V Ind(μ)(f)` for the regular representation.
/// Rows follow the layout of [`super::regular_rep`], columns that of
/// [`ind_matrix_measure`].
pub fn regular_intertwiner<T: Real>(g: &Arc<FiniteGroupoid>, mu: &ObjectMeasure<T>, p: T) -> Result<LpOperator<T>> {
    let d = cocycle(g, mu)?;
    let cols = ind_arrows(g, mu);
    let rows: Vec<ArrowId> = mu.support().into_iter().flat_map(|x| g.range_fiber(x).iter().copied()).collect();
    let mut m = Matrix::zeros(rows.len(), cols.len());
    for (i, &a) in rows.iter().enumerate() {
        let j = cols.binary_search(&a).expect("same arrow set under quasi-invariance");
        m[(i, j)] = C::new(d.get(a).expect("supported").powf(-T::one() / p), T::zero());
    }
    let dom = WeightedLpSpace::new(cols.iter().map(|&a| mu.weight(g.src(a))).collect(), p)?;
    let cod = WeightedLpSpace::new(rows.iter().map(|&a| mu.weight(g.rng(a))).collect(), p)?;
    LpOperator::new(m, dom, cod)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedNorm<T> {
    pub estimate: NormEstimate<T>,
    /// The base point whose induced representation attains the maximum.
    pub basepoint: ObjectId,
}

/// `max_x ‖Ind(x) f‖`, computed in parallel over base points. Ties go to
/// the smallest object.
pub fn reduced_norm<T: Real>(f: &AlgebraElement<T>, p: T, cfg: &NormConfig) -> Result<ReducedNorm<T>> {
    let g = f.groupoid();
    let results = g
        .objects()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x| Ok((x, op_norm(&ind_matrix_at(f, x, p)?, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(ObjectId, NormEstimate<T>)> = None;
    for (x, e) in results {
        if best.as_ref().map_or(true, |(_, b)| e.value > b.value) {
            best = Some((x, e));
        }
    }
    let (basepoint, estimate) = best.unwrap_or((
        ObjectId(0),
        NormEstimate { value: T::zero(), witness: Vec::new(), converged: true, restarts: 0 },
    ));
    Ok(ReducedNorm { estimate, basepoint })
}

/// Whether `f` vanishes on `supp ν`, i.e. lies in the kernel of `Ind(μ)`.
///
/// # Panics
/// If the two characterisations disagree.
pub fn kernel_support_check<T: Real>(f: &AlgebraElement<T>, mu: &ObjectMeasure<T>) -> bool {
    let g = f.groupoid();
    let vanishes = g.arrows().filter(|&a| mu.in_support(g.rng(a))).all(|a| f.coeff(a).norm() == T::zero());
    let arrows = ind_arrows(g, mu);
    let ind_zero = convolution_matrix(f, &arrows).is_zero(T::lit(1e-12));
    assert_eq!(vanishes, ind_zero, "vanishing on supp ν must match Ind(μ) f = 0");
    vanishes
}

/// `f(γ) = 1/|r(γ)G|`, an exactly invariant mean on a finite groupoid.
pub fn invariant_mean<T: Real>(g: &Arc<FiniteGroupoid>) -> AlgebraElement<T> {
    AlgebraElement::from_fn(g, |a| C::new(T::one() / T::from_usize_lossy(g.range_fiber(g.rng(a)).len()), T::zero()))
}

/// `(f^{1/p}, f^{1/p'})` for the invariant mean `f`.
pub fn p_mean<T: Real>(g: &Arc<FiniteGroupoid>, p: T) -> (AlgebraElement<T>, AlgebraElement<T>) {
    let f = invariant_mean::<T>(g);
    let q = conjugate_exponent(p);
    let pow = |e: T| AlgebraElement::from_fn(g, |a| C::new(f.coeff(a).re.powf(T::one() / e), T::zero()));
    (pow(p), pow(q))
}

/// How far a pair `(g, h)` is from an invariant `p`-mean.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PMeanCheck<T> {
    /// `max_x Σ_{xG} g^p`; must be at most 1.
    pub g_mass: T,
    /// `max_x Σ_{xG} h^{p'}`; must be at most 1.
    pub h_mass: T,
    /// `max_x |1 - Σ_{xG} g h|`.
    pub pairing_defect: T,
    /// `max_γ Σ_{ρ∈r(γ)G} |g(γ⁻¹ρ) - g(ρ)|^p`.
    pub g_variation: T,
    /// The same for `h` with `p'`.
    pub h_variation: T,
    /// `max_γ |1 - (h ∗ g)(γ)|`.
    pub convolution_defect: T,
}

pub fn check_p_mean<T: Real>(g: &AlgebraElement<T>, h: &AlgebraElement<T>, p: T) -> Result<PMeanCheck<T>> {
    let gr = g.groupoid();
    let q = conjugate_exponent(p);
    let mut out = PMeanCheck {
        g_mass: T::zero(),
        h_mass: T::zero(),
        pairing_defect: T::zero(),
        g_variation: T::zero(),
        h_variation: T::zero(),
        convolution_defect: T::zero(),
    };
    for x in gr.objects() {
        let fiber = gr.range_fiber(x);
        let gm: T = fiber.iter().map(|&a| g.coeff(a).norm().powf(p)).sum();
        let hm: T = fiber.iter().map(|&a| h.coeff(a).norm().powf(q)).sum();
        let pair: C<T> = fiber.iter().map(|&a| g.coeff(a) * h.coeff(a)).sum();
        out.g_mass = out.g_mass.max(gm);
        out.h_mass = out.h_mass.max(hm);
        out.pairing_defect = out.pairing_defect.max((C::new(T::one(), T::zero()) - pair).norm());
    }
    for gamma in gr.arrows() {
        let inv = gr.inverse(gamma);
        let var = |e: &AlgebraElement<T>, exp: T| -> T {
            gr.range_fiber(gr.rng(gamma))
                .iter()
                .map(|&rho| (e.coeff(gr.composite(inv, rho).expect("composable")) - e.coeff(rho)).norm().powf(exp))
                .sum()
        };
        out.g_variation = out.g_variation.max(var(g, p));
        out.h_variation = out.h_variation.max(var(h, q));
    }
    let hg = convolve(h, g)?;
    for a in gr.arrows() {
        out.convolution_defect = out.convolution_defect.max((C::new(T::one(), T::zero()) - hg.coeff(a)).norm());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::{integrate, regular_rep};

    fn c(re: f64) -> C<f64> {
        C::new(re, 0.0)
    }

    #[test]
    fn circulant_on_z2() {
        let g = Arc::new(FiniteGroupoid::cyclic_group(2));
        let f = AlgebraElement::from_coeffs(&g, vec![c(2.0), c(5.0)]).unwrap();
        let m = ind_matrix_at(&f, ObjectId(0), 3.0).unwrap();
        assert_eq!(m.matrix(), &Matrix::from_real_rows(&[&[2.0, 5.0], &[5.0, 2.0]]));
        let one = AlgebraElement::from_coeffs(&g, vec![c(1.0), c(1.0)]).unwrap();
        let r = reduced_norm(&one, 2.0, &NormConfig::default()).unwrap();
        assert!((r.estimate.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn unit_is_identity() {
        let g = Arc::new(FiniteGroupoid::transitive(3));
        let u = AlgebraElement::<f64>::unit(&g);
        assert_eq!(ind_matrix_at(&u, ObjectId(1), 2.5).unwrap().matrix(), &Matrix::identity(3));
        assert!((reduced_norm(&u, 1.5, &NormConfig::default()).unwrap().estimate.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn chi_01_moves_the_other_arrow() {
        let g = Arc::new(FiniteGroupoid::transitive(2));
        let a = g.find_arrow("(0,1)").unwrap();
        let f = AlgebraElement::<f64>::delta(&g, a);
        let m = ind_matrix_at(&f, ObjectId(0), 2.0).unwrap();
        let fiber = g.source_fiber(ObjectId(0));
        let i00 = fiber.iter().position(|&b| b == g.find_arrow("(0,0)").unwrap()).unwrap();
        let i10 = fiber.iter().position(|&b| b == g.find_arrow("(1,0)").unwrap()).unwrap();
        let mut want = Matrix::zeros(2, 2);
        want[(i00, i10)] = c(1.0);
        assert_eq!(m.matrix(), &want);
    }

    #[test]
    fn intertwines_regular_integrated_form() {
        let g = Arc::new(FiniteGroupoid::transitive(3));
        let mu = ObjectMeasure::new(vec![0.1, 0.6, 0.3]).unwrap();
        let p = 2.5;
        let r = regular_rep(&g, &mu, p).unwrap();
        let f = AlgebraElement::from_fn(&g, |a| C::new(a.0 as f64 - 4.0, 1.0 / (1.0 + a.0 as f64)));
        let v = regular_intertwiner(&g, &mu, p).unwrap();
        let lhs = integrate(&r, &f).unwrap().operator.into_matrix();
        let ind = ind_matrix_measure(&f, &mu, p).unwrap();
        assert!((&lhs * v.matrix()).approx_eq(&(v.matrix() * ind.matrix()), 1e-10));
        assert_eq!(v.cod(), &r.layout().unwrap().space);
    }

    #[test]
    fn kernel_examples() {
        let g = Arc::new(FiniteGroupoid::disjoint_union(&[FiniteGroupoid::transitive(2), FiniteGroupoid::cyclic_group(2)]));
        let mu = ObjectMeasure::point_mass(&g, ObjectId(0));
        let other = AlgebraElement::from_fn(&g, |a| if g.src(a) == ObjectId(2) { c(1.0) } else { c(0.0) });
        assert!(kernel_support_check(&other, &mu));
        assert!(!kernel_support_check(&AlgebraElement::unit(&g), &ObjectMeasure::<f64>::uniform(&g)));
        assert!(kernel_support_check(&AlgebraElement::zero(&g), &ObjectMeasure::<f64>::uniform(&g)));
    }

    #[test]
    fn p_mean_is_exact() {
        let g = Arc::new(FiniteGroupoid::disjoint_union(&[FiniteGroupoid::transitive(3), FiniteGroupoid::cyclic_group(4)]));
        let (gm, hm) = p_mean::<f64>(&g, 3.0);
        let chk = check_p_mean(&gm, &hm, 3.0).unwrap();
        assert!(chk.g_mass <= 1.0 + 1e-12 && chk.h_mass <= 1.0 + 1e-12);
        assert!(chk.pairing_defect < 1e-12);
        assert!(chk.g_variation < 1e-12 && chk.h_variation < 1e-12);
        assert!(chk.convolution_defect < 1e-12);
    }
}
