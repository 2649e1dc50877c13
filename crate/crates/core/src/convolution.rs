//! The convolution algebra `C_c(G)` of a finite groupoid.

use std::collections::BTreeMap;
use std::ops::{Add, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid, Slice};
use crate::scalar::{czero, Real, C};

/// A complex function on the arrows of a finite groupoid.
#[derive(Clone, Debug)]
pub struct AlgebraElement<T> {
    groupoid: Arc<FiniteGroupoid>,
    coeffs: Vec<C<T>>,
}

impl<T: Real> PartialEq for AlgebraElement<T> {
    fn eq(&self, other: &Self) -> bool {
        same_groupoid(&self.groupoid, &other.groupoid) && self.coeffs == other.coeffs
    }
}

pub(crate) fn same_groupoid(a: &Arc<FiniteGroupoid>, b: &Arc<FiniteGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<T: Real> AlgebraElement<T> {
    pub fn zero(g: &Arc<FiniteGroupoid>) -> Self {
        Self { groupoid: g.clone(), coeffs: vec![czero(); g.num_arrows()] }
    }

    pub fn from_coeffs(g: &Arc<FiniteGroupoid>, coeffs: Vec<C<T>>) -> Result<Self> {
        if coeffs.len() != g.num_arrows() {
            return Err(Error::ShapeMismatch(format!("{} coefficients for {} arrows", coeffs.len(), g.num_arrows())));
        }
        Ok(Self { groupoid: g.clone(), coeffs })
    }

    pub fn from_fn(g: &Arc<FiniteGroupoid>, f: impl FnMut(ArrowId) -> C<T>) -> Self {
        Self { groupoid: g.clone(), coeffs: g.arrows().map(f).collect() }
    }

    /// Sparse form keyed by arrow label.
    pub fn from_labels(g: &Arc<FiniteGroupoid>, coeffs: &BTreeMap<String, C<T>>) -> Result<Self> {
        let mut f = Self::zero(g);
        for (label, &v) in coeffs {
            let a = g.find_arrow(label)?;
            f.coeffs[a.0] = f.coeffs[a.0] + v;
        }
        Ok(f)
    }

    /// Characteristic function of a set of arrows.
    pub fn chi(g: &Arc<FiniteGroupoid>, slice: &Slice) -> Self {
        let mut f = Self::zero(g);
        for a in slice.arrows() {
            f.coeffs[a.0] = C::new(T::one(), T::zero());
        }
        f
    }

    pub fn delta(g: &Arc<FiniteGroupoid>, a: ArrowId) -> Self {
        let mut f = Self::zero(g);
        f.coeffs[a.0] = C::new(T::one(), T::zero());
        f
    }

    /// `χ_{G⁰}`, the unit of the algebra.
    pub fn unit(g: &Arc<FiniteGroupoid>) -> Self {
        Self::chi(g, &Slice::units(g))
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn coeff(&self, a: ArrowId) -> C<T> {
        self.coeffs[a.0]
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn set(&mut self, a: ArrowId, v: C<T>) {
        self.coeffs[a.0] = v;
    }

    pub fn support(&self) -> Vec<ArrowId> {
        self.groupoid.arrows().filter(|a| self.coeffs[a.0] != czero()).collect()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { groupoid: self.groupoid.clone(), coeffs: self.coeffs.iter().map(|&v| v * s).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.coeffs.iter().zip(&other.coeffs).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        same_groupoid(&self.groupoid, &other.groupoid) && self.max_abs_diff(other) <= tol
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Result<Self> {
        if !same_groupoid(&self.groupoid, &other.groupoid) {
            return Err(Error::GroupoidMismatch);
        }
        Ok(Self {
            groupoid: self.groupoid.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Labelled nonzero coefficients.
    pub fn to_labels(&self) -> BTreeMap<String, C<T>> {
        self.support().into_iter().map(|a| (self.groupoid.arrow_label(a).to_string(), self.coeffs[a.0])).collect()
    }
}

impl<T: Real> Add for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;
    fn add(self, rhs: &AlgebraElement<T>) -> AlgebraElement<T> {
        self.try_add(rhs).expect("elements on different groupoids")
    }
}

impl<T: Real> Sub for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;
    fn sub(self, rhs: &AlgebraElement<T>) -> AlgebraElement<T> {
        self.try_sub(rhs).expect("elements on different groupoids")
    }
}

/// `(f ∗ g)(γ) = Σ_{ρ₀ρ₁ = γ} f(ρ₀) g(ρ₁)`.
pub fn convolve<T: Real>(f: &AlgebraElement<T>, g: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
    if !same_groupoid(&f.groupoid, &g.groupoid) {
        return Err(Error::GroupoidMismatch);
    }
    let gr = &f.groupoid;
    // Factorizations of γ are ρ₀ ∈ r(γ)G with ρ₁ = ρ₀⁻¹γ.
    let coeffs = gr
        .arrows()
        .map(|gamma| {
            gr.range_fiber(gr.rng(gamma)).iter().fold(czero(), |acc, &r0| {
                let r1 = gr.composite(gr.inverse(r0), gamma).expect("r0⁻¹γ is composable");
                acc + f.coeffs[r0.0] * g.coeffs[r1.0]
            })
        })
        .collect();
    Ok(AlgebraElement { groupoid: gr.clone(), coeffs })
}

/// `f*(γ) = conj(f(γ⁻¹))`.
pub fn involute<T: Real>(f: &AlgebraElement<T>) -> AlgebraElement<T> {
    let g = &f.groupoid;
    AlgebraElement { groupoid: g.clone(), coeffs: g.arrows().map(|a| f.coeffs[g.inverse(a).0].conj()).collect() }
}

/// `max(sup_x Σ_{γ∈xG} |f(γ)|, sup_x Σ_{γ∈Gx} |f(γ)|)`.
pub fn i_norm<T: Real>(f: &AlgebraElement<T>) -> T {
    let g = &f.groupoid;
    let sum = |arrows: &[ArrowId]| arrows.iter().map(|a| f.coeffs[a.0].norm()).sum::<T>();
    g.objects()
        .map(|x| sum(g.range_fiber(x)).max(sum(g.source_fiber(x))))
        .fold(T::zero(), T::max)
}

/// An `n × n` matrix over `C_c(G)`.
#[derive(Clone, Debug)]
pub struct MatrixElement<T> {
    n: usize,
    entries: Vec<AlgebraElement<T>>,
}

impl<T: Real> PartialEq for MatrixElement<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

impl<T: Real> MatrixElement<T> {
    /// Row-major entries, all over one groupoid.
    pub fn new(n: usize, entries: Vec<AlgebraElement<T>>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!("{} entries for a {n}x{n} matrix", entries.len())));
        }
        if entries.iter().any(|e| !same_groupoid(e.groupoid(), entries[0].groupoid())) {
            return Err(Error::GroupoidMismatch);
        }
        Ok(Self { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlgebraElement<T> {
        &self.entries[i * self.n + j]
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.entries[0].groupoid()
    }

    /// The element `F(i, γ, j) = f_ij(γ)` of `C_c(G_n)`, over `amplified`,
    /// which must be `amplify(G, n)`.
    pub fn transport(&self, amplified: &Arc<FiniteGroupoid>) -> Result<AlgebraElement<T>> {
        let g = self.groupoid();
        let (n, m) = (self.n, g.num_arrows());
        if amplified.num_arrows() != n * n * m {
            return Err(Error::ShapeMismatch("target is not the amplification of the entries' groupoid".into()));
        }
        let mut coeffs = vec![czero(); n * n * m];
        for i in 0..n {
            for j in 0..n {
                for (k, &v) in self.entry(i, j).coeffs().iter().enumerate() {
                    coeffs[(i * m + k) * n + j] = v;
                }
            }
        }
        AlgebraElement::from_coeffs(amplified, coeffs)
    }

    /// Inverse of [`Self::transport`].
    pub fn from_transported(f: &AlgebraElement<T>, base: &Arc<FiniteGroupoid>, n: usize) -> Result<Self> {
        let m = base.num_arrows();
        if f.groupoid().num_arrows() != n * n * m {
            return Err(Error::ShapeMismatch("element does not live on the n-th amplification".into()));
        }
        let entries = (0..n * n)
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                AlgebraElement::from_coeffs(base, (0..m).map(|k| f.coeffs()[(i * m + k) * n + j]).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, entries)
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch("matrix sizes differ".into()));
        }
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = AlgebraElement::zero(self.groupoid());
                for k in 0..n {
                    acc = acc.try_add(&convolve(self.entry(i, k), other.entry(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Self::new(n, entries)
    }
}

/// Matrix I-norm, computed on the transported element of `C_c(G_n)`.
pub fn matrix_i_norm<T: Real>(f: &MatrixElement<T>) -> T {
    let amplified = Arc::new(f.groupoid().amplify(f.size()));
    i_norm(&f.transport(&amplified).expect("amplification matches"))
}

/// Serialized element: `{"groupoid": <path or inline>, "coeffs": {"arrow": [re, im]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementFile {
    pub groupoid: serde_json::Value,
    pub coeffs: BTreeMap<String, [f64; 2]>,
}

impl ElementFile {
    pub fn to_element<T: Real>(&self, g: &Arc<FiniteGroupoid>) -> Result<AlgebraElement<T>> {
        let coeffs = self.coeffs.iter().map(|(k, &[a, b])| (k.clone(), C::new(T::lit(a), T::lit(b)))).collect();
        AlgebraElement::from_labels(g, &coeffs)
    }

    pub fn from_element<T: Real>(f: &AlgebraElement<T>, groupoid: serde_json::Value) -> Self {
        let coeffs = f.to_labels().into_iter().map(|(k, v)| (k, [v.re.as_f64(), v.im.as_f64()])).collect();
        Self { groupoid, coeffs }
    }
}
