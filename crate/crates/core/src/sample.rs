//! Seeded random generators for groupoids, measures, elements and
//! representations. Used by the test suites and benchmarks; every
//! generator takes the random source explicitly.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bratteli::{BratteliDiagram, TowerElement};
use crate::convolution::AlgebraElement;
use crate::cuntz::{CuntzWord, LeavittPolynomial};
use crate::error::Result;
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{Matrix, SpatialPartialIsometry, WeightedLpSpace};
use crate::measure::ObjectMeasure;
use crate::representation::BundleRepresentation;
use crate::scalar::{c, cone, creal, czero, phase, Real, C};

/// Finite abelian groups used as isotropy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(usize),
    Klein,
}

impl GroupKind {
    pub fn order(self) -> usize {
        match self {
            Self::Cyclic(k) => k,
            Self::Klein => 4,
        }
    }

    pub fn groupoid(self) -> FiniteGroupoid {
        match self {
            Self::Cyclic(k) => FiniteGroupoid::cyclic_group(k),
            Self::Klein => {
                let table: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
                FiniteGroupoid::finite_group(&table, None).expect("Klein table is a group")
            }
        }
    }

    fn mul(self, a: usize, b: usize) -> usize {
        match self {
            Self::Cyclic(k) => (a + b) % k,
            Self::Klein => a ^ b,
        }
    }

    /// Character number `t` evaluated at `g`.
    fn character<T: Real>(self, t: usize, g: usize) -> C<T> {
        match self {
            Self::Cyclic(k) => {
                C::from_polar(T::one(), T::lit(2.0 * std::f64::consts::PI * ((t * g) % k) as f64 / k as f64))
            }
            Self::Klein => {
                if (t & g).count_ones() % 2 == 0 {
                    cone()
                } else {
                    creal(-T::one())
                }
            }
        }
    }
}

/// One connected component `n × H × n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub group: GroupKind,
    pub n: usize,
    pub object_offset: usize,
    pub arrow_offset: usize,
}

impl Part {
    pub fn num_arrows(&self) -> usize {
        self.n * self.n * self.group.order()
    }

    /// Index of `(i, h, j)`, running from object `j` to object `i`.
    pub fn arrow(&self, i: usize, h: usize, j: usize) -> usize {
        self.arrow_offset + (i * self.group.order() + h) * self.n + j
    }
}

/// A groupoid together with its decomposition into amplified groups.
#[derive(Clone, Debug)]
pub struct SampledGroupoid {
    pub groupoid: Arc<FiniteGroupoid>,
    pub parts: Vec<Part>,
}

impl SampledGroupoid {
    pub fn from_parts(shape: &[(GroupKind, usize)]) -> Self {
        let mut parts = Vec::new();
        let (mut o, mut a) = (0, 0);
        for &(group, n) in shape {
            let part = Part { group, n, object_offset: o, arrow_offset: a };
            o += n;
            a += part.num_arrows();
            parts.push(part);
        }
        let groupoids: Vec<_> = shape.iter().map(|&(g, n)| g.groupoid().amplify(n)).collect();
        let groupoid = if groupoids.len() == 1 {
            groupoids.into_iter().next().expect("one part")
        } else {
            FiniteGroupoid::disjoint_union(&groupoids)
        };
        Self { groupoid: Arc::new(groupoid), parts }
    }

    /// `T_n`, with its standard labels.
    pub fn transitive(n: usize) -> Self {
        Self {
            groupoid: Arc::new(FiniteGroupoid::transitive(n)),
            parts: vec![Part { group: GroupKind::Cyclic(1), n, object_offset: 0, arrow_offset: 0 }],
        }
    }

    /// A single group, with its standard labels.
    pub fn group(kind: GroupKind) -> Self {
        Self {
            groupoid: Arc::new(kind.groupoid()),
            parts: vec![Part { group: kind, n: 1, object_offset: 0, arrow_offset: 0 }],
        }
    }
}

fn random_kind<R: Rng + ?Sized>(rng: &mut R) -> GroupKind {
    match rng.gen_range(0..5) {
        4 => GroupKind::Klein,
        k => GroupKind::Cyclic(k + 1),
    }
}

/// A disjoint union of amplified abelian groups with at most `max_arrows`
/// arrows and at most `max_objects` objects.
pub fn groupoid<R: Rng + ?Sized>(rng: &mut R, max_arrows: usize, max_objects: usize) -> SampledGroupoid {
    assert!(max_arrows >= 1 && max_objects >= 1);
    let mut shape = Vec::new();
    let (mut arrows, mut objects) = (0, 0);
    for _ in 0..8 {
        let kind = random_kind(rng);
        let n = rng.gen_range(1..=3);
        let size = n * n * kind.order();
        if arrows + size > max_arrows || objects + n > max_objects {
            continue;
        }
        shape.push((kind, n));
        arrows += size;
        objects += n;
        if rng.gen_bool(0.4) {
            break;
        }
    }
    if shape.is_empty() {
        shape.push((GroupKind::Cyclic(1), 1));
    }
    SampledGroupoid::from_parts(&shape)
}

/// A normalized measure, constant-free on each orbit. With `allow_null`,
/// whole components may get measure zero (at least one stays positive).
pub fn measure<T: Real, R: Rng + ?Sized>(rng: &mut R, g: &SampledGroupoid, allow_null: bool) -> ObjectMeasure<T> {
    let mut weights = vec![T::zero(); g.groupoid.num_objects()];
    let keep: Vec<bool> = loop {
        let k: Vec<bool> = g.parts.iter().map(|_| !allow_null || rng.gen_bool(0.7)).collect();
        if k.iter().any(|&b| b) {
            break k;
        }
    };
    for (part, &on) in g.parts.iter().zip(&keep) {
        if on {
            for i in 0..part.n {
                weights[part.object_offset + i] = T::lit(rng.gen_range(0.05..1.0));
            }
        }
    }
    let total: T = weights.iter().copied().sum();
    ObjectMeasure::new(weights.into_iter().map(|w| w / total).collect()).expect("positive total")
}

pub fn complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    c(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))
}

pub fn unit_phase<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    loop {
        let z = complex(rng);
        if z.norm() > T::lit(0.1) {
            return phase(z);
        }
    }
}

/// Each coefficient is nonzero with probability `density`.
pub fn element<T: Real, R: Rng + ?Sized>(rng: &mut R, g: &Arc<FiniteGroupoid>, density: f64) -> AlgebraElement<T> {
    AlgebraElement::from_fn(g, |_| if rng.gen_bool(density) { complex(rng) } else { czero() })
}

pub fn matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| complex(rng))
}

pub fn weights<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n).map(|_| T::lit(rng.gen_range(0.2..3.0))).collect()
}

/// `ρ(h)` on `ℓ^p(m)`: a sum of copies of the regular and trivial actions,
/// twisted by a character.
fn isotropy_rep<T: Real, R: Rng + ?Sized>(rng: &mut R, kind: GroupKind) -> Vec<Matrix<T>> {
    let order = kind.order();
    let (regular, trivial) = match rng.gen_range(0..3) {
        0 => (true, false),
        1 => (false, true),
        _ => (true, true),
    };
    let m = if regular { order } else { 0 } + usize::from(trivial);
    let t = rng.gen_range(0..order);
    (0..order)
        .map(|h| {
            let chi = kind.character::<T>(t, h);
            let mut mat = Matrix::zeros(m, m);
            if regular {
                for k in 0..order {
                    mat[(kind.mul(h, k), k)] = chi;
                }
            }
            if trivial {
                mat[(m - 1, m - 1)] = chi;
            }
            mat
        })
        .collect()
}

/// A bundle representation `T_{(i,h,j)} = V_i^{-1} ρ(h) V_j` with random
/// fiber weights and random weighted-permutation isometries `V_i` onto an
/// unweighted model space.
pub fn representation<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    g: &SampledGroupoid,
    mu: &ObjectMeasure<T>,
    p: T,
) -> Result<BundleRepresentation<T>> {
    let gr = &g.groupoid;
    let mut fibers = vec![None; gr.num_objects()];
    let mut t = vec![None; gr.num_arrows()];
    for part in &g.parts {
        let rho = isotropy_rep::<T, R>(rng, part.group);
        let m = rho[0].rows();
        let model = WeightedLpSpace::unweighted(m, p)?;
        let mut v = Vec::with_capacity(part.n);
        let mut v_inv = Vec::with_capacity(part.n);
        for i in 0..part.n {
            let space = WeightedLpSpace::new(weights(rng, m), p)?;
            let mut perm: Vec<usize> = (0..m).collect();
            perm.shuffle(rng);
            let pairs: Vec<_> = (0..m).map(|x| (x, perm[x], unit_phase(rng))).collect();
            let s = SpatialPartialIsometry::from_permutation(space.clone(), model.clone(), pairs)?;
            let fwd = s.to_matrix();
            let mut back = Matrix::zeros(m, m);
            for x in 0..m {
                back[(x, perm[x])] = cone::<T>() / fwd[(perm[x], x)];
            }
            fibers[part.object_offset + i] = Some(space);
            v.push(fwd);
            v_inv.push(back);
        }
        for i in 0..part.n {
            for (h, r) in rho.iter().enumerate() {
                for j in 0..part.n {
                    t[part.arrow(i, h, j)] = Some(&(&v_inv[i] * r) * &v[j]);
                }
            }
        }
    }
    BundleRepresentation::new(
        gr.clone(),
        mu.clone(),
        p,
        fibers.into_iter().map(|f| f.expect("every object lies in a part")).collect(),
        t.into_iter().map(|m| m.expect("every arrow lies in a part")).collect(),
    )
}

/// A spatial partial isometry between random weighted spaces of
/// dimension `n`, defined on a random subset (all of it when `full`).
pub fn spatial<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, p: T, full: bool) -> Result<SpatialPartialIsometry<T>> {
    let dom = WeightedLpSpace::new(weights(rng, n), p)?;
    let cod = WeightedLpSpace::new(weights(rng, n), p)?;
    let mut src: Vec<usize> = (0..n).collect();
    let mut dst: Vec<usize> = (0..n).collect();
    src.shuffle(rng);
    dst.shuffle(rng);
    let k = if full { n } else { rng.gen_range(0..=n) };
    let pairs: Vec<_> = (0..k).map(|i| (src[i], dst[i], unit_phase(rng))).collect();
    SpatialPartialIsometry::from_permutation(dom, cod, pairs)
}

/// A dense `n × n` unitary (Gram–Schmidt on a random complex matrix).
pub fn unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    loop {
        let a: Matrix<T> = matrix(rng, n, n);
        let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v: Vec<C<T>> = (0..n).map(|i| a[(i, j)]).collect();
            for q in &cols {
                let dot = q.iter().zip(&v).fold(czero::<T>(), |s, (x, y)| s + x.conj() * y);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= dot * y);
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm < T::lit(1e-6) {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        if ok {
            return Matrix::from_fn(n, n, |i, j| cols[j][i]);
        }
    }
}

/// A random Leavitt polynomial with `terms` words of length at most `max_len`.
pub fn leavitt<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize, max_len: usize, terms: usize) -> LeavittPolynomial<T> {
    let word = |rng: &mut R| -> Vec<usize> { (0..rng.gen_range(0..=max_len)).map(|_| rng.gen_range(0..d)).collect() };
    let list: Vec<_> = (0..terms).map(|_| (CuntzWord::new(word(rng), word(rng)), complex(rng))).collect();
    LeavittPolynomial::from_terms(d, list).expect("letters are in range")
}

pub fn tower_element<T: Real, R: Rng + ?Sized>(rng: &mut R, diagram: &BratteliDiagram, level: usize) -> Result<TowerElement<T>> {
    let blocks = diagram.multiplicities(level)?.into_iter().map(|n| matrix(rng, n, n)).collect();
    TowerElement::new(diagram, level, blocks)
}
