use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::{ArrowId, FiniteGroupoid, ObjectId};
use crate::error::{Error, Result};
use crate::semigroup::FiniteInverseSemigroup;

/// A set of arrows on which source and range are both injective.
///
/// The empty slice is the zero of the slice semigroup.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slice {
    arrows: BTreeSet<ArrowId>,
}

impl Slice {
    pub fn new(g: &FiniteGroupoid, arrows: impl IntoIterator<Item = ArrowId>) -> Result<Self> {
        let arrows: BTreeSet<ArrowId> = arrows.into_iter().collect();
        if let Some(a) = arrows.iter().find(|a| a.0 >= g.num_arrows()) {
            return Err(Error::NotASlice(format!("arrow {a} does not exist")));
        }
        let mut srcs = BTreeSet::new();
        let mut rngs = BTreeSet::new();
        for &a in &arrows {
            if !srcs.insert(g.src(a)) {
                return Err(Error::NotASlice(format!(
                    "two arrows share source {}",
                    g.object_label(g.src(a))
                )));
            }
            if !rngs.insert(g.rng(a)) {
                return Err(Error::NotASlice(format!(
                    "two arrows share range {}",
                    g.object_label(g.rng(a))
                )));
            }
        }
        Ok(Self { arrows })
    }

    /// Builds a slice from arrow labels.
    pub fn from_labels<S: AsRef<str>>(g: &FiniteGroupoid, labels: &[S]) -> Result<Self> {
        let ids = labels.iter().map(|l| g.find_arrow(l.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::new(g, ids)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The unit space `G⁰` as a slice.
    pub fn units(g: &FiniteGroupoid) -> Self {
        Self { arrows: g.objects().map(|x| g.unit(x)).collect() }
    }

    /// Unit arrows over a set of objects.
    pub fn units_on(g: &FiniteGroupoid, objects: impl IntoIterator<Item = ObjectId>) -> Self {
        Self { arrows: objects.into_iter().map(|x| g.unit(x)).collect() }
    }

    pub fn singleton(a: ArrowId) -> Self {
        Self { arrows: BTreeSet::from([a]) }
    }

    pub fn arrows(&self) -> impl ExactSizeIterator<Item = ArrowId> + '_ {
        self.arrows.iter().copied()
    }

    pub fn contains(&self, a: ArrowId) -> bool {
        self.arrows.contains(&a)
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn sources(&self, g: &FiniteGroupoid) -> BTreeSet<ObjectId> {
        self.arrows.iter().map(|&a| g.src(a)).collect()
    }

    pub fn ranges(&self, g: &FiniteGroupoid) -> BTreeSet<ObjectId> {
        self.arrows.iter().map(|&a| g.rng(a)).collect()
    }

    /// The unique arrow of the slice with range `x`.
    pub fn arrow_with_range(&self, g: &FiniteGroupoid, x: ObjectId) -> Option<ArrowId> {
        self.arrows.iter().copied().find(|&a| g.rng(a) == x)
    }

    /// The unique arrow of the slice with source `x`.
    pub fn arrow_with_source(&self, g: &FiniteGroupoid, x: ObjectId) -> Option<ArrowId> {
        self.arrows.iter().copied().find(|&a| g.src(a) == x)
    }

    /// True when every arrow is a unit.
    pub fn is_idempotent(&self, g: &FiniteGroupoid) -> bool {
        self.arrows.iter().all(|&a| g.is_unit(a))
    }

    pub fn inverse(&self, g: &FiniteGroupoid) -> Self {
        Self { arrows: self.arrows.iter().map(|&a| g.inverse(a)).collect() }
    }

    /// `θ_A`: the bijection `s(A) → r(A)`, `x ↦ r(Ax)`.
    pub fn theta(&self, g: &FiniteGroupoid) -> BTreeMap<ObjectId, ObjectId> {
        self.arrows.iter().map(|&a| (g.src(a), g.rng(a))).collect()
    }

    /// The set product `AB = {γρ : γ ∈ A, ρ ∈ B, s(γ) = r(ρ)}`.
    pub fn product(&self, other: &Slice, g: &FiniteGroupoid) -> Self {
        let mut arrows = BTreeSet::new();
        for &b in &other.arrows {
            if let Some(a) = self.arrow_with_source(g, g.rng(b)) {
                arrows.insert(g.composite(a, b).expect("slice product on a valid groupoid"));
            }
        }
        Self { arrows }
    }

    pub fn label(&self, g: &FiniteGroupoid) -> String {
        if self.is_empty() {
            return "{}".to_string();
        }
        let parts: Vec<_> = self.arrows.iter().map(|&a| g.arrow_label(a)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Inverse slice together with `θ_A` as an explicit bijection.
pub fn slice_inverse(g: &FiniteGroupoid, a: &Slice) -> Result<(Slice, BTreeMap<ObjectId, ObjectId>)> {
    let checked = Slice::new(g, a.arrows())?;
    Ok((checked.inverse(g), checked.theta(g)))
}

/// Every slice of `g`, including the empty one. Exponential; meant for
/// small groupoids.
pub fn all_slices(g: &FiniteGroupoid) -> Vec<Slice> {
    fn go(
        g: &FiniteGroupoid,
        next: usize,
        srcs: &mut BTreeSet<ObjectId>,
        rngs: &mut BTreeSet<ObjectId>,
        cur: &mut Vec<ArrowId>,
        out: &mut Vec<Slice>,
    ) {
        if next == g.num_arrows() {
            out.push(Slice { arrows: cur.iter().copied().collect() });
            return;
        }
        go(g, next + 1, srcs, rngs, cur, out);
        let a = ArrowId(next);
        let (s, r) = (g.src(a), g.rng(a));
        if !srcs.contains(&s) && !rngs.contains(&r) {
            srcs.insert(s);
            rngs.insert(r);
            cur.push(a);
            go(g, next + 1, srcs, rngs, cur, out);
            cur.pop();
            srcs.remove(&s);
            rngs.remove(&r);
        }
    }
    let mut out = Vec::new();
    go(g, 0, &mut BTreeSet::new(), &mut BTreeSet::new(), &mut Vec::new(), &mut out);
    out
}

/// A finite inverse semigroup of slices with its multiplication table.
#[derive(Clone, Debug)]
pub struct SliceSemigroup {
    groupoid: Arc<FiniteGroupoid>,
    slices: Vec<Slice>,
    index: HashMap<Slice, usize>,
    semigroup: FiniteInverseSemigroup,
}

impl SliceSemigroup {
    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn slice(&self, i: usize) -> &Slice {
        &self.slices[i]
    }

    pub fn index_of(&self, s: &Slice) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn semigroup(&self) -> &FiniteInverseSemigroup {
        &self.semigroup
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Indices of idempotent slices (subsets of the unit space).
    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.slices[i].is_idempotent(&self.groupoid)).collect()
    }

    /// Every arrow of the groupoid lies in some slice of the semigroup.
    pub fn covers_groupoid(&self) -> bool {
        let mut seen = vec![false; self.groupoid.num_arrows()];
        for s in &self.slices {
            for a in s.arrows() {
                seen[a.0] = true;
            }
        }
        seen.into_iter().all(|b| b)
    }
}

/// Closes `generators ∪ {∅}` under product and inverse.
pub fn generate_slice_semigroup(
    g: &Arc<FiniteGroupoid>,
    generators: &[Slice],
    cap: usize,
) -> Result<SliceSemigroup> {
    if cap == 0 {
        return Err(Error::InvalidParams("cap must be positive".into()));
    }
    for s in generators {
        Slice::new(g, s.arrows())?;
    }
    let mut slices: Vec<Slice> = Vec::new();
    let mut index: HashMap<Slice, usize> = HashMap::new();
    let mut push = |s: Slice, slices: &mut Vec<Slice>| -> Result<()> {
        if !index.contains_key(&s) {
            if slices.len() == cap {
                return Err(Error::CapExceeded { cap });
            }
            index.insert(s.clone(), slices.len());
            slices.push(s);
        }
        Ok(())
    };
    push(Slice::empty(), &mut slices)?;
    for s in generators {
        push(s.clone(), &mut slices)?;
    }
    let mut k = 0;
    while k < slices.len() {
        let a = slices[k].clone();
        push(a.inverse(g), &mut slices)?;
        for j in 0..=k {
            let b = slices[j].clone();
            push(a.product(&b, g), &mut slices)?;
            push(b.product(&a, g), &mut slices)?;
        }
        k += 1;
    }
    drop(push);

    let index: HashMap<Slice, usize> = slices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let n = slices.len();
    let mul: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).map(|j| index[&slices[i].product(&slices[j], g)]).collect())
        .collect();
    let star: Vec<usize> = slices.iter().map(|s| index[&s.inverse(g)]).collect();
    let labels = slices.iter().map(|s| s.label(g)).collect();
    let semigroup = FiniteInverseSemigroup::from_parts(labels, mul, star, Some(0))?;
    Ok(SliceSemigroup { groupoid: Arc::clone(g), slices, index, semigroup })
}
