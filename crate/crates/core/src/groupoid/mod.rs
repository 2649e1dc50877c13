//! Finite groupoids given by explicit composition tables.
//!
//! Arrows compose right-to-left: `compose(g, h)` is defined when
//! `src(g) == rng(h)` and the composite runs from `src(h)` to `rng(g)`.

mod build;
pub mod io;
mod slice;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use build::Kind;
pub use slice::{all_slices, generate_slice_semigroup, slice_inverse, Slice, SliceSemigroup};

/// Default cap on the size of a generated slice semigroup.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArrowId(pub usize);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub src: ObjectId,
    pub rng: ObjectId,
}

/// A finite groupoid: objects, arrows, a partial composition table,
/// inversion and units.
///
/// Construction through [`FiniteGroupoid::from_parts`] only checks that
/// every index is in range; the groupoid axioms are checked by
/// [`FiniteGroupoid::validate`]. The builders always produce valid
/// groupoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    comp: HashMap<(ArrowId, ArrowId), ArrowId>,
    inv: Vec<ArrowId>,
    units: Vec<ArrowId>,
    range_fibers: Vec<Vec<ArrowId>>,
    source_fibers: Vec<Vec<ArrowId>>,
}

/// Which groupoid axiom a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    CompositionDomain,
    SourceMismatch,
    RangeMismatch,
    Associativity,
    InverseInvolution,
    InverseComposition,
    UnitEndpoints,
    UnitNeutral,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub arrows: Vec<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.message, self.arrows.join(", "))
    }
}

impl FiniteGroupoid {
    /// Assembles a groupoid from raw tables.
    ///
    /// `comp` lists `(left, right, composite)` triples. Every arrow needs an
    /// inverse entry and every object a unit.
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        comp: impl IntoIterator<Item = (ArrowId, ArrowId, ArrowId)>,
        inv: Vec<ArrowId>,
        units: Vec<ArrowId>,
    ) -> Result<Self> {
        let n_obj = objects.len();
        let n_arr = arrows.len();
        if n_obj == 0 {
            return Err(Error::InvalidParams("a groupoid needs at least one object".into()));
        }
        for a in &arrows {
            if a.src.0 >= n_obj || a.rng.0 >= n_obj {
                return Err(Error::InvalidParams(format!(
                    "arrow {} references a missing object",
                    a.label
                )));
            }
        }
        if inv.len() != n_arr || inv.iter().any(|a| a.0 >= n_arr) {
            return Err(Error::InvalidParams("inverse table must cover every arrow".into()));
        }
        if units.len() != n_obj || units.iter().any(|a| a.0 >= n_arr) {
            return Err(Error::InvalidParams("unit table must cover every object".into()));
        }
        let mut table = HashMap::new();
        for (l, r, c) in comp {
            if l.0 >= n_arr || r.0 >= n_arr || c.0 >= n_arr {
                return Err(Error::InvalidParams("composition entry out of range".into()));
            }
            if table.insert((l, r), c).is_some() {
                return Err(Error::InvalidParams(format!(
                    "duplicate composition entry for ({}, {})",
                    arrows[l.0].label, arrows[r.0].label
                )));
            }
        }
        let mut range_fibers = vec![Vec::new(); n_obj];
        let mut source_fibers = vec![Vec::new(); n_obj];
        for (i, a) in arrows.iter().enumerate() {
            range_fibers[a.rng.0].push(ArrowId(i));
            source_fibers[a.src.0].push(ArrowId(i));
        }
        Ok(Self {
            objects,
            arrows,
            comp: table,
            inv,
            units,
            range_fibers,
            source_fibers,
        })
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = ObjectId> + '_ {
        (0..self.objects.len()).map(ObjectId)
    }

    pub fn arrows(&self) -> impl ExactSizeIterator<Item = ArrowId> + '_ {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a.0]
    }

    pub fn object_label(&self, x: ObjectId) -> &str {
        &self.objects[x.0]
    }

    pub fn arrow_label(&self, a: ArrowId) -> &str {
        &self.arrows[a.0].label
    }

    pub fn find_object(&self, label: &str) -> Result<ObjectId> {
        self.objects
            .iter()
            .position(|o| o == label)
            .map(ObjectId)
            .ok_or_else(|| Error::Unknown { kind: "object", name: label.to_string() })
    }

    pub fn find_arrow(&self, label: &str) -> Result<ArrowId> {
        self.arrows
            .iter()
            .position(|a| a.label == label)
            .map(ArrowId)
            .ok_or_else(|| Error::Unknown { kind: "arrow", name: label.to_string() })
    }

    pub fn src(&self, a: ArrowId) -> ObjectId {
        self.arrows[a.0].src
    }

    pub fn rng(&self, a: ArrowId) -> ObjectId {
        self.arrows[a.0].rng
    }

    pub fn inverse(&self, a: ArrowId) -> ArrowId {
        self.inv[a.0]
    }

    pub fn unit(&self, x: ObjectId) -> ArrowId {
        self.units[x.0]
    }

    pub fn is_unit(&self, a: ArrowId) -> bool {
        self.units[self.rng(a).0] == a
    }

    /// `xG`: arrows with range `x`.
    pub fn range_fiber(&self, x: ObjectId) -> &[ArrowId] {
        &self.range_fibers[x.0]
    }

    /// `Gx`: arrows with source `x`.
    pub fn source_fiber(&self, x: ObjectId) -> &[ArrowId] {
        &self.source_fibers[x.0]
    }

    /// Raw table lookup, `None` when the pair has no entry.
    pub fn composite(&self, left: ArrowId, right: ArrowId) -> Option<ArrowId> {
        self.comp.get(&(left, right)).copied()
    }

    /// The composite `left ∘ right`.
    pub fn compose(&self, left: ArrowId, right: ArrowId) -> Result<ArrowId> {
        let not_composable = || Error::NotComposable {
            left: self.arrow_label(left).to_string(),
            right: self.arrow_label(right).to_string(),
        };
        if self.src(left) != self.rng(right) {
            return Err(not_composable());
        }
        self.composite(left, right).ok_or_else(not_composable)
    }

    /// Composition table entries as `(left, right, composite)`.
    pub fn composition_entries(&self) -> impl Iterator<Item = (ArrowId, ArrowId, ArrowId)> + '_ {
        self.comp.iter().map(|(&(l, r), &c)| (l, r, c))
    }

    /// Objects in the orbit of `x`, sorted.
    pub fn orbit(&self, x: ObjectId) -> BTreeSet<ObjectId> {
        self.range_fiber(x).iter().map(|&a| self.src(a)).collect()
    }

    /// Orbits as a partition of the object set, in order of least element.
    pub fn orbits(&self) -> Vec<BTreeSet<ObjectId>> {
        let mut seen = vec![false; self.num_objects()];
        let mut out = Vec::new();
        for x in self.objects() {
            if seen[x.0] {
                continue;
            }
            let orbit = self.orbit(x);
            for y in &orbit {
                seen[y.0] = true;
            }
            out.push(orbit);
        }
        out
    }

    /// Checks every groupoid axiom; an empty list means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let label = |a: ArrowId| self.arrow_label(a).to_string();
        let violation = |axiom, arrows: Vec<ArrowId>, message: String| Violation {
            axiom,
            arrows: arrows.into_iter().map(label).collect(),
            message,
        };

        for g in self.arrows() {
            for h in self.arrows() {
                let composable = self.src(g) == self.rng(h);
                match (composable, self.composite(g, h)) {
                    (true, None) => out.push(violation(
                        Axiom::CompositionDomain,
                        vec![g, h],
                        "composable pair has no composite".into(),
                    )),
                    (false, Some(_)) => out.push(violation(
                        Axiom::CompositionDomain,
                        vec![g, h],
                        "non-composable pair has a composite".into(),
                    )),
                    (true, Some(gh)) => {
                        if self.src(gh) != self.src(h) {
                            out.push(violation(
                                Axiom::SourceMismatch,
                                vec![g, h, gh],
                                "source mismatch: src(gh) != src(h)".into(),
                            ));
                        }
                        if self.rng(gh) != self.rng(g) {
                            out.push(violation(
                                Axiom::RangeMismatch,
                                vec![g, h, gh],
                                "range mismatch: rng(gh) != rng(g)".into(),
                            ));
                        }
                    }
                    (false, None) => {}
                }
            }
        }

        // Associativity over composable triples; only reachable when the
        // pairwise composites exist.
        for g in self.arrows() {
            let x = self.src(g);
            for &h in self.range_fiber(x) {
                let y = self.src(h);
                for &k in self.range_fiber(y) {
                    let (Some(gh), Some(hk)) = (self.composite(g, h), self.composite(h, k)) else {
                        continue;
                    };
                    let left = self.composite(gh, k);
                    let right = self.composite(g, hk);
                    if left.is_none() || left != right {
                        out.push(violation(
                            Axiom::Associativity,
                            vec![g, h, k],
                            "(gh)k != g(hk)".into(),
                        ));
                    }
                }
            }
        }

        for g in self.arrows() {
            let gi = self.inverse(g);
            if self.inverse(gi) != g {
                out.push(violation(Axiom::InverseInvolution, vec![g, gi], "inv(inv(g)) != g".into()));
            }
            if self.composite(g, gi) != Some(self.unit(self.rng(g))) {
                out.push(violation(
                    Axiom::InverseComposition,
                    vec![g, gi],
                    "g inv(g) != unit(rng(g))".into(),
                ));
            }
            if self.composite(gi, g) != Some(self.unit(self.src(g))) {
                out.push(violation(
                    Axiom::InverseComposition,
                    vec![gi, g],
                    "inv(g) g != unit(src(g))".into(),
                ));
            }
        }

        for x in self.objects() {
            let e = self.unit(x);
            if self.src(e) != x || self.rng(e) != x {
                out.push(violation(
                    Axiom::UnitEndpoints,
                    vec![e],
                    format!("unit of object {} does not start and end there", self.object_label(x)),
                ));
                continue;
            }
            for &g in self.range_fiber(x) {
                if self.composite(e, g) != Some(g) {
                    out.push(violation(Axiom::UnitNeutral, vec![e, g], "unit not neutral on the left".into()));
                }
            }
            for &g in self.source_fiber(x) {
                if self.composite(g, e) != Some(g) {
                    out.push(violation(Axiom::UnitNeutral, vec![g, e], "unit not neutral on the right".into()));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow(g: &FiniteGroupoid, label: &str) -> ArrowId {
        g.find_arrow(label).unwrap()
    }

    #[test]
    fn standard_builders_validate() {
        assert!(FiniteGroupoid::transitive(3).validate().is_empty());
        let z2 = FiniteGroupoid::cyclic_group(2);
        assert!(z2.validate().is_empty());
    }

    #[test]
    fn corrupted_range_is_reported() {
        let t2 = FiniteGroupoid::transitive(2);
        let a = arrow(&t2, "(0,1)");
        let b = arrow(&t2, "(1,0)");
        let u1 = t2.unit(ObjectId(1));
        let comp = t2
            .composition_entries()
            .map(|(l, r, c)| if (l, r) == (a, b) { (l, r, u1) } else { (l, r, c) });
        let broken = FiniteGroupoid::from_parts(
            t2.objects.clone(),
            t2.arrows.clone(),
            comp,
            t2.inv.clone(),
            t2.units.clone(),
        )
        .unwrap();
        let v = broken.validate();
        assert!(!v.is_empty());
        assert!(v.iter().any(|v| v.axiom == Axiom::RangeMismatch && v.message.starts_with("range mismatch")));
    }

    #[test]
    fn compose_pair_groupoid() {
        let t3 = FiniteGroupoid::transitive(3);
        let c = t3.compose(arrow(&t3, "(0,1)"), arrow(&t3, "(1,2)")).unwrap();
        assert_eq!(t3.arrow_label(c), "(0,2)");
        let err = t3.compose(arrow(&t3, "(0,1)"), arrow(&t3, "(2,0)")).unwrap_err();
        assert!(matches!(err, Error::NotComposable { .. }));
    }

    #[test]
    fn compose_in_z2() {
        let z2 = FiniteGroupoid::cyclic_group(2);
        let g = arrow(&z2, "g1");
        assert_eq!(z2.compose(g, g).unwrap(), arrow(&z2, "g0"));
    }

    #[test]
    fn fibers_and_orbits() {
        let t3 = FiniteGroupoid::transitive(3);
        assert_eq!(t3.range_fiber(ObjectId(0)).len(), 3);
        assert_eq!(t3.source_fiber(ObjectId(2)).len(), 3);
        let u = FiniteGroupoid::disjoint_union(&[FiniteGroupoid::transitive(2), FiniteGroupoid::transitive(1)]);
        assert_eq!(u.orbits().len(), 2);
    }
}
