use std::collections::BTreeSet;

use super::{Arrow, ArrowId, FiniteGroupoid, ObjectId};
use crate::error::{Error, Result};

/// Parameters for [`FiniteGroupoid::build_standard`].
#[derive(Clone, Debug)]
pub enum Kind {
    /// The pair groupoid `T_n` on `n` objects.
    Transitive { n: usize },
    /// A one-object groupoid from a group multiplication table,
    /// `table[a][b] = a·b`.
    FiniteGroup { table: Vec<Vec<usize>>, labels: Option<Vec<String>> },
    DisjointUnion(Vec<FiniteGroupoid>),
    /// `G|_U`: arrows with source and range in `objects`.
    Restriction { groupoid: FiniteGroupoid, objects: Vec<ObjectId> },
}

impl FiniteGroupoid {
    pub fn build_standard(kind: Kind) -> Result<Self> {
        match kind {
            Kind::Transitive { n } => {
                if n == 0 {
                    return Err(Error::InvalidParams("transitive groupoid needs n >= 1".into()));
                }
                Ok(Self::transitive(n))
            }
            Kind::FiniteGroup { table, labels } => Self::finite_group(&table, labels),
            Kind::DisjointUnion(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidParams("disjoint union of nothing".into()));
                }
                Ok(Self::disjoint_union(&parts))
            }
            Kind::Restriction { groupoid, objects } => groupoid.restrict(&objects),
        }
    }

    /// Pair groupoid on `n` objects with arrows `(i,j)` from `j` to `i`.
    pub fn transitive(n: usize) -> Self {
        assert!(n >= 1, "transitive groupoid needs n >= 1");
        let objects = (0..n).map(|i| i.to_string()).collect();
        let idx = |i: usize, j: usize| ArrowId(i * n + j);
        let mut arrows = Vec::with_capacity(n * n);
        let mut inv = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                arrows.push(Arrow { label: format!("({i},{j})"), src: ObjectId(j), rng: ObjectId(i) });
                inv.push(idx(j, i));
            }
        }
        let comp = (0..n).flat_map(move |i| {
            (0..n).flat_map(move |j| (0..n).map(move |k| (idx(i, j), idx(j, k), idx(i, k))))
        });
        let units = (0..n).map(|i| idx(i, i)).collect();
        Self::from_parts(objects, arrows, comp, inv, units).expect("pair groupoid tables are well formed")
    }

    /// `n` objects and nothing but their units.
    pub fn objects_only(n: usize) -> Self {
        assert!(n >= 1);
        let objects = (0..n).map(|i| i.to_string()).collect();
        let arrows = (0..n)
            .map(|i| Arrow { label: format!("({i},{i})"), src: ObjectId(i), rng: ObjectId(i) })
            .collect();
        let comp = (0..n).map(|i| (ArrowId(i), ArrowId(i), ArrowId(i)));
        let ids: Vec<_> = (0..n).map(ArrowId).collect();
        Self::from_parts(objects, arrows, comp, ids.clone(), ids).expect("well formed")
    }

    /// The cyclic group `Z/n` with elements `g0..g{n-1}`.
    pub fn cyclic_group(n: usize) -> Self {
        assert!(n >= 1);
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect::<Vec<Vec<_>>>();
        Self::finite_group(&table, None).expect("cyclic table is a group")
    }

    /// One-object groupoid from a multiplication table.
    pub fn finite_group(table: &[Vec<usize>], labels: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        let bad = |m: &str| Err(Error::InvalidParams(format!("not a group table: {m}")));
        if n == 0 {
            return bad("empty");
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&c| c >= n)) {
            return bad("table must be square with entries in range");
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| format!("g{i}")).collect());
        if labels.len() != n || labels.iter().collect::<BTreeSet<_>>().len() != n {
            return bad("labels must be distinct and match the table size");
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("not associative");
                    }
                }
            }
        }
        let Some(e) = (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a)) else {
            return bad("no identity");
        };
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == e && table[b][a] == e) {
                Some(b) => inv.push(ArrowId(b)),
                None => return bad("missing inverse"),
            }
        }
        let arrows = labels
            .into_iter()
            .map(|label| Arrow { label, src: ObjectId(0), rng: ObjectId(0) })
            .collect();
        let comp = (0..n).flat_map(|a| (0..n).map(move |b| (ArrowId(a), ArrowId(b), ArrowId(table[a][b]))));
        Self::from_parts(vec!["pt".into()], arrows, comp, inv, vec![ArrowId(e)])
    }

    /// Disjoint union; labels are prefixed with the index of their part.
    pub fn disjoint_union(parts: &[FiniteGroupoid]) -> Self {
        assert!(!parts.is_empty());
        let mut objects = Vec::new();
        let mut arrows = Vec::new();
        let mut comp = Vec::new();
        let mut inv = Vec::new();
        let mut units = Vec::new();
        for (k, g) in parts.iter().enumerate() {
            let (o0, a0) = (objects.len(), arrows.len());
            objects.extend(g.objects.iter().map(|o| format!("{k}:{o}")));
            arrows.extend(g.arrows.iter().map(|a| Arrow {
                label: format!("{k}:{}", a.label),
                src: ObjectId(a.src.0 + o0),
                rng: ObjectId(a.rng.0 + o0),
            }));
            comp.extend(
                g.composition_entries()
                    .map(|(l, r, c)| (ArrowId(l.0 + a0), ArrowId(r.0 + a0), ArrowId(c.0 + a0))),
            );
            inv.extend(g.inv.iter().map(|a| ArrowId(a.0 + a0)));
            units.extend(g.units.iter().map(|a| ArrowId(a.0 + a0)));
        }
        Self::from_parts(objects, arrows, comp, inv, units).expect("union of well formed parts")
    }

    /// The same groupoid with new object labels.
    pub fn with_object_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_objects() {
            return Err(Error::InvalidParams(format!("{} labels for {} objects", labels.len(), self.num_objects())));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidParams("object labels must be distinct".into()));
        }
        self.objects = labels;
        Ok(self)
    }

    /// The restriction `G|_U` to a nonempty set of objects.
    pub fn restrict(&self, objects: &[ObjectId]) -> Result<Self> {
        let keep: BTreeSet<ObjectId> = objects.iter().copied().collect();
        if keep.is_empty() {
            return Err(Error::InvalidParams("restriction to the empty set".into()));
        }
        if let Some(x) = keep.iter().find(|x| x.0 >= self.num_objects()) {
            return Err(Error::Unknown { kind: "object", name: x.to_string() });
        }
        let obj_map: Vec<Option<ObjectId>> = {
            let mut m = vec![None; self.num_objects()];
            for (i, x) in keep.iter().enumerate() {
                m[x.0] = Some(ObjectId(i));
            }
            m
        };
        let mut arr_map = vec![None; self.num_arrows()];
        let mut arrows = Vec::new();
        for a in self.arrows() {
            let rec = self.arrow(a);
            if let (Some(s), Some(r)) = (obj_map[rec.src.0], obj_map[rec.rng.0]) {
                arr_map[a.0] = Some(ArrowId(arrows.len()));
                arrows.push(Arrow { label: rec.label.clone(), src: s, rng: r });
            }
        }
        let comp: Vec<_> = self
            .composition_entries()
            .filter_map(|(l, r, c)| Some((arr_map[l.0]?, arr_map[r.0]?, arr_map[c.0]?)))
            .collect();
        let inv = self
            .arrows()
            .filter(|a| arr_map[a.0].is_some())
            .map(|a| arr_map[self.inverse(a).0].expect("inverse stays inside a restriction"))
            .collect();
        let units = keep.iter().map(|x| arr_map[self.unit(*x).0].expect("unit kept")).collect();
        let labels = keep.iter().map(|x| self.object_label(*x).to_string()).collect();
        Self::from_parts(labels, arrows, comp, inv, units)
    }

    /// The amplification `n × G × n`.
    ///
    /// Object `(x, j)` has index `j·|G⁰| + x`; arrow `(i, γ, j)` has index
    /// `(i·|G| + γ)·n + j`, runs from `(s(γ), j)` to `(r(γ), i)`.
    pub fn amplify(&self, n: usize) -> Self {
        assert!(n >= 1, "amplification needs n >= 1");
        let (no, na) = (self.num_objects(), self.num_arrows());
        let obj = |x: ObjectId, j: usize| ObjectId(j * no + x.0);
        let arr = |i: usize, g: ArrowId, j: usize| ArrowId((i * na + g.0) * n + j);
        let mut objects = Vec::with_capacity(no * n);
        for j in 0..n {
            for x in self.objects() {
                objects.push(format!("({},{j})", self.object_label(x)));
            }
        }
        let mut arrows = Vec::with_capacity(na * n * n);
        let mut inv = Vec::with_capacity(na * n * n);
        for i in 0..n {
            for g in self.arrows() {
                for j in 0..n {
                    arrows.push(Arrow {
                        label: format!("({i},{},{j})", self.arrow_label(g)),
                        src: obj(self.src(g), j),
                        rng: obj(self.rng(g), i),
                    });
                    inv.push(arr(j, self.inverse(g), i));
                }
            }
        }
        let mut comp = Vec::new();
        for (l, r, c) in self.composition_entries() {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        comp.push((arr(i, l, j), arr(j, r, k), arr(i, c, k)));
                    }
                }
            }
        }
        let mut units = Vec::with_capacity(no * n);
        for j in 0..n {
            for x in self.objects() {
                units.push(arr(j, self.unit(x), j));
            }
        }
        Self::from_parts(objects, arrows, comp, inv, units).expect("amplification tables are well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitive_counts() {
        let t3 = FiniteGroupoid::transitive(3);
        assert_eq!(t3.num_objects(), 3);
        assert_eq!(t3.num_arrows(), 9);
    }

    #[test]
    fn group_from_table() {
        let g = FiniteGroupoid::build_standard(Kind::FiniteGroup { table: vec![vec![0, 1], vec![1, 0]], labels: None })
            .unwrap();
        assert_eq!((g.num_objects(), g.num_arrows()), (1, 2));
        assert!(g.is_valid());
    }

    #[test]
    fn non_group_table_rejected() {
        let err = FiniteGroupoid::finite_group(&[vec![0, 0], vec![0, 1]], None).unwrap_err();
        assert!(matches!(err, Error::InvalidParams(_)));
        assert!(FiniteGroupoid::finite_group(&[vec![0, 1], vec![1, 1]], None).is_err());
    }

    #[test]
    fn restriction_of_t3_is_t2() {
        let t3 = FiniteGroupoid::transitive(3);
        let r = FiniteGroupoid::build_standard(Kind::Restriction {
            groupoid: t3,
            objects: vec![ObjectId(0), ObjectId(1)],
        })
        .unwrap();
        assert!(r.is_valid());
        assert_eq!((r.num_objects(), r.num_arrows()), (2, 4));
        let t2 = FiniteGroupoid::transitive(2);
        for a in t2.arrows() {
            let b = r.find_arrow(t2.arrow_label(a)).unwrap();
            assert_eq!(r.src(b).0, t2.src(a).0);
            assert_eq!(r.rng(b).0, t2.rng(a).0);
        }
    }

    #[test]
    fn amplify_trivial_group_is_pair_groupoid() {
        let trivial = FiniteGroupoid::cyclic_group(1);
        let a = trivial.amplify(2);
        assert!(a.is_valid());
        assert_eq!((a.num_objects(), a.num_arrows()), (2, 4));
        assert_eq!(a.orbits().len(), 1);
        for g in a.arrows() {
            let same = a.arrows().filter(|&h| a.src(h) == a.src(g) && a.rng(h) == a.rng(g)).count();
            assert_eq!(same, 1);
        }
    }

    #[test]
    fn amplify_counts() {
        let z2 = FiniteGroupoid::cyclic_group(2);
        assert_eq!(z2.amplify(3).num_arrows(), 18);
        let t2 = FiniteGroupoid::transitive(2);
        let a1 = t2.amplify(1);
        assert!(a1.is_valid());
        assert_eq!(a1.num_arrows(), 4);
    }

    #[test]
    fn objects_only_is_valid() {
        let g = FiniteGroupoid::objects_only(3);
        assert!(g.is_valid());
        assert_eq!(g.orbits().len(), 3);
    }
}
