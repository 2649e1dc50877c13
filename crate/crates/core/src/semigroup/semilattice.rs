use crate::bitset::BitSet;
use crate::error::{Error, Result};

use super::FiniteInverseSemigroup;

/// A finite meet-semilattice with a minimum `0`, given by its meet table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semilattice {
    labels: Vec<String>,
    meet: Vec<Vec<usize>>,
    zero: usize,
}

impl Semilattice {
    /// Validates that `meet` is idempotent, commutative, associative and
    /// that `zero` is the minimum.
    pub fn new(labels: Vec<String>, meet: Vec<Vec<usize>>, zero: usize) -> Result<Self> {
        let n = labels.len();
        let bad = |m: String| Err(Error::InvalidParams(format!("not a semilattice: {m}")));
        if n == 0 || zero >= n {
            return bad("empty or zero out of range".into());
        }
        if meet.len() != n || meet.iter().any(|r| r.len() != n || r.iter().any(|&c| c >= n)) {
            return bad("meet table must be n x n".into());
        }
        for a in 0..n {
            if meet[a][a] != a {
                return bad(format!("{} ∧ itself", labels[a]));
            }
            if meet[a][zero] != zero {
                return bad(format!("0 is not below {}", labels[a]));
            }
            for b in 0..n {
                if meet[a][b] != meet[b][a] {
                    return bad("meet not commutative".into());
                }
                for c in 0..n {
                    if meet[meet[a][b]][c] != meet[a][meet[b][c]] {
                        return bad("meet not associative".into());
                    }
                }
            }
        }
        Ok(Self { labels, meet, zero })
    }

    /// The Boolean algebra of subsets of `k` points; element `i` is the
    /// subset with bitmask `i`.
    pub fn boolean_algebra(k: usize) -> Self {
        assert!(k < 16, "boolean algebra too large");
        let n = 1usize << k;
        let labels = (0..n).map(|i| format!("{i:0width$b}", width = k.max(1))).collect();
        let meet = (0..n).map(|a| (0..n).map(|b| a & b).collect()).collect();
        Self { labels, meet, zero: 0 }
    }

    /// The semilattice of idempotents of an inverse semigroup with zero,
    /// together with the element of the semigroup behind each index.
    pub fn of_idempotents(s: &FiniteInverseSemigroup) -> Result<(Self, Vec<usize>)> {
        let zero = s.zero().ok_or_else(|| Error::InvalidParams("semigroup has no zero".into()))?;
        let idem = s.idempotents();
        let pos = |e: usize| idem.iter().position(|&x| x == e);
        let mut meet = Vec::with_capacity(idem.len());
        for &a in &idem {
            let mut row = Vec::with_capacity(idem.len());
            for &b in &idem {
                row.push(pos(s.mul(a, b)).ok_or_else(|| {
                    Error::InvalidParams("product of idempotents is not idempotent".into())
                })?);
            }
            meet.push(row);
        }
        let labels = idem.iter().map(|&e| s.label(e).to_string()).collect();
        let lattice = Self::new(labels, meet, pos(zero).expect("zero is idempotent"))?;
        Ok((lattice, idem))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet[a][b] == a
    }

    pub fn orthogonal(&self, a: usize, b: usize) -> bool {
        self.meet[a][b] == self.zero
    }

    /// Largest element, if there is one.
    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&t| (0..self.len()).all(|a| self.leq(a, t)))
    }

    /// Least upper bound of `a` and `b`, if it exists.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let uppers: Vec<usize> = (0..self.len()).filter(|&u| self.leq(a, u) && self.leq(b, u)).collect();
        uppers.iter().copied().find(|&u| uppers.iter().all(|&v| self.leq(u, v)))
    }

    /// Minimal nonzero elements.
    pub fn atoms(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| a != self.zero && (0..self.len()).all(|b| b == a || b == self.zero || !self.leq(b, a)))
            .collect()
    }

    /// True when `elements` contains zero and is closed under meets.
    pub fn is_subsemilattice(&self, elements: &[usize]) -> bool {
        elements.contains(&self.zero)
            && elements.iter().all(|&a| elements.iter().all(|&b| elements.contains(&self.meet(a, b))))
    }

    /// Every nonzero element dominates a nonzero element of `elements`.
    pub fn is_dense(&self, elements: &[usize]) -> bool {
        (0..self.len())
            .filter(|&x| x != self.zero)
            .all(|x| elements.iter().any(|&y| y != self.zero && self.leq(y, x)))
    }

    /// Restriction to a subsemilattice; returns the index map into `self`.
    pub fn restrict(&self, elements: &[usize]) -> Result<(Self, Vec<usize>)> {
        let mut elems = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if !self.is_subsemilattice(&elems) {
            return Err(Error::InvalidParams("not a subsemilattice".into()));
        }
        let pos = |a: usize| elems.iter().position(|&x| x == a).expect("closed under meets");
        let meet = elems.iter().map(|&a| elems.iter().map(|&b| pos(self.meet(a, b))).collect()).collect();
        let labels = elems.iter().map(|&a| self.labels[a].clone()).collect();
        let sub = Self { labels, meet, zero: pos(self.zero) };
        Ok((sub, elems))
    }
}

/// A representation `β` of a semilattice on the Boolean algebra of subsets
/// of `{0, .., universe - 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilatticeRep {
    source: Semilattice,
    universe: usize,
    images: Vec<BitSet>,
}

impl SemilatticeRep {
    /// Checks `β(a ∧ b) = β(a) ∩ β(b)` and `β(0) = ∅`.
    pub fn new(source: Semilattice, universe: usize, images: Vec<BitSet>) -> Result<Self> {
        if images.len() != source.len() || images.iter().any(|b| b.universe() != universe) {
            return Err(Error::InvalidParams("one image per element, all over the same universe".into()));
        }
        if !images[source.zero()].is_empty() {
            return Err(Error::InvalidParams("β(0) must be empty".into()));
        }
        for a in 0..source.len() {
            for b in 0..source.len() {
                if images[source.meet(a, b)] != images[a].intersection(&images[b]) {
                    return Err(Error::InvalidParams(format!(
                        "β does not preserve the meet of {} and {}",
                        source.label(a),
                        source.label(b)
                    )));
                }
            }
        }
        Ok(Self { source, universe, images })
    }

    pub fn source(&self) -> &Semilattice {
        &self.source
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn image(&self, a: usize) -> &BitSet {
        &self.images[a]
    }

    /// Restriction of `β` to a subsemilattice.
    pub fn restrict(&self, elements: &[usize]) -> Result<Self> {
        let (sub, map) = self.source.restrict(elements)?;
        let images = map.iter().map(|&a| self.images[a].clone()).collect();
        Self::new(sub, self.universe, images)
    }

    /// For a Boolean-algebra source: whether `β` preserves joins,
    /// complements, `0` and `1`. `None` if the source is not Boolean.
    pub fn is_boolean_homomorphism(&self) -> Option<bool> {
        let s = &self.source;
        let top = s.top()?;
        let full = BitSet::full(self.universe);
        let mut ok = self.images[top] == full;
        for a in 0..s.len() {
            let comp = (0..s.len()).find(|&c| s.orthogonal(a, c) && s.join(a, c) == Some(top))?;
            ok &= self.images[comp] == self.images[a].complement();
            for b in 0..s.len() {
                let j = s.join(a, b)?;
                ok &= self.images[j] == self.images[a].union(&self.images[b]);
            }
        }
        Some(ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Semilattice {
        // 0 < e < 1
        Semilattice::new(
            vec!["0".into(), "e".into(), "1".into()],
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]],
            0,
        )
        .unwrap()
    }

    #[test]
    fn boolean_algebra_structure() {
        let b = Semilattice::boolean_algebra(3);
        assert_eq!(b.len(), 8);
        assert_eq!(b.top(), Some(7));
        assert_eq!(b.join(1, 2), Some(3));
        assert_eq!(b.atoms(), vec![1, 2, 4]);
    }

    #[test]
    fn chain_has_no_complements() {
        let c = chain3();
        assert_eq!(c.atoms(), vec![1]);
        let rep = SemilatticeRep::new(
            c,
            1,
            vec![BitSet::empty(1), BitSet::from_indices(1, [0]), BitSet::from_indices(1, [0])],
        )
        .unwrap();
        assert_eq!(rep.is_boolean_homomorphism(), None);
    }

    #[test]
    fn rejects_non_meet_preserving() {
        let b = Semilattice::boolean_algebra(1);
        let err = SemilatticeRep::new(b, 1, vec![BitSet::from_indices(1, [0]), BitSet::full(1)]);
        assert!(err.is_err());
    }

    #[test]
    fn dense_subsemilattice() {
        let b = Semilattice::boolean_algebra(2);
        assert!(b.is_dense(&[0, 1, 2]));
        assert!(!b.is_dense(&[0, 1]));
        let (sub, map) = b.restrict(&[0, 1, 2, 3]).unwrap();
        assert_eq!(sub.len(), 4);
        assert_eq!(map, vec![0, 1, 2, 3]);
        assert!(b.restrict(&[1, 2]).is_err());
    }
}
