//! Finite inverse semigroups, semilattices of idempotents and tight
//! representations.

mod semilattice;
mod spatial;
mod tight;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use semilattice::{Semilattice, SemilatticeRep};
pub use spatial::{is_tight_spatial, rho_from_pi, SpatialSemigroupRep, TightSpatialReport, TightSpatialViolation};
pub use tight::{is_tight_semilattice, TightReport, TightViolation, DEFAULT_TIGHT_CAP};

/// A finite inverse semigroup given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteInverseSemigroup {
    labels: Vec<String>,
    mul: Vec<Vec<usize>>,
    star: Vec<usize>,
    zero: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SemigroupReport {
    pub violations: Vec<String>,
    pub idempotents: Vec<usize>,
}

/// Serialized form: `{"elements": [...], "mul": [[...]], "star": [...], "zero": id}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemigroupFile {
    pub elements: Vec<String>,
    pub mul: Vec<Vec<String>>,
    pub star: Vec<String>,
    #[serde(default)]
    pub zero: Option<String>,
}

impl FiniteInverseSemigroup {
    /// Checks table shapes only; the axioms are checked by [`Self::validate`].
    pub fn from_parts(labels: Vec<String>, mul: Vec<Vec<usize>>, star: Vec<usize>, zero: Option<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidParams("empty semigroup".into()));
        }
        if mul.len() != n || mul.iter().any(|r| r.len() != n || r.iter().any(|&c| c >= n)) {
            return Err(Error::InvalidParams("multiplication table must be n x n with entries < n".into()));
        }
        if star.len() != n || star.iter().any(|&s| s >= n) {
            return Err(Error::InvalidParams("star table must have n entries < n".into()));
        }
        if zero.is_some_and(|z| z >= n) {
            return Err(Error::InvalidParams("zero out of range".into()));
        }
        Ok(Self { labels, mul, star, zero })
    }

    /// A group table with star = group inverse.
    pub fn from_group_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        let e = (0..n)
            .find(|&e| (0..n).all(|a| table[e].get(a) == Some(&a)))
            .ok_or_else(|| Error::InvalidParams("no identity".into()))?;
        let star = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == e).ok_or_else(|| Error::InvalidParams("no inverse".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts((0..n).map(|i| format!("g{i}")).collect(), table, star, None)
    }

    pub fn from_file(file: &SemigroupFile) -> Result<Self> {
        let index = |s: &str| {
            file.elements
                .iter()
                .position(|e| e == s)
                .ok_or_else(|| Error::Unknown { kind: "element", name: s.to_string() })
        };
        let mul = file
            .mul
            .iter()
            .map(|row| row.iter().map(|s| index(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let star = file.star.iter().map(|s| index(s)).collect::<Result<Vec<_>>>()?;
        let zero = file.zero.as_deref().map(index).transpose()?;
        Self::from_parts(file.elements.clone(), mul, star, zero)
    }

    pub fn to_file(&self) -> SemigroupFile {
        let l = |i: usize| self.labels[i].clone();
        SemigroupFile {
            elements: self.labels.clone(),
            mul: self.mul.iter().map(|r| r.iter().map(|&c| l(c)).collect()).collect(),
            star: self.star.iter().map(|&s| l(s)).collect(),
            zero: self.zero.map(l),
        }
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

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn star(&self, a: usize) -> usize {
        self.star[a]
    }

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn is_idempotent(&self, a: usize) -> bool {
        self.mul[a][a] == a
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&a| self.is_idempotent(a)).collect()
    }

    /// Checks associativity, the inverse laws, uniqueness of inverses and
    /// that the zero is absorbing.
    pub fn validate(&self) -> SemigroupReport {
        let n = self.len();
        let l = |i: usize| self.labels[i].as_str();
        let mut violations: Vec<String> = (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                let mut v = Vec::new();
                for b in 0..n {
                    for c in 0..n {
                        if self.mul[self.mul[a][b]][c] != self.mul[a][self.mul[b][c]] {
                            v.push(format!("associativity fails on ({}, {}, {})", l(a), l(b), l(c)));
                        }
                    }
                }
                v
            })
            .collect();
        for a in 0..n {
            let s = self.star[a];
            if self.mul[self.mul[a][s]][a] != a {
                violations.push(format!("s s* s != s for s = {}", l(a)));
            }
            if self.mul[self.mul[s][a]][s] != s {
                violations.push(format!("s* s s* != s* for s = {}", l(a)));
            }
            for t in 0..n {
                if t != s && self.mul[self.mul[a][t]][a] == a && self.mul[self.mul[t][a]][t] == t {
                    violations.push(format!("{} has two pseudo-inverses: {} and {}", l(a), l(s), l(t)));
                }
            }
        }
        if let Some(z) = self.zero {
            for a in 0..n {
                if self.mul[z][a] != z || self.mul[a][z] != z {
                    violations.push(format!("zero is not absorbing against {}", l(a)));
                }
            }
        }
        SemigroupReport { violations, idempotents: self.idempotents() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Partial injections of {0,1}, encoded as [f(0), f(1)] with 2 = undefined.
    fn symmetric_inverse_monoid_2() -> FiniteInverseSemigroup {
        let mut maps: Vec<[usize; 2]> = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                if a == 2 || b == 2 || a != b {
                    maps.push([a, b]);
                }
            }
        }
        let idx = |m: [usize; 2]| maps.iter().position(|&x| x == m).unwrap();
        let compose = |f: [usize; 2], g: [usize; 2]| {
            let h = |i: usize| if g[i] == 2 { 2 } else { f[g[i]] };
            [h(0), h(1)]
        };
        let inverse = |f: [usize; 2]| {
            let mut r = [2, 2];
            for (i, &v) in f.iter().enumerate() {
                if v != 2 {
                    r[v] = i;
                }
            }
            r
        };
        let mul = maps.iter().map(|&f| maps.iter().map(|&g| idx(compose(f, g))).collect()).collect();
        let star = maps.iter().map(|&f| idx(inverse(f))).collect();
        let labels = maps.iter().map(|m| format!("{m:?}")).collect();
        FiniteInverseSemigroup::from_parts(labels, mul, star, Some(idx([2, 2]))).unwrap()
    }

    #[test]
    fn symmetric_inverse_monoid_is_valid() {
        let s = symmetric_inverse_monoid_2();
        assert_eq!(s.len(), 7);
        let r = s.validate();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.idempotents.len(), 4);
    }

    #[test]
    fn group_is_inverse_semigroup() {
        let table = (0..4).map(|a| (0..4).map(|b| (a + b) % 4).collect()).collect();
        let s = FiniteInverseSemigroup::from_group_table(table).unwrap();
        let r = s.validate();
        assert!(r.violations.is_empty());
        assert_eq!(r.idempotents, vec![0]);
    }

    #[test]
    fn two_pseudo_inverses_reported() {
        // Left-zero band {a, b}: xy = x. Every element is a pseudo-inverse
        // of every other.
        let s = FiniteInverseSemigroup::from_parts(
            vec!["a".into(), "b".into()],
            vec![vec![0, 0], vec![1, 1]],
            vec![0, 1],
            None,
        )
        .unwrap();
        let r = s.validate();
        assert!(r.violations.iter().any(|v| v.contains("two pseudo-inverses")));
    }

    #[test]
    fn file_round_trip() {
        let s = symmetric_inverse_monoid_2();
        let text = serde_json::to_string(&s.to_file()).unwrap();
        let back = FiniteInverseSemigroup::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
