//! Bratteli diagrams, multiplicities, level groupoids and the spatial AF
//! tower `M_{n_0}^p ⊕ … ⊕ M_{n_{l-1}}^p → …`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::AlgebraElement;
use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid};
use crate::linalg::{op_norm, LpOperator, Matrix, NormConfig};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub multiplicity: usize,
}

/// A finite Bratteli diagram. `edges[k]` joins level `k` to level `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BratteliDiagram {
    levels: Vec<Vec<String>>,
    edges: Vec<Vec<Edge>>,
}

/// `{"levels": [["v0"], ["a", "b"]], "edges": [[["v0", "a", 1], ["v0", "b", 1]]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BratteliFile {
    pub levels: Vec<Vec<String>>,
    pub edges: Vec<Vec<(String, String, usize)>>,
}

impl BratteliDiagram {
    pub fn new(levels: Vec<Vec<String>>, edges: Vec<Vec<Edge>>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParams(format!("invalid Bratteli diagram: {m}")));
        if levels.first().map(Vec::len) != Some(1) {
            return bad("level 0 must be a single root".into());
        }
        if edges.len() + 1 != levels.len() {
            return bad(format!("{} levels need {} edge sets, got {}", levels.len(), levels.len() - 1, edges.len()));
        }
        for (k, level) in levels.iter().enumerate() {
            let mut seen = std::collections::BTreeSet::new();
            if level.is_empty() || level.iter().any(|v| !seen.insert(v)) {
                return bad(format!("level {k} is empty or repeats a vertex"));
            }
        }
        for (k, es) in edges.iter().enumerate() {
            let mut fed = vec![false; levels[k + 1].len()];
            for e in es {
                if e.from >= levels[k].len() || e.to >= levels[k + 1].len() || e.multiplicity == 0 {
                    return bad(format!("edge {e:?} at level {k} is out of range or has multiplicity 0"));
                }
                fed[e.to] = true;
            }
            if let Some(v) = fed.iter().position(|&f| !f) {
                return bad(format!("vertex {} at level {} receives no edge", levels[k + 1][v], k + 1));
            }
        }
        Ok(Self { levels, edges })
    }

    pub fn from_file(file: &BratteliFile) -> Result<Self> {
        let mut edges = Vec::with_capacity(file.edges.len());
        for (k, es) in file.edges.iter().enumerate() {
            let find = |level: usize, name: &str| -> Result<usize> {
                file.levels
                    .get(level)
                    .and_then(|l| l.iter().position(|v| v == name))
                    .ok_or_else(|| Error::Unknown { kind: "vertex", name: format!("{name} at level {level}") })
            };
            edges.push(
                es.iter()
                    .map(|(u, v, m)| Ok(Edge { from: find(k, u)?, to: find(k + 1, v)?, multiplicity: *m }))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Self::new(file.levels.clone(), edges)
    }

    pub fn to_file(&self) -> BratteliFile {
        BratteliFile {
            levels: self.levels.clone(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(k, es)| {
                    es.iter()
                        .map(|e| (self.levels[k][e.from].clone(), self.levels[k + 1][e.to].clone(), e.multiplicity))
                        .collect()
                })
                .collect(),
        }
    }

    /// Two vertices per level with edge matrix `[[1, 1], [1, 0]]`.
    pub fn fibonacci(num_levels: usize) -> Self {
        let mut levels = vec![vec!["r".to_string()]];
        let mut edges = Vec::new();
        for k in 1..num_levels {
            levels.push(vec![format!("a{k}"), format!("b{k}")]);
            edges.push(if k == 1 {
                vec![Edge { from: 0, to: 0, multiplicity: 1 }, Edge { from: 0, to: 1, multiplicity: 1 }]
            } else {
                vec![
                    Edge { from: 0, to: 0, multiplicity: 1 },
                    Edge { from: 1, to: 0, multiplicity: 1 },
                    Edge { from: 0, to: 1, multiplicity: 1 },
                ]
            });
        }
        Self::new(levels, edges).expect("well formed")
    }

    /// One vertex per level joined by `n` edges: the UHF diagram `n^∞`.
    pub fn uhf(n: usize, num_levels: usize) -> Self {
        assert!(n >= 1);
        let levels = (0..num_levels).map(|k| vec![format!("v{k}")]).collect();
        let edges = (1..num_levels).map(|_| vec![Edge { from: 0, to: 0, multiplicity: n }]).collect();
        Self::new(levels, edges).expect("well formed")
    }

    /// One vertex per level joined by a single edge.
    pub fn chain(num_levels: usize) -> Self {
        Self::uhf(1, num_levels)
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> Result<&[String]> {
        self.levels.get(k).map(Vec::as_slice).ok_or(Error::LevelOutOfRange { level: k, levels: self.levels.len() })
    }

    pub fn edges(&self, k: usize) -> Result<&[Edge]> {
        self.edges
            .get(k)
            .map(Vec::as_slice)
            .ok_or(Error::LevelOutOfRange { level: k + 1, levels: self.levels.len() })
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k < self.levels.len() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange { level: k, levels: self.levels.len() })
        }
    }

    /// `n_v(k+1) = Σ_u mult(u → v) n_u(k)`, with the root of multiplicity 1.
    pub fn multiplicities(&self, k: usize) -> Result<Vec<usize>> {
        self.check_level(k)?;
        let mut n = vec![1];
        for (level, es) in self.edges[..k].iter().enumerate() {
            let mut next = vec![0; self.levels[level + 1].len()];
            for e in es {
                next[e.to] += e.multiplicity * n[e.from];
            }
            n = next;
        }
        Ok(n)
    }

    /// Paths from the root to each vertex of level `k`, in embedding order:
    /// grouped by their last edge (edge list order, copies consecutive),
    /// then by the order at the previous level.
    pub fn paths(&self, k: usize) -> Result<Vec<Vec<String>>> {
        self.check_level(k)?;
        let mut paths = vec![vec![self.levels[0][0].clone()]];
        for (level, es) in self.edges[..k].iter().enumerate() {
            let mut count: HashMap<(usize, usize), usize> = HashMap::new();
            for e in es {
                *count.entry((e.from, e.to)).or_default() += e.multiplicity;
            }
            let mut copy: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = vec![Vec::new(); self.levels[level + 1].len()];
            for e in es {
                for _ in 0..e.multiplicity {
                    let c = copy.entry((e.from, e.to)).or_default();
                    let name = &self.levels[level + 1][e.to];
                    let step = if count[&(e.from, e.to)] > 1 { format!("{name}#{c}") } else { name.clone() };
                    *c += 1;
                    for p in &paths[e.from] {
                        next[e.to].push(format!("{p}/{step}"));
                    }
                }
            }
            paths = next;
        }
        Ok(paths)
    }
}

/// `⊔_v T_{n_v}` at level `k`, objects labelled by paths.
pub fn level_groupoid(diagram: &BratteliDiagram, k: usize) -> Result<FiniteGroupoid> {
    let paths = diagram.paths(k)?;
    let parts: Vec<FiniteGroupoid> = paths.iter().map(|p| FiniteGroupoid::transitive(p.len())).collect();
    FiniteGroupoid::disjoint_union(&parts).with_object_labels(paths.into_iter().flatten().collect())
}

/// An element of `⊕_v M_{n_v}` at one level of the tower.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerElement<T> {
    level: usize,
    blocks: Vec<Matrix<T>>,
}

impl<T: Real> TowerElement<T> {
    pub fn new(diagram: &BratteliDiagram, level: usize, blocks: Vec<Matrix<T>>) -> Result<Self> {
        let n = diagram.multiplicities(level)?;
        if blocks.len() != n.len() || blocks.iter().zip(&n).any(|(b, &m)| b.shape() != (m, m)) {
            return Err(Error::ShapeMismatch(format!("level {level} needs square blocks of sizes {n:?}")));
        }
        Ok(Self { level, blocks })
    }

    pub fn identity(diagram: &BratteliDiagram, level: usize) -> Result<Self> {
        let n = diagram.multiplicities(level)?;
        Ok(Self { level, blocks: n.into_iter().map(Matrix::identity).collect() })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn blocks(&self) -> &[Matrix<T>] {
        &self.blocks
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { expected: self.level, found: other.level });
        }
        Ok(Self { level: self.level, blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect() })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        (self.level == other.level)
            .then(|| self.blocks.iter().zip(&other.blocks).fold(T::zero(), |m, (a, b)| m.max(a.max_abs_diff(b))))
    }

    /// The element of `C(G_k)` for `G_k = level_groupoid(diagram, k)`:
    /// `f((i, j))` in part `v` is entry `(i, j)` of block `v`.
    pub fn to_element(&self, g: &Arc<FiniteGroupoid>) -> Result<AlgebraElement<T>> {
        let total: usize = self.blocks.iter().map(|b| b.rows() * b.rows()).sum();
        if total != g.num_arrows() {
            return Err(Error::ShapeMismatch("groupoid is not the level groupoid of this element".into()));
        }
        let mut coeffs = Vec::with_capacity(total);
        for b in &self.blocks {
            for i in 0..b.rows() {
                coeffs.extend_from_slice(b.row(i));
            }
        }
        AlgebraElement::from_coeffs(g, coeffs)
    }
}

/// The multiplicity embedding of level `k` into level `k + 1`.
pub fn embed<T: Real>(diagram: &BratteliDiagram, a: &TowerElement<T>) -> Result<TowerElement<T>> {
    let k = a.level;
    let es = diagram.edges(k)?;
    let mut incoming: BTreeMap<usize, Vec<Matrix<T>>> = BTreeMap::new();
    for e in es {
        for _ in 0..e.multiplicity {
            incoming.entry(e.to).or_default().push(a.blocks[e.from].clone());
        }
    }
    let blocks = incoming.into_values().map(|bs| Matrix::block_diagonal(&bs)).collect();
    TowerElement::new(diagram, k + 1, blocks)
}

/// `max_v ‖a_v‖_{p→p}` on unweighted `ℓ^p(n_v)`, blocks in parallel.
pub fn af_norm<T: Real>(a: &TowerElement<T>, p: T, cfg: &NormConfig) -> Result<T> {
    let norms = a
        .blocks
        .par_iter()
        .map(|b| Ok(op_norm(&LpOperator::unweighted(b.clone(), p)?, cfg)?.value))
        .collect::<Result<Vec<T>>>()?;
    Ok(norms.into_iter().fold(T::zero(), T::max))
}

/// Arrow `(i, j)` of part `v` in [`level_groupoid`].
pub fn level_arrow(g: &FiniteGroupoid, vertex: usize, i: usize, j: usize) -> Result<ArrowId> {
    g.find_arrow(&format!("{vertex}:({i},{j})"))
}
