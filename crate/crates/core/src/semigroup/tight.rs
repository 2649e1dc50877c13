//! Exhaustive tightness check for finite semilattice representations.
//!
//! A representation `β` is tight when for all finite `X, Y ⊆ E` and every
//! cover `Z` of `E^{X,Y} = {z : z ≤ x ∀x ∈ X, z ⊥ y ∀y ∈ Y}`,
//! `⋁ β(Z) = ⋀ β(X) ∧ ⋀ ¬β(Y)`.
//!
//! The search space is reduced without losing counterexamples:
//!
//! * `X` only matters through its meet `m`, so `X` ranges over `∅` and the
//!   singletons.
//! * With `X = {m}`, each `y` can be replaced by `y ∧ m`, zero entries
//!   dropped, and `Y` replaced by its maximal elements, so `Y` ranges over
//!   antichains below `m`.
//! * `⋁ β(Z) ≤ RHS` holds for every `Z ⊆ E^{X,Y}`, and the left side is
//!   monotone in `Z`. A cover missing a point `ω` of the right side exists
//!   iff `Z_ω = {z ∈ E^{X,Y} : ω ∉ β(z)}` is itself a cover.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::{Semilattice, SemilatticeRep};

/// Default cap on the number of semilattice elements.
pub const DEFAULT_TIGHT_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightViolation {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    /// A point of the right-hand side missed by `⋁ β(Z)`.
    pub missed_point: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightReport {
    pub tight: bool,
    pub counterexample: Option<TightViolation>,
}

type Mask = u64;

fn members(mask: Mask) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1 << i) != 0)
}

/// Exhaustive tightness check. Fails with `TooLarge` beyond `cap`
/// elements (at most 64).
pub fn is_tight_semilattice(beta: &SemilatticeRep, cap: usize) -> Result<TightReport> {
    let e = beta.source();
    let n = e.len();
    if n > cap.min(64) {
        return Err(Error::TooLarge { size: n, cap: cap.min(64) });
    }
    // `None` stands for X = ∅.
    let xs: Vec<Option<usize>> = std::iter::once(None).chain((0..n).map(Some)).collect();
    let found: Vec<TightViolation> = xs
        .par_iter()
        .filter_map(|&m| check_x(beta, e, m))
        .collect();
    // par_iter preserves order on collect; the first entry is the first X.
    let counterexample = found.into_iter().next();
    Ok(TightReport { tight: counterexample.is_none(), counterexample })
}

fn check_x(beta: &SemilatticeRep, e: &Semilattice, m: Option<usize>) -> Option<TightViolation> {
    let n = e.len();
    let zero = e.zero();
    let below_m = |z: usize| m.is_none_or(|m| e.leq(z, m));

    // Candidate members of Y: nonzero, reduced below m, deduplicated.
    let mut cands: Vec<usize> = (0..n)
        .map(|y| m.map_or(y, |m| e.meet(y, m)))
        .filter(|&y| y != zero)
        .collect();
    cands.sort_unstable();
    cands.dedup();

    let rhs_base = match m {
        Some(m) => beta.image(m).clone(),
        None => crate::bitset::BitSet::full(beta.universe()),
    };

    let mut result = None;
    let mut chosen = Vec::new();
    antichains(e, &cands, 0, &mut chosen, &mut |ys: &[usize]| {
        let f: Vec<usize> = (0..n).filter(|&z| below_m(z) && ys.iter().all(|&y| e.orthogonal(z, y))).collect();
        let mut rhs = rhs_base.clone();
        for &y in ys {
            rhs = rhs.difference(beta.image(y));
        }
        let mut seen: HashSet<Mask> = HashSet::new();
        for w in rhs.iter() {
            let z_mask: Mask = f
                .iter()
                .filter(|&&z| !beta.image(z).contains(w))
                .fold(0, |acc, &z| acc | (1 << z));
            if !seen.insert(z_mask) {
                continue;
            }
            if is_cover(e, &f, z_mask) {
                result = Some(TightViolation {
                    x: m.into_iter().collect(),
                    y: ys.to_vec(),
                    z: members(z_mask).collect(),
                    missed_point: w,
                });
                return true;
            }
        }
        false
    });
    result
}

/// Whether every nonzero element of `f` meets some element of `z_mask`.
fn is_cover(e: &Semilattice, f: &[usize], z_mask: Mask) -> bool {
    f.iter()
        .filter(|&&x| x != e.zero())
        .all(|&x| members(z_mask).any(|z| !e.orthogonal(z, x)))
}

/// Calls `visit` on every antichain of `cands` (including the empty one);
/// stops early when `visit` returns true. Returns whether it stopped.
fn antichains(
    e: &Semilattice,
    cands: &[usize],
    start: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if visit(chosen) {
        return true;
    }
    for i in start..cands.len() {
        let c = cands[i];
        if chosen.iter().all(|&a| !e.leq(a, c) && !e.leq(c, a)) {
            chosen.push(c);
            let stop = antichains(e, cands, i + 1, chosen, visit);
            chosen.pop();
            if stop {
                return true;
            }
        }
    }
    false
}
