//! The Cuntz inverse semigroup `Σ_d`, Leavitt polynomials, cylinder
//! semilattices, and compressions of the regular representations of the
//! Cuntz groupoid `G_d` giving lower bounds for norms in `O_d^p`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::linalg::{lamperti_decompose, op_norm_with_start, LpOperator, Matrix, NormConfig};
use crate::scalar::{Real, C};
use crate::semigroup::{Semilattice, SemilatticeRep};

pub type Word = Vec<usize>;

/// `0`, or `s_a s_b^*` in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CuntzWord {
    Zero,
    Word { a: Word, b: Word },
}

impl CuntzWord {
    pub fn one() -> Self {
        Self::Word { a: Vec::new(), b: Vec::new() }
    }

    pub fn new(a: Word, b: Word) -> Self {
        Self::Word { a, b }
    }

    /// `s_j`.
    pub fn s(j: usize) -> Self {
        Self::new(vec![j], Vec::new())
    }

    /// `s_j^*`.
    pub fn s_star(j: usize) -> Self {
        Self::new(Vec::new(), vec![j])
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    /// `s_a s_a^*`, `1` and `0`.
    pub fn is_idempotent(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Word { a, b } => a == b,
        }
    }

    /// Longest of `a` and `b`.
    pub fn len(&self) -> usize {
        match self {
            Self::Zero => 0,
            Self::Word { a, b } => a.len().max(b.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest letter plus one.
    pub fn alphabet(&self) -> usize {
        match self {
            Self::Zero => 0,
            Self::Word { a, b } => a.iter().chain(b).map(|&j| j + 1).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for CuntzWord {
    /// `s0 s1 s1'` for `s_{01} s_1^*`; `1` and `0` for the unit and zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "0"),
            Self::Word { a, b } if a.is_empty() && b.is_empty() => write!(f, "1"),
            Self::Word { a, b } => {
                let parts: Vec<String> =
                    a.iter().map(|j| format!("s{j}")).chain(b.iter().rev().map(|j| format!("s{j}'"))).collect();
                write!(f, "{}", parts.join(" "))
            }
        }
    }
}

/// `(s_a s_b^*)(s_c s_e^*)`.
pub fn word_mul(u: &CuntzWord, v: &CuntzWord) -> CuntzWord {
    let (CuntzWord::Word { a, b }, CuntzWord::Word { a: c, b: e }) = (u, v) else {
        return CuntzWord::Zero;
    };
    if let Some(rest) = c.strip_prefix(b.as_slice()) {
        CuntzWord::new([a.as_slice(), rest].concat(), e.clone())
    } else if let Some(rest) = b.strip_prefix(c.as_slice()) {
        CuntzWord::new(a.clone(), [e.as_slice(), rest].concat())
    } else {
        CuntzWord::Zero
    }
}

pub fn word_star(u: &CuntzWord) -> CuntzWord {
    match u {
        CuntzWord::Zero => CuntzWord::Zero,
        CuntzWord::Word { a, b } => CuntzWord::new(b.clone(), a.clone()),
    }
}

/// All words of length at most `n` over `d` letters, shortest first.
pub fn words_up_to(d: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..n {
        level = level
            .iter()
            .flat_map(|w: &Word| (0..d).map(move |j| [w.as_slice(), &[j]].concat()))
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// A finite combination of nonzero Cuntz words.
#[derive(Clone, Debug, PartialEq)]
pub struct LeavittPolynomial<T> {
    d: usize,
    terms: BTreeMap<CuntzWord, C<T>>,
}

impl<T: Real> LeavittPolynomial<T> {
    pub fn zero(d: usize) -> Self {
        Self { d, terms: BTreeMap::new() }
    }

    pub fn one(d: usize) -> Self {
        Self::word(d, CuntzWord::one(), C::new(T::one(), T::zero())).expect("unit is valid")
    }

    /// `coeff · w`. Fails if `w` uses a letter outside the alphabet.
    pub fn word(d: usize, w: CuntzWord, coeff: C<T>) -> Result<Self> {
        Self::from_terms(d, [(w, coeff)])
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (CuntzWord, C<T>)>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("alphabet size must be at least 2, got {d}")));
        }
        let mut out = Self::zero(d);
        for (w, c) in terms {
            if w.alphabet() > d {
                return Err(Error::InvalidParams(format!("word {w} uses a letter outside 0..{d}")));
            }
            out.add_term(w, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, w: CuntzWord, c: C<T>) {
        if w.is_zero() {
            return;
        }
        let e = self.terms.entry(w).or_insert(C::new(T::zero(), T::zero()));
        *e = *e + c;
        let zero = *e == C::new(T::zero(), T::zero());
        if zero {
            self.terms.retain(|_, v| *v != C::new(T::zero(), T::zero()));
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<CuntzWord, C<T>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest word length appearing.
    pub fn max_len(&self) -> usize {
        self.terms.keys().map(CuntzWord::len).max().unwrap_or(0)
    }

    fn check_d(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::InvalidParams(format!("alphabets differ: {} and {}", self.d, other.d)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_d(other)?;
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_d(other)?;
        let mut out = Self::zero(self.d);
        for (u, &a) in &self.terms {
            for (v, &b) in &other.terms {
                out.add_term(word_mul(u, v), a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = Self::zero(self.d);
        for (w, &c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    pub fn star(&self) -> Self {
        let mut out = Self::zero(self.d);
        for (w, &c) in &self.terms {
            out.add_term(word_star(w), c.conj());
        }
        out
    }

    /// `Σ |c_w|`, an upper bound for the norm in every representation.
    pub fn coefficient_sum(&self) -> T {
        self.terms.values().map(|c| c.norm()).sum()
    }
}

impl<T: Real> fmt::Display for LeavittPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({}{:+}i) {w}", c.re, c.im)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The idempotents `{s_a s_a^* : |a| ≤ N} ∪ {0}` with the cylinder
/// representation `β(a) = [a]` on the words of length exactly `N`.
#[derive(Clone, Debug)]
pub struct CuntzSemilattice {
    pub d: usize,
    pub depth: usize,
    /// Element `k + 1` is `s_a s_a^*` for `a = words[k]`; element 0 is zero.
    pub words: Vec<Word>,
    /// The leaves `d^N`, indexing the universe of `beta`.
    pub leaves: Vec<Word>,
    pub beta: SemilatticeRep,
}

impl CuntzSemilattice {
    pub fn index_of(&self, a: &[usize]) -> Option<usize> {
        self.words.iter().position(|w| w == a).map(|k| k + 1)
    }

    /// `β(∅) = 1` and `β(a) ≤ ⋁_j β(a⌢j)` for every `|a| < N`.
    pub fn satisfies_cover_criterion(&self) -> bool {
        let img = |a: &[usize]| self.beta.image(self.index_of(a).expect("word in the semilattice"));
        if img(&[]).count() != self.leaves.len() {
            return false;
        }
        self.words.iter().filter(|a| a.len() < self.depth).all(|a| {
            let children = (0..self.d).fold(BitSet::empty(self.leaves.len()), |acc, j| {
                acc.union(img(&[a.as_slice(), &[j]].concat()))
            });
            img(a).is_subset(&children)
        })
    }
}

pub fn cuntz_semilattice(d: usize, depth: usize) -> Result<CuntzSemilattice> {
    if d < 2 || depth < 1 {
        return Err(Error::InvalidParams(format!("need d ≥ 2 and N ≥ 1, got d = {d}, N = {depth}")));
    }
    let words = words_up_to(d, depth);
    let leaves: Vec<Word> = words.iter().filter(|w| w.len() == depth).cloned().collect();
    let n = words.len() + 1;
    let mut meet = vec![vec![0; n]; n];
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            meet[i + 1][j + 1] = if b.starts_with(a) {
                j + 1
            } else if a.starts_with(b) {
                i + 1
            } else {
                0
            };
        }
    }
    let mut labels = vec!["0".to_string()];
    labels.extend(words.iter().map(|w| {
        let s: String = w.iter().map(|j| j.to_string()).collect();
        if s.is_empty() {
            "∅".to_string()
        } else {
            s
        }
    }));
    let lattice = Semilattice::new(labels, meet, 0)?;
    let mut images = vec![BitSet::empty(leaves.len())];
    images.extend(
        words.iter().map(|a| BitSet::from_indices(leaves.len(), (0..leaves.len()).filter(|&k| leaves[k].starts_with(a)))),
    );
    let beta = SemilatticeRep::new(lattice, leaves.len(), images)?;
    Ok(CuntzSemilattice { d, depth, words, leaves, beta })
}

/// Evaluates `Σ_j ρ(s_j) ρ(s_j)^* = 1` for spatial isometries `ρ(s_j)`.
///
/// Fails with `RelationsViolated` when some `ρ(s_j)` is not a spatial
/// isometry or two ranges overlap. On a nonzero finite-dimensional space
/// `d ≥ 2` isometries always have overlapping ranges, so no such tuple
/// passes.
pub fn tight_identity_check<T: Real>(gens: &[LpOperator<T>]) -> Result<bool> {
    if gens.len() < 2 {
        return Err(Error::InvalidParams("need at least two generators".into()));
    }
    let space = gens[0].dom().clone();
    if gens.iter().any(|g| g.dom() != &space || g.cod() != &space) {
        return Err(Error::SpaceMismatch("generators must act on one space".into()));
    }
    let n = space.dim();
    let mut covered = vec![None; n];
    for (j, g) in gens.iter().enumerate() {
        let s = lamperti_decompose(g, false).map_err(|e| Error::RelationsViolated(format!("ρ(s{j}) is not spatial: {e}")))?;
        let dom = s.domain_support();
        if let Some(k) = (0..n).find(|k| !dom.contains(k)) {
            return Err(Error::RelationsViolated(format!("ρ(s{j}) is not an isometry: it kills e_{k}")));
        }
        for y in s.range_support() {
            if let Some(i) = covered[y] {
                return Err(Error::RelationsViolated(format!("ranges of ρ(s{i}) and ρ(s{j}) overlap at e_{y}")));
            }
            covered[y] = Some(j);
        }
    }
    Ok(covered.iter().all(Option::is_some))
}

/// An eventually periodic point `prefix⌢period⌢period⌢…` of `d^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Basepoint {
    pub prefix: Word,
    pub period: Word,
}

impl Basepoint {
    pub fn new(prefix: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidParams("period must be nonempty".into()));
        }
        Ok(Self { prefix, period })
    }

    /// `j^ω`.
    pub fn constant(j: usize) -> Self {
        Self { prefix: Vec::new(), period: vec![j] }
    }

    pub fn letter(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    fn alphabet(&self) -> usize {
        self.prefix.iter().chain(&self.period).map(|&j| j + 1).max().unwrap_or(0)
    }
}

impl Default for Basepoint {
    fn default() -> Self {
        Self::constant(0)
    }
}

/// Coordinates of the compression of `Ind(x)` to arrows
/// `(c⌢σ^j x, |c| - j, x)` with `|c| + j ≤ N`. Each arrow has a unique
/// canonical pair `(c, j)`: `c` may not end in `x_{j-1}`.
#[derive(Clone, Debug)]
pub struct TruncationRep {
    pub d: usize,
    pub depth: usize,
    pub basepoint: Basepoint,
    coords: Vec<(Word, usize)>,
    index: HashMap<(Word, usize), usize>,
}

impl TruncationRep {
    pub fn new(d: usize, basepoint: Basepoint, depth: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("alphabet size must be at least 2, got {d}")));
        }
        if basepoint.alphabet() > d {
            return Err(Error::InvalidParams("basepoint uses a letter outside the alphabet".into()));
        }
        let mut coords = Vec::new();
        for j in 0..=depth {
            for c in words_up_to(d, depth - j) {
                if j == 0 || c.last() != Some(&basepoint.letter(j - 1)) {
                    coords.push((c, j));
                }
            }
        }
        let index = coords.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Ok(Self { d, depth, basepoint, coords, index })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coordinates(&self) -> &[(Word, usize)] {
        &self.coords
    }

    pub fn index_of(&self, c: &[usize], j: usize) -> Option<usize> {
        self.index.get(&(c.to_vec(), j)).copied()
    }

    /// Image of the arrow `(c, j)` under left translation by `[a, b]`, in
    /// canonical form, or `None` when the arrow is outside `s(A)`.
    fn translate(&self, a: &[usize], b: &[usize], c: &[usize], j: usize) -> Option<(Word, usize)> {
        let x = &self.basepoint;
        let (mut out, mut jj) = if let Some(rest) = c.strip_prefix(b) {
            ([a, rest].concat(), j)
        } else if let Some(tail) = b.strip_prefix(c) {
            if tail.iter().enumerate().any(|(i, &t)| x.letter(j + i) != t) {
                return None;
            }
            (a.to_vec(), j + tail.len())
        } else {
            return None;
        };
        while jj > 0 && out.last() == Some(&x.letter(jj - 1)) {
            out.pop();
            jj -= 1;
        }
        Some((out, jj))
    }

    /// Matrix of left convolution by `f`, compressed to the coordinates.
    pub fn operator<T: Real>(&self, f: &LeavittPolynomial<T>, p: T) -> Result<LpOperator<T>> {
        if f.d() != self.d {
            return Err(Error::InvalidParams(format!("polynomial over {} letters, truncation over {}", f.d(), self.d)));
        }
        if f.max_len() > self.depth {
            return Err(Error::BudgetTooSmall { length: f.max_len(), budget: self.depth });
        }
        let n = self.len();
        let mut m = Matrix::zeros(n, n);
        for (w, &coeff) in f.terms() {
            let CuntzWord::Word { a, b } = w else { continue };
            for (col, (c, j)) in self.coords.iter().enumerate() {
                if let Some(key) = self.translate(a, b, c, *j) {
                    if let Some(&row) = self.index.get(&key) {
                        m[(row, col)] = m[(row, col)] + coeff;
                    }
                }
            }
        }
        LpOperator::unweighted(m, p)
    }
}

/// The compression of `Ind(x) f` to `TruncationRep(d, x, N)`.
pub fn truncated_ind<T: Real>(f: &LeavittPolynomial<T>, x: &Basepoint, depth: usize, p: T) -> Result<LpOperator<T>> {
    TruncationRep::new(f.d(), x.clone(), depth)?.operator(f, p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeavittBounds<T> {
    /// `(N, lower bound)` for each depth, nondecreasing.
    pub lower: Vec<(usize, T)>,
    /// `Σ |c_w|`.
    pub upper: T,
}

/// Lower bounds `max_x ‖compression of Ind(x) f‖` for `N` from the longest
/// word of `f` (at least 1) up to `max_depth`.
///
/// The coordinate sets grow with `N`, so the compressions have
/// nondecreasing norms. Each estimate is warm-started from the previous
/// witness and the reported sequence is the running maximum, which keeps it
/// nondecreasing under rounding.
pub fn leavitt_norm_bounds<T: Real>(
    f: &LeavittPolynomial<T>,
    p: T,
    max_depth: usize,
    basepoints: &[Basepoint],
    cfg: &NormConfig,
) -> Result<LeavittBounds<T>> {
    if basepoints.is_empty() {
        return Err(Error::InvalidParams("no basepoints".into()));
    }
    let first = f.max_len().max(1);
    if max_depth < first {
        return Err(Error::BudgetTooSmall { length: f.max_len(), budget: max_depth });
    }
    let mut lower = Vec::new();
    let mut best = T::zero();
    let mut previous: Vec<Option<(TruncationRep, Vec<C<T>>)>> = vec![None; basepoints.len()];
    for depth in first..=max_depth {
        let results = basepoints
            .par_iter()
            .zip(previous.par_iter())
            .map(|(x, prev)| {
                let rep = TruncationRep::new(f.d(), x.clone(), depth)?;
                let op = rep.operator(f, p)?;
                let start = prev.as_ref().map(|(old, w)| {
                    let mut v = vec![C::new(T::zero(), T::zero()); rep.len()];
                    for (k, (c, j)) in old.coordinates().iter().enumerate() {
                        v[rep.index_of(c, *j).expect("coordinates are nested")] = w[k];
                    }
                    v
                });
                let est = op_norm_with_start(&op, cfg, start.as_deref())?;
                Ok((est.value, rep, est.witness))
            })
            .collect::<Result<Vec<_>>>()?;
        previous = Vec::with_capacity(results.len());
        for (value, rep, witness) in results {
            best = best.max(value);
            previous.push(Some((rep, witness)));
        }
        lower.push((depth, best));
    }
    Ok(LeavittBounds { lower, upper: f.coefficient_sum() })
}
