//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use lpgpd::convolution::AlgebraElement;
use lpgpd::linalg::Matrix;
use lpgpd::{ArrowId, FiniteGroupoid, C};
use nalgebra::DMatrix;

/// `(f ∗ g)(γ)` by summing over every composable pair, ignoring fibers.
pub fn convolve_pairs(f: &AlgebraElement<f64>, g: &AlgebraElement<f64>) -> Vec<C<f64>> {
    let gr = f.groupoid();
    let mut out = vec![C::new(0.0, 0.0); gr.num_arrows()];
    for a in gr.arrows() {
        for b in gr.arrows() {
            if let Some(c) = gr.composite(a, b) {
                out[c.0] += f.coeff(a) * g.coeff(b);
            }
        }
    }
    out
}

/// `max_x max(Σ_{rγ=x} |f(γ)|, Σ_{sγ=x} |f(γ)|)` by scanning all arrows.
pub fn i_norm_scan(f: &AlgebraElement<f64>) -> f64 {
    let gr = f.groupoid();
    let mut best: f64 = 0.0;
    for x in gr.objects() {
        let (mut r, mut s) = (0.0, 0.0);
        for a in gr.arrows() {
            if gr.rng(a) == x {
                r += f.coeff(a).norm();
            }
            if gr.src(a) == x {
                s += f.coeff(a).norm();
            }
        }
        best = best.max(r).max(s);
    }
    best
}

/// `AB = {γρ : γ ∈ A, ρ ∈ B composable}` as a set of arrow indices.
pub fn slice_product_set(g: &FiniteGroupoid, a: &[ArrowId], b: &[ArrowId]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &x in a {
        for &y in b {
            if let Some(z) = g.composite(x, y) {
                out.insert(z.0);
            }
        }
    }
    out
}

fn to_nalgebra(m: &Matrix<f64>) -> DMatrix<C<f64>> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Largest singular value.
pub fn svd_norm(m: &Matrix<f64>) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    to_nalgebra(m).singular_values().iter().copied().fold(0.0, f64::max)
}

fn lp(v: &[C<f64>], p: f64) -> f64 {
    v.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Point of `ℂ^n` from `n - 1` spherical angles and `n - 1` relative phases.
fn point(params: &[f64], n: usize) -> Vec<C<f64>> {
    let (angles, phases) = params.split_at(n - 1);
    let mut mods = vec![1.0; n];
    for (k, &t) in angles.iter().enumerate() {
        for m in mods.iter_mut().skip(k + 1) {
            *m *= t.sin();
        }
        mods[k] *= t.cos();
    }
    (0..n)
        .map(|k| {
            let ph = if k == 0 { 0.0 } else { phases[k - 1] };
            C::from_polar(mods[k], ph)
        })
        .collect()
}

fn ratio(m: &Matrix<f64>, x: &[C<f64>], p: f64) -> f64 {
    let d = lp(x, p);
    if d == 0.0 {
        0.0
    } else {
        lp(&m.mul_vec(x), p) / d
    }
}

/// `‖M‖_{p→p}` on unweighted `ℓ^p(n)`, `n ≤ 3`: a grid over the sphere
/// followed by compass refinement from the best grid points.
pub fn grid_norm(m: &Matrix<f64>, p: f64) -> f64 {
    let n = m.cols();
    assert!((1..=3).contains(&n));
    if n == 1 {
        return ratio(m, &[C::new(1.0, 0.0)], p);
    }
    let dims = 2 * (n - 1);
    let steps = 16usize;
    let spacing: Vec<f64> = (0..dims)
        .map(|k| if k < n - 1 { std::f64::consts::FRAC_PI_2 / (steps - 1) as f64 } else { std::f64::consts::TAU / steps as f64 })
        .collect();
    let mut grid = Vec::new();
    let total = steps.pow(dims as u32);
    for idx in 0..total {
        let mut rest = idx;
        let params: Vec<f64> = (0..dims)
            .map(|k| {
                let i = rest % steps;
                rest /= steps;
                i as f64 * spacing[k]
            })
            .collect();
        grid.push((ratio(m, &point(&params, n), p), params));
    }
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: f64 = grid[0].0;
    for (mut val, mut params) in grid.into_iter().take(12) {
        let mut h: Vec<f64> = spacing.clone();
        while h.iter().any(|&s| s > 1e-10) {
            let mut improved = false;
            for k in 0..dims {
                for sign in [1.0, -1.0] {
                    let mut trial = params.clone();
                    trial[k] += sign * h[k];
                    let v = ratio(m, &point(&trial, n), p);
                    if v > val {
                        val = v;
                        params = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                h.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        best = best.max(val);
    }
    best
}

/// Principal filters `↑m_u` describing a meet-preserving map from the
/// Boolean algebra on `k` atoms: point `u` lies in `β(a)` iff `m_u ⊆ a`.
/// `None` means `u` lies in no image.
pub fn filter_images(k: usize, generators: &[Option<usize>]) -> Vec<Vec<usize>> {
    (0..1usize << k)
        .map(|a| {
            generators
                .iter()
                .enumerate()
                .filter(|(_, m)| m.is_some_and(|m| m & a == m))
                .map(|(u, _)| u)
                .collect()
        })
        .collect()
}

/// Such a map is a Boolean homomorphism iff every point's filter is
/// generated by an atom.
pub fn filters_are_atomic(generators: &[Option<usize>]) -> bool {
    generators.iter().all(|m| m.is_some_and(|m| m.count_ones() == 1))
}

/// Largest singular value by power iteration on `MᴴM`, using only the
/// nonzero entries. A lower bound that converges from below.
pub fn sparse_power_norm(m: &Matrix<f64>, iters: usize) -> f64 {
    let nz: Vec<(usize, usize, C<f64>)> = m.entries().filter(|(_, _, z)| z.norm() > 0.0).collect();
    let mut x = vec![C::new(1.0, 0.0); m.cols()];
    let mut best: f64 = 0.0;
    for _ in 0..iters {
        let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        x.iter_mut().for_each(|z| *z /= nx);
        let mut y = vec![C::new(0.0, 0.0); m.rows()];
        for &(i, j, z) in &nz {
            y[i] += z * x[j];
        }
        best = best.max(y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        let mut back = vec![C::new(0.0, 0.0); m.cols()];
        for &(i, j, z) in &nz {
            back[j] += z.conj() * y[i];
        }
        x = back;
    }
    best
}
