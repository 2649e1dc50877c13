mod common;

use lpgpd::linalg::{
    dual_operator, is_hermitian, lamperti_decompose, op_norm, semi_inner_product, spatial_compose, spatial_reverse, LpOperator,
    Matrix, NormConfig, SpatialPartialIsometry, WeightedLpSpace,
};
use lpgpd::sample;
use lpgpd::C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn weighted_op(rng: &mut ChaCha8Rng, rows: usize, cols: usize, p: f64) -> LpOperator<f64> {
    let dom = WeightedLpSpace::new(sample::weights(rng, cols), p).unwrap();
    let cod = WeightedLpSpace::new(sample::weights(rng, rows), p).unwrap();
    LpOperator::new(sample::matrix(rng, rows, cols), dom, cod).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norm_estimate_is_attained_by_its_witness(seed in any::<u64>(), p in 1.1f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let op = weighted_op(&mut rng, r, c, p);
        let est = op_norm(&op, &NormConfig { restarts: 8, ..NormConfig::with_seed(seed) }).unwrap();
        prop_assert!((op.ratio(&est.witness) - est.value).abs() <= 1e-10 * est.value.max(1.0));
        prop_assert!((op.dom().norm(&est.witness) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn small_norms_match_the_grid_oracle(seed in any::<u64>(), n in 1usize..=3, k in 0usize..3) {
        let p = [1.5, 2.5, 3.0][k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: Matrix<f64> = sample::matrix(&mut rng, n, n);
        let est = op_norm(&LpOperator::unweighted(m.clone(), p).unwrap(), &NormConfig::default()).unwrap();
        prop_assert!((est.value - common::grid_norm(&m, p)).abs() <= 1e-4);
    }

    #[test]
    fn dual_has_the_same_norm(seed in any::<u64>(), p in 1.2f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = weighted_op(&mut rng, 4, 4, p);
        let cfg = NormConfig::default();
        let a = op_norm(&op, &cfg).unwrap().value;
        let b = op_norm(&dual_operator(&op), &cfg).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
        prop_assert_eq!(dual_operator(&dual_operator(&op)).matrix().max_abs_diff(op.matrix()) < 1e-14, true);
    }

    #[test]
    fn lamperti_round_trip(seed in any::<u64>(), n in 1usize..=8, k in 0usize..3) {
        let p = [1.5, 2.5, 3.0][k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sample::spatial::<f64, _>(&mut rng, n, p, false).unwrap();
        let back = lamperti_decompose(&s.to_operator(), true).unwrap();
        prop_assert!(back.to_matrix().max_abs_diff(&s.to_matrix()) <= 1e-12);
        prop_assert_eq!(back.describe(), s.describe());
    }

    #[test]
    fn composition_is_the_matrix_product(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = 3.0;
        let s = sample::spatial::<f64, _>(&mut rng, n, p, false).unwrap();
        let t = sample::spatial::<f64, _>(&mut rng, n, p, false).unwrap();
        let t = SpatialPartialIsometry::from_permutation(
            t.dom().clone(),
            s.dom().clone(),
            t.entries().map(|(x, y, g)| (x, y, g / g.norm())),
        )
        .unwrap();
        let st = spatial_compose(&s, &t).unwrap();
        prop_assert!(st.to_matrix().max_abs_diff(&(&s.to_matrix() * &t.to_matrix())) <= 1e-12);
        let r = spatial_reverse(&s);
        let e = spatial_compose(&r, &s).unwrap().to_matrix();
        prop_assert!(lpgpd::linalg::is_diagonal_projection(&e, 1e-12));
    }

    #[test]
    fn semi_inner_product_axioms(seed in any::<u64>(), n in 1usize..=6, p in 1.2f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = WeightedLpSpace::new(sample::weights(&mut rng, n), p).unwrap();
        let f: Vec<C<f64>> = (0..n).map(|_| sample::complex(&mut rng)).collect();
        let g: Vec<C<f64>> = (0..n).map(|_| sample::complex(&mut rng)).collect();
        let alpha: C<f64> = sample::complex(&mut rng);
        let af: Vec<C<f64>> = f.iter().map(|z| alpha * z).collect();
        let fg = semi_inner_product(&f, &g, &space).unwrap();
        prop_assert!((semi_inner_product(&af, &g, &space).unwrap() - alpha * fg).norm() <= 1e-12);
        prop_assert!(fg.norm() <= space.norm(&f) * space.norm(&g) * (1.0 + 1e-12));
        let gg = semi_inner_product(&g, &g, &space).unwrap();
        prop_assert!((gg.re - space.norm(&g).powi(2)).abs() <= 1e-12 && gg.im.abs() <= 1e-12);
    }

    #[test]
    fn non_diagonal_idempotents_are_not_hermitian(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // P = S D S⁻¹ with S = I + N, N strictly upper triangular, so S⁻¹ = Σ (-N)^k.
        let d: Vec<bool> = (0..n).map(|i| i == 0 || rng.gen_bool(0.5)).collect();
        let mut diag: Vec<C<f64>> = d.iter().map(|&b| C::new(if b { 1.0 } else { 0.0 }, 0.0)).collect();
        diag[n - 1] = C::new(0.0, 0.0);
        let nil = Matrix::from_fn(n, n, |i, j| if j > i { sample::complex(&mut rng) } else { C::new(0.0, 0.0) });
        let s = &Matrix::identity(n) + &nil;
        let mut s_inv = Matrix::identity(n);
        let mut power = Matrix::identity(n);
        for _ in 1..n {
            power = &power * &(-&nil);
            s_inv = &s_inv + &power;
        }
        let proj = &(&s * &Matrix::diagonal(&diag)) * &s_inv;
        prop_assert!((&proj * &proj).approx_eq(&proj, 1e-10));
        let space = WeightedLpSpace::unweighted(n, 3.0).unwrap();
        let diagonal = proj.is_diagonal(1e-12);
        let herm = is_hermitian(&LpOperator::on(proj, space).unwrap(), 1e-8, &NormConfig::default()).unwrap();
        prop_assert_eq!(herm, diagonal);
    }
}

#[test]
fn diagonal_projections_are_hermitian_idempotents() {
    let cfg = NormConfig::default();
    for n in 1..=5 {
        for mask in 0..1u32 << n {
            let d: Vec<C<f64>> = (0..n).map(|i| C::new(f64::from((mask >> i) & 1), 0.0)).collect();
            let m = Matrix::diagonal(&d);
            assert!((&m * &m).approx_eq(&m, 0.0));
            for p in [1.5, 3.0] {
                let op = LpOperator::unweighted(m.clone(), p).unwrap();
                assert!(is_hermitian(&op, 1e-9, &cfg).unwrap());
                let norm = op_norm(&op, &cfg).unwrap().value;
                assert!(norm == if mask == 0 { 0.0 } else { 1.0 } || (norm - 1.0).abs() < 1e-12);
            }
        }
    }
}
