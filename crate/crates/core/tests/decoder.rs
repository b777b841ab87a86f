mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use ura_core::channel::{sample_coding_matrix, GammaVector};
use ura_core::decoder::*;
use ura_core::Complex64;

fn restricted(gamma: &GammaVector, k: usize, t: f64) -> Vec<f64> {
    let mut g = gamma.0.clone();
    g[k] = t;
    g
}

#[test]
fn ml_step_matches_grid_search() {
    for seed in 0..10 {
        let inst = random_instance(8, 5, 3, 64, seed);
        let mut r = rng(seed + 77);
        let gamma = random_gamma(32, 4, &mut r);
        let state = DecoderState::from_gamma(&inst.codebook, gamma.clone(), inst.sigma2).unwrap();
        let sc = inst.sc.to_matrix();
        for k in (0..32).step_by(3) {
            let d = ml_coordinate_step(&state, &inst.codebook, &inst.sc, k);
            let hi = gamma.0[k] + 5.0;
            let best = grid_argmin(hi, |t| dense_ml_cost(&dense_sigma(&inst.a, &restricted(&gamma, k, t), inst.sigma2), &sc));
            assert!(((gamma.0[k] + d).min(hi) - best).abs() <= 1.01e-4, "seed {seed} k {k}: {} vs {best}", gamma.0[k] + d);
        }
    }
}

#[test]
fn nnls_step_matches_grid_search() {
    for seed in 0..10 {
        let inst = random_instance(8, 5, 3, 64, seed);
        let mut r = rng(seed + 99);
        let gamma = random_gamma(32, 4, &mut r);
        let state = DecoderState::from_gamma(&inst.codebook, gamma.clone(), inst.sigma2).unwrap();
        let sc = inst.sc.to_matrix();
        for k in (1..32).step_by(3) {
            let d = nnls_coordinate_step(&state, &inst.codebook, &inst.sc, k);
            let hi = gamma.0[k] + 5.0;
            let best = grid_argmin(hi, |t| dense_frobenius(&dense_sigma(&inst.a, &restricted(&gamma, k, t), inst.sigma2), &sc));
            assert!(((gamma.0[k] + d).min(hi) - best).abs() <= 1.01e-4, "seed {seed} k {k}");
        }
    }
}

#[test]
fn nnls_step_recovers_planted_scale() {
    let codebook = sample_coding_matrix(12, 4, 8).unwrap();
    let a = codebook.to_matrix();
    let sigma2 = 0.7;
    let c = 1.9;
    let col = a.column(5);
    let sc = DMatrix::<Complex64>::identity(12, 12) * Complex64::from(sigma2) + (col * col.adjoint()) * Complex64::from(c);
    let state = DecoderState::initial(&codebook, sigma2).unwrap();
    let d = nnls_coordinate_step(&state, &codebook, &SampleCovariance::from_matrix(&sc), 5);
    assert!((d - c).abs() < 1e-12);
}

#[test]
fn ml_cost_matches_dense_evaluation() {
    for seed in 0..20 {
        let inst = random_instance(8, 5, 3, 64, seed);
        let gamma = random_gamma(32, 6, &mut rng(seed));
        let state = DecoderState::from_gamma(&inst.codebook, gamma.clone(), inst.sigma2).unwrap();
        let ours = ml_cost(&state, &inst.sc).unwrap();
        let dense = dense_ml_cost(&dense_sigma(&inst.a, &gamma.0, inst.sigma2), &inst.sc.to_matrix());
        assert!((ours - dense).abs() <= 1e-8 * dense.abs());
    }
}

#[test]
fn sherman_morrison_survives_200_steps() {
    let codebook = sample_coding_matrix(16, 6, 4).unwrap();
    let a = codebook.to_matrix();
    let sigma2 = 0.5;
    let mut state = DecoderState::initial(&codebook, sigma2).unwrap();
    let mut r = rng(12);
    for _ in 0..200 {
        let k = r.random_range(0..64);
        let d = r.random_range(-1.0..1.0f64).max(-state.gamma().0[k]);
        rank_one_inverse_update(&mut state, &codebook, k, d).unwrap();
    }
    let sigma = dense_sigma(&a, &state.gamma().0, sigma2);
    let product = state.sigma_inv() * &sigma;
    assert!((product - DMatrix::<Complex64>::identity(16, 16)).norm() < 1e-6);
}

#[test]
fn resync_restores_inverse() {
    let codebook = sample_coding_matrix(16, 6, 4).unwrap();
    let mut state = DecoderState::initial(&codebook, 0.3).unwrap();
    let mut r = rng(5);
    for _ in 0..300 {
        let k = r.random_range(0..64);
        rank_one_inverse_update(&mut state, &codebook, k, r.random_range(0.0..0.5)).unwrap();
    }
    let drift = state.resync(&codebook).unwrap();
    assert!(drift < 1e-6, "drift {drift}");
    let dense = dense_sigma(&codebook.to_matrix(), &state.gamma().0, 0.3).try_inverse().unwrap();
    assert!(rel_frob(&state.sigma_inv(), &dense) < 1e-12);
}

#[test]
fn khatri_rao_equals_frobenius() {
    for seed in 0..20 {
        let inst = random_instance(8, 5, 3, 64, seed);
        let gamma = random_gamma(32, 8, &mut rng(seed + 1));
        let kr = khatri_rao_objective(&gamma, &inst.codebook, &inst.sc, inst.sigma2);
        let dense = dense_frobenius(&dense_sigma(&inst.a, &gamma.0, inst.sigma2), &inst.sc.to_matrix());
        assert!((kr - dense).abs() <= 1e-10 * dense);
    }
}

#[test]
fn exact_covariance_is_recovered() {
    let settings = DecoderSettings { max_sweeps: 30, ..Default::default() };
    for seed in 0..10 {
        let inst = random_instance(32, 7, 5, 1, seed);
        let sigma = dense_sigma(&inst.a, &inst.gamma0, inst.sigma2);
        let sc = SampleCovariance::from_matrix(&sigma);
        let out = coordinate_descent(&sc, &inst.codebook, inst.sigma2, &settings).unwrap();
        let truth = GammaVector(inst.gamma0.clone());
        let err = out.gamma.l1_distance(&truth) / truth.l1_norm();
        assert!(err < 0.05, "seed {seed}: {err}");
        // the residual vanishes at the true γ
        assert!(khatri_rao_objective(&truth, &inst.codebook, &sc, inst.sigma2) < 1e-20 * sigma.norm_squared());
    }
}

#[test]
fn both_methods_find_the_planted_support() {
    for method in [Method::Ml, Method::Nnls] {
        let inst = random_instance(32, 7, 4, 2000, 3);
        let settings = DecoderSettings { method, ..Default::default() };
        let out = coordinate_descent(&inst.sc, &inst.codebook, inst.sigma2, &settings).unwrap();
        let truth: Vec<usize> = (0..128).filter(|&i| inst.gamma0[i] > 0.0).collect();
        assert_eq!(topk_support(&out.gamma, truth.len()).indices, truth, "{method}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn descent_is_monotone_and_nonnegative(seed in 0u64..10_000, cyclic in any::<bool>(), nnls in any::<bool>()) {
        let inst = random_instance(8, 5, 3, 64, seed);
        let settings = DecoderSettings {
            method: if nnls { Method::Nnls } else { Method::Ml },
            schedule: if cyclic { Schedule::Cyclic } else { Schedule::Random },
            seed,
            ..Default::default()
        };
        let out = coordinate_descent(&inst.sc, &inst.codebook, inst.sigma2, &settings).unwrap();
        prop_assert!(out.gamma.0.iter().all(|&g| g >= 0.0));
        prop_assert_eq!(out.monotonicity_violations, 0);
        for w in out.objective.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * w[0].abs());
        }
    }

    #[test]
    fn every_accepted_ml_step_lowers_the_dense_cost(seed in 0u64..10_000) {
        let inst = random_instance(8, 5, 3, 64, seed);
        let sc = inst.sc.to_matrix();
        let mut state = DecoderState::initial(&inst.codebook, inst.sigma2).unwrap();
        let mut before = dense_ml_cost(&dense_sigma(&inst.a, &state.gamma().0, inst.sigma2), &sc);
        for k in (0..32).chain(0..32) {
            let d = ml_coordinate_step(&state, &inst.codebook, &inst.sc, k);
            prop_assert!(state.gamma().0[k] + d >= 0.0);
            rank_one_inverse_update(&mut state, &inst.codebook, k, d).unwrap();
            let after = dense_ml_cost(&dense_sigma(&inst.a, &state.gamma().0, inst.sigma2), &sc);
            prop_assert!(after <= before + 1e-9 * before.abs());
            before = after;
        }
    }

    #[test]
    fn khatri_rao_tracks_frobenius(seed in 0u64..10_000, k in 0usize..32) {
        let inst = random_instance(8, 5, 2, 16, seed);
        let gamma = random_gamma(32, k, &mut rng(seed));
        let kr = khatri_rao_objective(&gamma, &inst.codebook, &inst.sc, inst.sigma2);
        let fr = frobenius_objective(&gamma, &inst.codebook, &inst.sc, inst.sigma2);
        prop_assert!((kr - fr).abs() <= 1e-10 * fr);
    }

    #[test]
    fn support_rules_are_sorted_and_consistent(values in prop::collection::vec(0.0f64..3.0, 1..64), nu in 0.01f64..3.0, k in 1usize..64) {
        let gamma = GammaVector(values.clone());
        let th = threshold_support(&gamma, nu);
        prop_assert!(th.indices.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(th.indices.iter().all(|&i| values[i] >= nu));
        prop_assert_eq!(th.indices.len(), values.iter().filter(|&&v| v >= nu).count());
        let top = topk_support(&gamma, k);
        prop_assert_eq!(top.indices.len(), k.min(values.len()));
        let floor = top.indices.iter().map(|&i| values[i]).fold(f64::INFINITY, f64::min);
        let outside = (0..values.len()).filter(|i| !top.indices.contains(i)).map(|i| values[i]).fold(0.0, f64::max);
        prop_assert!(floor >= outside);
    }
}
