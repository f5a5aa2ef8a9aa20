mod common;

use common::*;
use lbekf::banded::{l_banded_inverse, SymMatrix};
use lbekf::filter::{ekf_step, init_filter, lb_ekf_step};
use lbekf::graph::{build_geometric_graph, WsnGraph};
use lbekf::model::{measure, MeasurementBatch, WsnModel};
use lbekf::rng::rng_from_seed;
use lbekf::sim::{build_scenario, ScenarioConfig};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

#[test]
fn full_band_inverse_matches_nalgebra() {
    let mut rng = rng_from_seed(1);
    for n in [1, 2, 5, 20, 60] {
        for _ in 0..5 {
            let a = random_spd(n, &mut rng);
            assert!(full_band_inverse_error(&a) < 1e-10, "n = {n}");
        }
    }
}

#[test]
fn banded_inverse_matches_input_on_band() {
    // The matrix returned for L = 1 has an inverse that agrees with the input
    // on the tridiagonal band.
    let mut rng = rng_from_seed(2);
    let n = 12;
    let a = random_spd(n, &mut rng);
    let z = l_banded_inverse(&a, 1).unwrap();
    let zinv = to_na(&z).try_inverse().unwrap();
    for i in 0..n {
        for j in i.saturating_sub(1)..=i {
            assert!((zinv[(i, j)] - a.get(i, j)).abs() < 1e-10);
        }
    }
}

#[test]
fn ekf_matches_dense_oracle_over_100_steps() {
    let dev = ekf_equivalence_deviation(lbekf::rng::DEFAULT_SEED, 100);
    assert!(dev <= 1e-9, "max deviation {dev:e}");
}

#[test]
fn full_band_covariance_matches_dense_oracle() {
    let s = build_scenario(&ScenarioConfig::default()).unwrap();
    let n = s.state_dim();
    let x0 = s.positions.coords().to_vec();
    let mut rng = rng_from_seed(5);
    let mut banded = init_filter(x0.clone(), 5.0, n - 1).unwrap();
    let mut dense = DenseEkf {
        x: DVector::from_vec(x0.clone()),
        m: DMatrix::identity(n, n) * 5.0,
    };
    let v = vec![0.0; n];
    for _ in 0..5 {
        let y = measure(&x0, &s.model, &mut rng).unwrap();
        banded = ekf_step(&banded, &s.model, &v, &y).unwrap();
        dense.step(&s.model, &v, y.as_slice());
    }
    let diff = (to_na(&banded.cov) - &dense.m).abs().max();
    assert!(diff < 1e-10, "covariance deviation {diff:e}");
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut rng = rng_from_seed(3);
    for trial in 0..30 {
        let x = random_realization(&mut rng, 12, 20.0, 9.0);
        let g = build_geometric_graph(&x);
        let model = WsnModel::distance(2, g, vec![0, 5], 0.02, 2.0, 10.0).unwrap();
        let state: Vec<f64> = (0..24).map(|_| rng.random_range(-10.0..10.0)).collect();
        let err = jacobian_fd_error(&state, &model);
        assert!(err < 1e-5, "trial {trial}: {err:e}");
    }
}

#[test]
fn noiseless_beacons_converge() {
    // Near-noiseless beacon fixes and no motion: beacon estimates lock on quickly.
    let g = WsnGraph::path(3);
    let model = WsnModel::distance(2, g, vec![0, 2], 0.0, 1e-8, 1.0).unwrap();
    let x = vec![0.0, 0.0, 3.0, 1.0, 6.0, 0.0];
    let mut state = init_filter(vec![1.0, -1.0, 2.0, 2.0, 7.0, 1.0], 5.0, 3).unwrap();
    let y = MeasurementBatch::new(&model, lbekf::model::h_eval(&x, &model).unwrap()).unwrap();
    for _ in 0..5 {
        state = lb_ekf_step(&state, &model, &[0.0; 6], &y).unwrap();
    }
    for (a, b) in state.xhat[..2].iter().zip(&x[..2]) {
        assert!((a - b).abs() < 1e-6);
    }
    for (a, b) in state.xhat[4..].iter().zip(&x[4..]) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn banded_information_update_stays_within_band() {
    let s = build_scenario(&ScenarioConfig::default()).unwrap();
    let mut rng = rng_from_seed(4);
    let x0 = s.positions.coords().to_vec();
    let mut state = init_filter(x0.clone(), 5.0, 20).unwrap();
    let v = vec![0.0; x0.len()];
    for _ in 0..10 {
        let y = measure(&x0, &s.relabeled_model, &mut rng).unwrap();
        state = lb_ekf_step(&state, &s.relabeled_model, &v, &y).unwrap();
        assert!(lbekf::banded::bandwidth(&state.cov, 0.0) <= 20);
    }
}
