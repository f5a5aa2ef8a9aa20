mod common;

use lbekf::graph::{sample_rgg, strip_count, RggConfig};
use lbekf::rng::derive_seed;
use lbekf::sim::{mse_curves, run_localization, run_scan, Algorithm, ScanConfig, ScenarioConfig};

#[test]
fn poisson_vertex_counts() {
    let draws = 4000;
    let counts: Vec<f64> = (0..draws)
        .map(|k| {
            let cfg = RggConfig::square(40.0, 0.01, 15.0, derive_seed(77, k));
            sample_rgg(&cfg).unwrap().1.len() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / draws as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    assert!((mean - 16.0).abs() < 0.8, "mean {mean}");
    assert!((var - 16.0).abs() < 2.0, "variance {var}");
}

#[test]
fn strip_count_mean() {
    let draws = 4000;
    let total: usize = (0..draws)
        .map(|k| {
            let cfg = RggConfig::square(40.0, 0.05, 15.0, derive_seed(78, k));
            strip_count(&sample_rgg(&cfg).unwrap().1, 12.0, 15.0)
        })
        .sum();
    let mean = total as f64 / draws as f64;
    let want = 0.05 * 40.0 * 15.0;
    assert!((mean - want).abs() < 0.05 * want, "mean {mean} vs {want}");
}

#[test]
fn scan_expected_strip_identity() {
    // lambda l r equals r sqrt(lambda E|V|) with E|V| = lambda l^2.
    let cfg = ScanConfig::default();
    for &lambda in &cfg.lambdas {
        for &l in &cfg.sides {
            let lhs = lambda * l * cfg.radius;
            let rhs = cfg.radius * (lambda * lambda * l * l).sqrt();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }
    }
}

#[test]
fn scan_mean_grows_sublinearly() {
    let sides: Vec<f64> = [100.0f64, 400.0, 1600.0].iter().map(|e| (e / 0.1).sqrt()).collect();
    let cfg = ScanConfig {
        lambdas: vec![0.1],
        sides: sides.clone(),
        trials: 100,
        ..ScanConfig::default()
    };
    let recs = run_scan(&cfg).unwrap();
    let means: Vec<f64> = sides
        .iter()
        .map(|&s| {
            let v: Vec<f64> = recs.iter().filter(|r| r.side == s).map(|r| r.phi_max as f64).collect();
            v.iter().sum::<f64>() / v.len() as f64
        })
        .collect();
    assert!(means[0] < means[1] && means[1] < means[2]);
    let slope = (means[2] / means[0]).ln() / 16f64.ln();
    assert!(slope < 0.8, "slope {slope}");
}

#[test]
fn beacons_localize_better_than_other_agents() {
    let cfg = ScenarioConfig {
        trials: 20,
        timesteps: 40,
        algorithms: vec![Algorithm::Ekf],
        ..ScenarioConfig::default()
    };
    let run = run_localization(&cfg).unwrap();
    let c = mse_curves(Algorithm::Ekf, run.records.iter()).unwrap();
    let last = c.per_agent.last().unwrap();
    let beacons = run.scenario.model.beacons();
    let mean_of = |beacon: bool| {
        let v: Vec<f64> = (0..last.len())
            .filter(|i| beacons.contains(i) == beacon)
            .map(|i| last[i])
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(mean_of(true) < mean_of(false));
}

#[test]
fn mse_curves_of_duplicated_trials() {
    let cfg = ScenarioConfig {
        trials: 1,
        timesteps: 5,
        ..ScenarioConfig::default()
    };
    let run = run_localization(&cfg).unwrap();
    let single = mse_curves(Algorithm::LbEkfVr, run.records.iter()).unwrap();
    let doubled: Vec<_> = run.records.iter().chain(run.records.iter()).collect();
    let twice = mse_curves(Algorithm::LbEkfVr, doubled).unwrap();
    for (a, b) in single.total.iter().zip(&twice.total) {
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }
    let rec = run.records.iter().find(|r| r.algorithm == Algorithm::LbEkfVr).unwrap();
    assert_eq!(single.total, rec.total_sq_error);
}
