use super::{SimError, SimResult};
use crate::graph::scan_statistic_sorted;
use crate::rng::{derive_seed, rng_from_seed};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Point-process rates (agents per m²) swept by default.
pub const DEFAULT_RATES: [f64; 5] = [0.005, 0.01, 0.02, 0.05, 0.1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub lambdas: Vec<f64>,
    pub sides: Vec<f64>,
    pub radius: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            lambdas: DEFAULT_RATES.to_vec(),
            sides: (1..=10).map(|k| 20.0 * k as f64).collect(),
            radius: 15.0,
            trials: 100,
            seed: crate::rng::DEFAULT_SEED,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> SimResult<()> {
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(SimError::Config(format!("radius must be positive, got {}", self.radius)));
        }
        if self.lambdas.is_empty() || self.sides.is_empty() {
            return Err(SimError::Config("need at least one rate and one side length".into()));
        }
        if self.lambdas.iter().chain(&self.sides).any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(SimError::Config("rates and side lengths must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub lambda: f64,
    pub side: f64,
    pub n_vertices: usize,
    pub phi_max: usize,
    pub seed: u64,
}

impl ScanRecord {
    pub fn expected_vertices(&self) -> f64 {
        self.lambda * self.side * self.side
    }
}

/// Draws one planar Poisson process per `(rate, side, trial)` and records the
/// largest number of points in any x-strip of width `radius`. Only the
/// x-coordinates matter, so only those are sampled.
pub fn run_scan(cfg: &ScanConfig) -> SimResult<Vec<ScanRecord>> {
    cfg.validate()?;
    let jobs: Vec<(f64, f64)> = cfg
        .lambdas
        .iter()
        .flat_map(|&l| cfg.sides.iter().flat_map(move |&s| (0..cfg.trials).map(move |_| (l, s))))
        .collect();
    jobs.par_iter()
        .enumerate()
        .map(|(index, &(lambda, side))| {
            let seed = derive_seed(cfg.seed, index as u64);
            let mut rng = rng_from_seed(seed);
            let count = Poisson::new(lambda * side * side)
                .map_err(|e| SimError::Config(e.to_string()))?
                .sample(&mut rng) as usize;
            let mut xs: Vec<f64> = (0..count).map(|_| rng.random::<f64>() * side).collect();
            xs.sort_by(f64::total_cmp);
            Ok(ScanRecord {
                lambda,
                side,
                n_vertices: count,
                phi_max: scan_statistic_sorted(&xs, cfg.radius),
                seed,
            })
        })
        .collect()
}
