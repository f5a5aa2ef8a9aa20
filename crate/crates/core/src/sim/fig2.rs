use super::{SimError, SimResult};
use crate::banded::{dense_inverse, frobenius_error, l_banded_inverse, BandedSymMatrix};
use crate::rng::stream_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Diagonal value of the raw test matrices; matrices are divided by it.
pub const FIG2_DIAGONAL: f64 = 15.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Config {
    pub n: usize,
    pub bandwidths: Vec<usize>,
    pub l_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            n: 500,
            bandwidths: vec![5, 10, 25],
            l_values: (0..=50).collect(),
            trials: 1,
            seed: crate::rng::DEFAULT_SEED,
        }
    }
}

impl Fig2Config {
    pub fn validate(&self) -> SimResult<()> {
        if self.n < 2 {
            return Err(SimError::Config("matrix size must be at least 2".into()));
        }
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        if self.bandwidths.is_empty() || self.l_values.is_empty() {
            return Err(SimError::Config("need at least one bandwidth and one L".into()));
        }
        if let Some(&l) = self.l_values.iter().find(|&&l| l >= self.n) {
            return Err(SimError::Config(format!("L = {l} exceeds n - 1 = {}", self.n - 1)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig2Row {
    pub input_bw: usize,
    pub l: usize,
    pub trial: usize,
    pub error: f64,
}

/// Random symmetric matrix of bandwidth `bw`: off-diagonal entries inside the
/// band uniform in (-1, 1), diagonal 15, everything divided by 15.
pub fn fig2_matrix<R: Rng + ?Sized>(n: usize, bw: usize, rng: &mut R) -> BandedSymMatrix {
    let mut a = BandedSymMatrix::zeros(n, bw);
    for j in 0..n {
        for i in j..n.min(j + bw + 1) {
            let v = if i == j {
                1.0
            } else {
                rng.random_range(-1.0..1.0) / FIG2_DIAGONAL
            };
            a.set(i, j, v).expect("inside band");
        }
    }
    a
}

/// Frobenius error of the L-banded inverse against the exact inverse, one row
/// per `(input bandwidth, trial, L)`, ordered in that nesting.
pub fn run_fig2(cfg: &Fig2Config) -> SimResult<Vec<Fig2Row>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .bandwidths
        .iter()
        .flat_map(|&bw| (0..cfg.trials).map(move |t| (bw, t)))
        .collect();
    let per_job = jobs
        .par_iter()
        .enumerate()
        .map(|(index, &(bw, trial))| -> SimResult<Vec<Fig2Row>> {
            let mut rng = stream_rng(cfg.seed, index as u64);
            let a = fig2_matrix(cfg.n, bw, &mut rng);
            let exact = dense_inverse(&a.to_dense())?;
            cfg.l_values
                .par_iter()
                .map(|&l| {
                    let approx = l_banded_inverse(&a, l)?;
                    Ok(Fig2Row {
                        input_bw: bw,
                        l,
                        trial,
                        error: frobenius_error(&approx, &exact)?,
                    })
                })
                .collect()
        })
        .collect::<SimResult<Vec<_>>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

/// Trial-averaged error per `(input bandwidth, L)`, in first-appearance order.
pub fn fig2_means(rows: &[Fig2Row]) -> Vec<(usize, usize, f64)> {
    let mut keys: Vec<(usize, usize)> = Vec::new();
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for r in rows {
        let key = (r.input_bw, r.l);
        let idx = match keys.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                keys.push(key);
                sums.push((0.0, 0));
                keys.len() - 1
            }
        };
        sums[idx].0 += r.error;
        sums[idx].1 += 1;
    }
    keys.into_iter()
        .zip(sums)
        .map(|((bw, l), (s, c))| (bw, l, s / c as f64))
        .collect()
}
