use super::scenario::{build_scenario, Algorithm, Scenario, ScenarioConfig};
use super::{SimError, SimResult};
use crate::banded::{DenseSymMatrix, SymMatrix};
use crate::filter::{ekf_step, init_filter, lb_ekf_step, FilterError, FilterState};
use crate::model::{measure, simulate_step, ModelError};
use crate::rng::trial_rng;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Confidence scaling used for exported ellipses.
pub const DEFAULT_ELLIPSE_LEVEL: f64 = 20.0;

/// Outcome of one algorithm on one trial, in the original agent labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algorithm: Algorithm,
    pub trial: usize,
    /// `agent_sq_error[k][i] = |x_i(k) - xhat_i(k)|^2` for `k = 0..=T`.
    /// Shorter when the filter diverged.
    pub agent_sq_error: Vec<Vec<f64>>,
    pub total_sq_error: Vec<f64>,
    pub final_estimate: Vec<f64>,
    pub final_blocks: Vec<DenseSymMatrix>,
    pub diverged_at: Option<usize>,
}

impl TrialRecord {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct LocalizationRun {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    /// Ordered by trial, then by the configured algorithm order.
    pub records: Vec<TrialRecord>,
}

impl LocalizationRun {
    pub fn records_for(&self, algorithm: Algorithm) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(move |r| r.algorithm == algorithm)
    }

    pub fn diverged_count(&self, algorithm: Algorithm) -> usize {
        self.records_for(algorithm).filter(|r| r.diverged()).count()
    }
}

/// Trial-averaged squared errors over the non-diverged trials.
#[derive(Debug, Clone, PartialEq)]
pub struct MseCurves {
    pub algorithm: Algorithm,
    /// `per_agent[k][i]`.
    pub per_agent: Vec<Vec<f64>>,
    pub total: Vec<f64>,
    pub n_trials: usize,
    pub n_diverged: usize,
}

pub fn mse_curves<'a>(
    algorithm: Algorithm,
    records: impl IntoIterator<Item = &'a TrialRecord>,
) -> SimResult<MseCurves> {
    let mut per_agent: Vec<Vec<f64>> = Vec::new();
    let mut total: Vec<f64> = Vec::new();
    let (mut used, mut diverged) = (0usize, 0usize);
    for r in records.into_iter().filter(|r| r.algorithm == algorithm) {
        if r.diverged() {
            diverged += 1;
            continue;
        }
        if used == 0 {
            per_agent = r.agent_sq_error.iter().map(|row| vec![0.0; row.len()]).collect();
            total = vec![0.0; r.total_sq_error.len()];
        }
        used += 1;
        for (acc, row) in per_agent.iter_mut().zip(&r.agent_sq_error) {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        for (a, v) in total.iter_mut().zip(&r.total_sq_error) {
            *a += v;
        }
    }
    if used == 0 {
        return Err(SimError::AllDiverged(algorithm.to_string()));
    }
    let scale = 1.0 / used as f64;
    per_agent.iter_mut().flatten().for_each(|v| *v *= scale);
    total.iter_mut().for_each(|v| *v *= scale);
    Ok(MseCurves {
        algorithm,
        per_agent,
        total,
        n_trials: used,
        n_diverged: diverged,
    })
}

/// Planar covariance ellipse `{p : (p - c)^T (level M)^-1 (p - c) <= 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseRow {
    pub agent: usize,
    pub cx: f64,
    pub cy: f64,
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
    pub level: f64,
}

impl EllipseRow {
    /// Semi-axis lengths, major first.
    pub fn semi_axes(&self) -> (f64, f64) {
        let mean = 0.5 * (self.m11 + self.m22);
        let half_gap = (0.25 * (self.m11 - self.m22).powi(2) + self.m12 * self.m12).sqrt();
        let big = (self.level * (mean + half_gap)).max(0.0).sqrt();
        let small = (self.level * (mean - half_gap)).max(0.0).sqrt();
        (big, small)
    }
}

fn ellipse_rows(
    estimate: &[f64],
    blocks: &[DenseSymMatrix],
    level: f64,
) -> Vec<EllipseRow> {
    blocks
        .iter()
        .enumerate()
        .map(|(agent, b)| EllipseRow {
            agent,
            cx: estimate[2 * agent],
            cy: estimate[2 * agent + 1],
            m11: b.get(0, 0),
            m12: b.get(1, 0),
            m22: b.get(1, 1),
            level,
        })
        .collect()
}

/// Per-agent ellipses from a planar filter state, in the state's own labels.
pub fn export_ellipses(state: &FilterState, dim: usize, level: f64) -> SimResult<Vec<EllipseRow>> {
    if dim != 2 {
        return Err(SimError::Config(format!(
            "ellipses need planar positions, got dimension {dim}"
        )));
    }
    if state.dim() % 2 != 0 {
        return Err(SimError::Config("state length is odd".into()));
    }
    let blocks = (0..state.dim() / 2)
        .map(|a| state.covariance_block(a, 2))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ellipse_rows(&state.xhat, &blocks, level))
}

/// Ellipses for the final state of a trial, in the original labels.
pub fn ellipses_from_record(record: &TrialRecord, level: f64) -> SimResult<Vec<EllipseRow>> {
    let dim = record.final_estimate.len() / record.final_blocks.len().max(1);
    if dim != 2 {
        return Err(SimError::Config(format!(
            "ellipses need planar positions, got dimension {dim}"
        )));
    }
    Ok(ellipse_rows(&record.final_estimate, &record.final_blocks, level))
}

/// Per-algorithm filter instance, possibly in relabeled coordinates.
struct Runner<'a> {
    algorithm: Algorithm,
    scenario: &'a Scenario,
    state: FilterState,
    record: TrialRecord,
}

impl<'a> Runner<'a> {
    fn new(
        algorithm: Algorithm,
        scenario: &'a Scenario,
        cfg: &ScenarioConfig,
        trial: usize,
        xhat0: &[f64],
    ) -> SimResult<Self> {
        let n = scenario.state_dim();
        let d = cfg.dim;
        let (x0, band) = match algorithm {
            Algorithm::Ekf => (xhat0.to_vec(), n - 1),
            Algorithm::LbEkf => (xhat0.to_vec(), cfg.band),
            Algorithm::LbEkfVr => (scenario.relabel.permute_blocks(xhat0, d), cfg.band),
        };
        Ok(Self {
            algorithm,
            scenario,
            state: init_filter(x0, cfg.init_var, band)?,
            record: TrialRecord {
                algorithm,
                trial,
                agent_sq_error: Vec::with_capacity(cfg.timesteps + 1),
                total_sq_error: Vec::with_capacity(cfg.timesteps + 1),
                final_estimate: Vec::new(),
                final_blocks: Vec::new(),
                diverged_at: None,
            },
        })
    }

    fn relabeled(&self) -> bool {
        self.algorithm == Algorithm::LbEkfVr
    }

    fn estimate(&self) -> Vec<f64> {
        if self.relabeled() {
            let d = self.scenario.model.dim();
            self.scenario.relabel.inverse().permute_blocks(&self.state.xhat, d)
        } else {
            self.state.xhat.clone()
        }
    }

    fn record_error(&mut self, truth: &[f64]) {
        let d = self.scenario.model.dim();
        let est = self.estimate();
        let per_agent: Vec<f64> = truth
            .chunks(d)
            .zip(est.chunks(d))
            .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum())
            .collect();
        self.record.total_sq_error.push(per_agent.iter().sum());
        self.record.agent_sq_error.push(per_agent);
    }

    fn step(
        &mut self,
        v: &[f64],
        v_relabeled: &[f64],
        y: &crate::model::MeasurementBatch,
    ) -> SimResult<()> {
        if self.record.diverged() {
            return Ok(());
        }
        let s = self.scenario;
        let result = match self.algorithm {
            Algorithm::Ekf => ekf_step(&self.state, &s.model, v, y),
            Algorithm::LbEkf => lb_ekf_step(&self.state, &s.model, v, y),
            Algorithm::LbEkfVr => lb_ekf_step(
                &self.state,
                &s.relabeled_model,
                v_relabeled,
                &y.permuted(&s.row_map),
            ),
        };
        match result {
            Ok(next) => {
                self.state = next;
                Ok(())
            }
            Err(FilterError::Diverged { step, cause }) => {
                log::debug!("{} diverged in trial {} at step {step}: {cause}", self.algorithm, self.record.trial);
                self.record.diverged_at = Some(step);
                Ok(())
            }
            Err(FilterError::Model {
                step,
                source: ModelError::CoincidentEndpoints(..),
            }) => {
                self.record.diverged_at = Some(step);
                Ok(())
            }
            Err(e) => Err(e.into()),
        }
    }

    fn finish(mut self) -> SimResult<TrialRecord> {
        if !self.record.diverged() {
            let d = self.scenario.model.dim();
            let n_agents = self.scenario.n_agents();
            self.record.final_estimate = self.estimate();
            self.record.final_blocks = (0..n_agents)
                .map(|a| {
                    let internal = if self.relabeled() {
                        self.scenario.relabel.new_label(a)
                    } else {
                        a
                    };
                    self.state.covariance_block(internal, d)
                })
                .collect::<Result<_, _>>()?;
        }
        Ok(self.record)
    }
}

/// Runs every configured algorithm on one trial. All algorithms see the same
/// trajectory, the same measurements and the same initial estimate.
pub fn run_trial(scenario: &Scenario, cfg: &ScenarioConfig, trial: usize) -> SimResult<Vec<TrialRecord>> {
    let mut rng = trial_rng(cfg.seed, trial);
    let d = cfg.dim;
    let init_std = cfg.init_var.sqrt();
    let mut truth = scenario.positions.coords().to_vec();
    let xhat0: Vec<f64> = truth
        .iter()
        .map(|x| x + init_std * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let v = &scenario.velocity;
    let v_relabeled = scenario.relabel.permute_blocks(v, d);

    let mut runners = cfg
        .algorithms
        .iter()
        .map(|&a| Runner::new(a, scenario, cfg, trial, &xhat0))
        .collect::<SimResult<Vec<_>>>()?;

    for k in 0..=cfg.timesteps {
        for r in runners.iter_mut().filter(|r| !r.record.diverged()) {
            r.record_error(&truth);
        }
        if k == cfg.timesteps {
            break;
        }
        let y = measure(&truth, &scenario.model, &mut rng)?;
        for r in &mut runners {
            r.step(v, &v_relabeled, &y)?;
        }
        truth = simulate_step(&truth, v, &scenario.model, &mut rng)?;
    }
    runners.into_iter().map(Runner::finish).collect()
}

/// Builds the scenario once and runs all trials in parallel.
pub fn run_localization(cfg: &ScenarioConfig) -> SimResult<LocalizationRun> {
    let scenario = build_scenario(cfg)?;
    log::info!(
        "scenario: {} agents, {} edges, bandwidth {} -> {} after relabeling (phi_max {}), {} draw(s)",
        scenario.n_agents(),
        scenario.graph.n_edges(),
        scenario.bandwidth_original,
        scenario.bandwidth_relabeled,
        scenario.phi_max,
        scenario.attempts
    );
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(&scenario, cfg, t))
        .collect::<SimResult<Vec<_>>>()?;
    Ok(LocalizationRun {
        config: cfg.clone(),
        scenario,
        records: per_trial.into_iter().flatten().collect(),
    })
}
