use super::{SimError, SimResult};
use crate::graph::io::read_positions_file;
use crate::graph::{
    build_geometric_graph, graph_bandwidth, phi_max, sample_rgg_with, vertex_relabel, Permutation,
    Realization, RggConfig, WsnGraph,
};
use crate::model::{observability_rank_check, WsnModel};
use crate::rng::{stream_rng, DEFAULT_SEED};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentSource {
    /// Fixed number of agents, uniform over the square domain.
    Uniform { count: usize },
    /// Poisson number of agents with the given rate per unit area.
    Rgg { rate: f64 },
    /// Positions read from a CSV file.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Motion {
    Stationary,
    /// Each agent moves with a fixed per-step displacement of length `speed`
    /// in a direction drawn once per scenario.
    ConstantVelocity { speed: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Exact EKF, band covering the whole state.
    Ekf,
    /// Banded EKF on the vertex-relabeled network.
    LbEkfVr,
    /// Banded EKF on the labeling as sampled.
    LbEkf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ekf, Algorithm::LbEkfVr, Algorithm::LbEkf];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ekf => "ekf",
            Algorithm::LbEkfVr => "lb-ekf-vr",
            Algorithm::LbEkf => "lb-ekf",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?} (expected ekf, lb-ekf-vr or lb-ekf)"))
    }
}

/// Localization experiment parameters. Variances are in m², lengths in m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub side: f64,
    pub dim: usize,
    pub agents: AgentSource,
    pub beacons: usize,
    pub radius: f64,
    pub sigma_p: f64,
    pub sigma_q: f64,
    pub sigma_r: f64,
    pub init_var: f64,
    pub band: usize,
    pub timesteps: usize,
    pub trials: usize,
    pub motion: Motion,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    /// Scenario draws to try before giving up on a connected, observable one.
    pub max_attempts: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            side: 40.0,
            dim: 2,
            agents: AgentSource::Uniform { count: 30 },
            beacons: 8,
            radius: 15.0,
            sigma_p: 0.02,
            sigma_q: 2.0,
            sigma_r: 10.0,
            init_var: 5.0,
            band: 20,
            timesteps: 100,
            trials: 200,
            motion: Motion::Stationary,
            algorithms: Algorithm::ALL.to_vec(),
            seed: DEFAULT_SEED,
            max_attempts: 1000,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> SimResult<()> {
        let bad = |msg: &str| Err(SimError::Config(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.timesteps == 0 {
            return bad("timesteps must be at least 1");
        }
        if !(1..=3).contains(&self.dim) {
            return bad("dim must be 1, 2 or 3");
        }
        for (name, v) in [
            ("sigma_p", self.sigma_p),
            ("sigma_q", self.sigma_q),
            ("sigma_r", self.sigma_r),
            ("init_var", self.init_var),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.radius > 0.0) || !(self.side > 0.0) {
            return bad("radius and side must be positive");
        }
        if self.beacons == 0 {
            return bad("at least one beacon is required");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected");
        }
        match &self.agents {
            AgentSource::Uniform { count } if *count < 2 => bad("need at least two agents"),
            AgentSource::Rgg { rate } if !(*rate > 0.0) => bad("rate must be positive"),
            _ => Ok(()),
        }
    }
}

/// A fixed network shared by every trial of a localization run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub positions: Realization,
    pub graph: WsnGraph,
    pub model: WsnModel,
    /// Per-agent displacement per step, original labels.
    pub velocity: Vec<f64>,
    pub relabel: Permutation,
    pub relabeled_model: WsnModel,
    /// `row_map[original_row] = relabeled_row` for measurement vectors.
    pub row_map: Vec<usize>,
    pub bandwidth_original: usize,
    pub bandwidth_relabeled: usize,
    pub phi_max: usize,
    pub attempts: usize,
}

impl Scenario {
    pub fn n_agents(&self) -> usize {
        self.positions.len()
    }

    pub fn state_dim(&self) -> usize {
        self.model.state_dim()
    }
}

/// Greedy farthest-point selection: a random first agent, then repeatedly the
/// agent farthest from those already chosen (lowest label on ties).
pub fn farthest_point_beacons<R: Rng + ?Sized>(x: &Realization, count: usize, rng: &mut R) -> Vec<usize> {
    let n = x.len();
    let count = count.min(n);
    if count == 0 {
        return Vec::new();
    }
    let first = rng.random_range(0..n);
    let mut chosen = vec![first];
    let mut nearest: Vec<f64> = (0..n).map(|i| x.distance(i, first)).collect();
    while chosen.len() < count {
        let (next, _) = nearest
            .iter()
            .enumerate()
            .fold((usize::MAX, f64::NEG_INFINITY), |best, (i, &d)| {
                if d > best.1 {
                    (i, d)
                } else {
                    best
                }
            });
        chosen.push(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(x.distance(i, next));
        }
    }
    chosen.sort_unstable();
    chosen
}

fn sample_positions<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> SimResult<Realization> {
    match &cfg.agents {
        AgentSource::Uniform { count } => {
            let coords = (0..count * cfg.dim)
                .map(|_| rng.random::<f64>() * cfg.side)
                .collect();
            Ok(Realization::new(cfg.dim, coords, cfg.radius)?)
        }
        AgentSource::Rgg { rate } => {
            let rgg = RggConfig {
                side_lengths: vec![cfg.side; cfg.dim],
                rate: *rate,
                radius: cfg.radius,
                seed: 0,
            };
            Ok(sample_rgg_with(&rgg, rng)?.1)
        }
        AgentSource::File { path } => Ok(read_positions_file(path, cfg.radius)?),
    }
}

/// Draws (or loads) positions until the geometric graph is connected and the
/// Jacobian at the true positions has full column rank.
pub fn build_scenario(cfg: &ScenarioConfig) -> SimResult<Scenario> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, 0);
    let from_file = matches!(cfg.agents, AgentSource::File { .. });
    let attempts = if from_file { 1 } else { cfg.max_attempts.max(1) };

    for attempt in 1..=attempts {
        let positions = sample_positions(cfg, &mut rng)?;
        if positions.dim() != cfg.dim {
            return Err(SimError::Config(format!(
                "position file has dimension {}, config says {}",
                positions.dim(),
                cfg.dim
            )));
        }
        if positions.len() < 2 {
            continue;
        }
        let graph = build_geometric_graph(&positions);
        let beacons = farthest_point_beacons(&positions, cfg.beacons, &mut rng);
        let model = WsnModel::distance(
            cfg.dim,
            graph.clone(),
            beacons,
            cfg.sigma_p,
            cfg.sigma_q,
            cfg.sigma_r,
        )?;
        let observable = graph.is_connected()
            && observability_rank_check(positions.coords(), &model)
                .map(|c| c.full)
                .unwrap_or(false);
        if !observable {
            if from_file {
                log::warn!("scenario from file is not observable at the true positions");
            } else {
                continue;
            }
        }

        let velocity = match cfg.motion {
            Motion::Stationary => vec![0.0; positions.coords().len()],
            Motion::ConstantVelocity { speed } => {
                let mut v = Vec::with_capacity(positions.coords().len());
                for _ in 0..positions.len() {
                    let dir: Vec<f64> = (0..cfg.dim)
                        .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                        .collect();
                    let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-12);
                    v.extend(dir.iter().map(|c| speed * c / norm));
                }
                v
            }
        };
        let relabel = vertex_relabel(&positions);
        let (relabeled_model, row_map) = model.relabeled(&relabel)?;
        let bandwidth_relabeled = graph_bandwidth(relabeled_model.graph());
        let state_dim = model.state_dim();
        if cfg.band >= state_dim {
            return Err(SimError::Config(format!(
                "band {} must be below the state dimension {state_dim}",
                cfg.band
            )));
        }
        return Ok(Scenario {
            bandwidth_original: graph_bandwidth(&graph),
            bandwidth_relabeled,
            phi_max: phi_max(&positions),
            positions,
            graph,
            model,
            velocity,
            relabel,
            relabeled_model,
            row_map,
            attempts: attempt,
        });
    }
    Err(SimError::Scenario(format!(
        "no connected, observable network in {attempts} draws"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn default_config_matches_reference_setup() {
        let c = ScenarioConfig::default();
        assert_eq!(c.agents, AgentSource::Uniform { count: 30 });
        assert_eq!((c.beacons, c.band, c.timesteps), (8, 20, 100));
        assert_eq!((c.radius, c.side), (15.0, 40.0));
        assert_eq!((c.sigma_q, c.sigma_r, c.sigma_p, c.init_var), (2.0, 10.0, 0.02, 5.0));
    }

    #[test]
    fn config_validation() {
        let mut c = ScenarioConfig::default();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::default();
        c.sigma_r = 0.0;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::default();
        c.algorithms.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_parses_from_toml() {
        let c: ScenarioConfig = toml::from_str(
            "trials = 3\nagents = { kind = \"rgg\", rate = 0.02 }\nmotion = { kind = \"constant_velocity\", speed = 0.1 }\nalgorithms = [\"ekf\", \"lb-ekf\"]\n",
        )
        .unwrap();
        assert_eq!(c.trials, 3);
        assert_eq!(c.agents, AgentSource::Rgg { rate: 0.02 });
        assert_eq!(c.algorithms, vec![Algorithm::Ekf, Algorithm::LbEkf]);
        assert!(toml::from_str::<ScenarioConfig>("bogus = 1").is_err());
    }

    #[test]
    fn farthest_point_spreads_out() {
        let x = Realization::new(1, vec![0.0, 1.0, 2.0, 10.0, 5.0], 1.0).unwrap();
        let b = farthest_point_beacons(&x, 3, &mut rng_from_seed(3));
        assert_eq!(b.len(), 3);
        assert!(b.contains(&0) && b.contains(&3));
    }

    #[test]
    fn default_scenario_is_connected_and_observable() {
        let s = build_scenario(&ScenarioConfig::default()).unwrap();
        assert_eq!(s.n_agents(), 30);
        assert_eq!(s.state_dim(), 60);
        assert!(s.graph.is_connected());
        assert_eq!(s.model.beacons().len(), 8);
        assert!(s.bandwidth_relabeled <= s.phi_max);
        assert!(observability_rank_check(s.positions.coords(), &s.model).unwrap().full);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("kalman".parse::<Algorithm>().is_err());
    }
}
