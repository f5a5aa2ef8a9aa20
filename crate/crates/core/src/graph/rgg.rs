use super::{build_geometric_graph, GraphError, GraphResult, Realization, WsnGraph};
use crate::rng::rng_from_seed;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

/// Homogeneous Poisson random geometric graph on an axis-aligned box
/// `[0, side_0] x ... x [0, side_{d-1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RggConfig {
    pub side_lengths: Vec<f64>,
    /// Expected agents per unit volume.
    pub rate: f64,
    pub radius: f64,
    pub seed: u64,
}

impl RggConfig {
    pub fn square(side: f64, rate: f64, radius: f64, seed: u64) -> Self {
        Self {
            side_lengths: vec![side, side],
            rate,
            radius,
            seed,
        }
    }

    pub fn volume(&self) -> f64 {
        self.side_lengths.iter().product()
    }

    pub fn expected_vertices(&self) -> f64 {
        self.rate * self.volume()
    }

    pub fn validate(&self) -> GraphResult<()> {
        if !(1..=3).contains(&self.side_lengths.len()) {
            return Err(GraphError::UnsupportedDimension(self.side_lengths.len()));
        }
        if self.side_lengths.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(GraphError::InvalidConfig("side lengths must be positive".into()));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(GraphError::InvalidConfig("rate must be positive".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(GraphError::InvalidRadius(self.radius));
        }
        Ok(())
    }
}

/// Samples a random geometric graph using the generator seeded from `cfg.seed`.
pub fn sample_rgg(cfg: &RggConfig) -> GraphResult<(WsnGraph, Realization)> {
    sample_rgg_with(cfg, &mut rng_from_seed(cfg.seed))
}

/// Draws the point count from a Poisson law with mean `rate * volume`, places
/// that many points uniformly in the box, and joins pairs within the radius.
pub fn sample_rgg_with<R: Rng + ?Sized>(
    cfg: &RggConfig,
    rng: &mut R,
) -> GraphResult<(WsnGraph, Realization)> {
    cfg.validate()?;
    let mean = cfg.expected_vertices();
    let count = Poisson::new(mean)
        .map_err(|e| GraphError::InvalidConfig(e.to_string()))?
        .sample(rng) as usize;
    let dim = cfg.side_lengths.len();
    let mut coords = Vec::with_capacity(count * dim);
    for _ in 0..count {
        for &side in &cfg.side_lengths {
            coords.push(rng.random::<f64>() * side);
        }
    }
    let x = Realization::new(dim, coords, cfg.radius)?;
    Ok((build_geometric_graph(&x), x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_count_matches_rate_times_area() {
        let cfg = RggConfig::square(40.0, 0.05, 15.0, 1);
        assert!((cfg.expected_vertices() - 80.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_graph() {
        let cfg = RggConfig::square(40.0, 0.05, 15.0, 9);
        assert_eq!(sample_rgg(&cfg).unwrap(), sample_rgg(&cfg).unwrap());
    }

    #[test]
    fn points_stay_in_domain() {
        let cfg = RggConfig {
            side_lengths: vec![10.0, 3.0, 2.0],
            rate: 2.0,
            radius: 1.0,
            seed: 4,
        };
        let (g, x) = sample_rgg(&cfg).unwrap();
        assert_eq!(g.n_vertices(), x.len());
        for i in 0..x.len() {
            for (c, s) in x.position(i).iter().zip(&cfg.side_lengths) {
                assert!(*c >= 0.0 && c <= s);
            }
        }
    }

    #[test]
    fn tiny_rate_gives_empty_graph() {
        let cfg = RggConfig::square(1.0, 1e-9, 1.0, 3);
        let (g, x) = sample_rgg(&cfg).unwrap();
        assert_eq!(g.n_vertices(), 0);
        assert!(x.is_empty());
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(sample_rgg(&RggConfig::square(0.0, 1.0, 1.0, 0)).is_err());
        assert!(sample_rgg(&RggConfig::square(1.0, 0.0, 1.0, 0)).is_err());
        assert!(sample_rgg(&RggConfig::square(1.0, 1.0, -1.0, 0)).is_err());
    }
}
