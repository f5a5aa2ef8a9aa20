//! The L-banded extended Kalman filter.
//!
//! One step, with `L` the band parameter and `x` the current estimate:
//!
//! ```text
//! H   = jacobian(x)
//! P   = M + sigma_p I
//! Pi  = lbinv(P, L)
//! M'  = lbinv(Pi + H^T R^-1 H, L)
//! x'  = x + v + M' H^T R^-1 (y - h(x))
//! ```
//!
//! With `L = n - 1` every `lbinv` is an exact inverse and the step is the
//! ordinary EKF.

use crate::banded::{l_banded_inverse, BandedSymMatrix, DenseSymMatrix, LinalgError, SymMatrix};
use crate::model::{gain_apply, h_eval, information_matrix, jacobian, MeasurementBatch, ModelError, WsnModel};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("band parameter {band} out of range for state dimension {n}")]
    InvalidBand { band: usize, n: usize },
    #[error("initial variance must be positive, got {0}")]
    InvalidVariance(f64),
    #[error("state has dimension {found}, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("agent {agent} out of range for {n} agents")]
    AgentOutOfRange { agent: usize, n: usize },
    #[error("filter diverged at step {step}: {cause}")]
    Diverged { step: usize, cause: Divergence },
    #[error("model evaluation failed at step {step}: {source}")]
    Model { step: usize, source: ModelError },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Divergence {
    #[error("principal window {lo}..={hi} not invertible")]
    SingularSubmatrix { lo: usize, hi: usize },
    #[error("covariance diagonal {index} is {value:e}")]
    NonPositiveDiagonal { index: usize, value: f64 },
    #[error("estimate component {index} is not finite")]
    NonFiniteEstimate { index: usize },
}

/// Estimate, banded covariance estimate, band parameter and step count.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    pub xhat: Vec<f64>,
    pub cov: BandedSymMatrix,
    pub band: usize,
    pub k: usize,
}

impl FilterState {
    pub fn dim(&self) -> usize {
        self.xhat.len()
    }

    /// Whether the band covers the whole matrix, i.e. the filter is the exact EKF.
    pub fn is_full_band(&self) -> bool {
        self.band + 1 == self.dim()
    }

    /// `d x d` diagonal block of the covariance for `agent`.
    pub fn covariance_block(&self, agent: usize, d: usize) -> Result<DenseSymMatrix, FilterError> {
        let n_agents = self.dim() / d;
        if agent >= n_agents {
            return Err(FilterError::AgentOutOfRange { agent, n: n_agents });
        }
        let base = agent * d;
        Ok(DenseSymMatrix::from_lower_fn(d, |i, j| {
            self.cov.get(base + i, base + j)
        }))
    }
}

/// Initial state with `M_0 = var0 I`.
pub fn init_filter(xhat0: Vec<f64>, var0: f64, band: usize) -> Result<FilterState, FilterError> {
    let n = xhat0.len();
    if n == 0 || band >= n {
        return Err(FilterError::InvalidBand { band, n });
    }
    if !(var0 > 0.0 && var0.is_finite()) {
        return Err(FilterError::InvalidVariance(var0));
    }
    Ok(FilterState {
        xhat: xhat0,
        cov: BandedSymMatrix::scaled_identity(n, var0),
        band,
        k: 0,
    })
}

fn divergence(step: usize, err: LinalgError) -> FilterError {
    let cause = match err {
        LinalgError::SingularSubmatrix { lo, hi } => Divergence::SingularSubmatrix { lo, hi },
        LinalgError::NotPositiveDefinite { index, value } => {
            Divergence::NonPositiveDiagonal { index, value }
        }
        other => {
            return FilterError::Model {
                step,
                source: ModelError::Linalg(other),
            }
        }
    };
    FilterError::Diverged { step, cause }
}

/// One banded EKF step, linearized at the pre-update estimate.
pub fn lb_ekf_step(
    state: &FilterState,
    model: &WsnModel,
    v: &[f64],
    y: &MeasurementBatch,
) -> Result<FilterState, FilterError> {
    let n = model.state_dim();
    let step = state.k + 1;
    for len in [state.dim(), v.len()] {
        if len != n {
            return Err(FilterError::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    if y.len() != model.meas_len() {
        return Err(FilterError::DimensionMismatch {
            expected: model.meas_len(),
            found: y.len(),
        });
    }
    let model_err = |source| FilterError::Model { step, source };

    let h = jacobian(&state.xhat, model).map_err(model_err)?;
    let p = state.cov.add_scaled_identity(model.sigma_p);
    let p_inv = l_banded_inverse(&p, state.band).map_err(|e| divergence(step, e))?;
    let s = information_matrix(&h, model);
    let info = p_inv.add(&s).map_err(|e| divergence(step, e))?;
    let cov = l_banded_inverse(&info, state.band).map_err(|e| divergence(step, e))?;

    if let Some((index, &value)) = cov
        .diagonal(0)
        .iter()
        .enumerate()
        .find(|(_, &v)| !(v > 0.0 && v.is_finite()))
    {
        return Err(FilterError::Diverged {
            step,
            cause: Divergence::NonPositiveDiagonal { index, value },
        });
    }

    let predicted = h_eval(&state.xhat, model).map_err(model_err)?;
    let innovation: Vec<f64> = y
        .as_slice()
        .iter()
        .zip(&predicted)
        .map(|(a, b)| a - b)
        .collect();
    let correction = gain_apply(&cov, &h, model, &innovation).map_err(model_err)?;
    let xhat: Vec<f64> = state
        .xhat
        .iter()
        .zip(v)
        .zip(&correction)
        .map(|((x, vi), c)| x + vi + c)
        .collect();
    if let Some(index) = xhat.iter().position(|v| !v.is_finite()) {
        return Err(FilterError::Diverged {
            step,
            cause: Divergence::NonFiniteEstimate { index },
        });
    }
    Ok(FilterState {
        xhat,
        cov,
        band: state.band,
        k: step,
    })
}

/// Exact EKF step: [`lb_ekf_step`] with the band covering the whole state.
pub fn ekf_step(
    state: &FilterState,
    model: &WsnModel,
    v: &[f64],
    y: &MeasurementBatch,
) -> Result<FilterState, FilterError> {
    let full = FilterState {
        band: state.dim().saturating_sub(1),
        ..state.clone()
    };
    lb_ekf_step(&full, model, v, y)
}
