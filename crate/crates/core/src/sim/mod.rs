//! Experiment drivers: the banded-inversion error sweep, the localization
//! Monte Carlo study and the strip scan statistic, plus their CSV outputs.
//!
//! Every driver takes a master seed. Independent work items derive their own
//! generators from `(seed, index)`, so results do not depend on the number of
//! worker threads.

mod csv_out;
mod fig2;
mod localize;
mod scan;
mod scenario;

pub use csv_out::{
    first_trial_ellipses, write_ellipses_csv, write_fig2_csv, write_mse_csv, write_mse_total_csv, write_scan_csv,
};
pub use fig2::{fig2_matrix, fig2_means, run_fig2, Fig2Config, Fig2Row, FIG2_DIAGONAL};
pub use localize::{
    ellipses_from_record, export_ellipses, mse_curves, run_localization, run_trial, EllipseRow,
    LocalizationRun, MseCurves, TrialRecord, DEFAULT_ELLIPSE_LEVEL,
};
pub use scan::{run_scan, ScanConfig, ScanRecord, DEFAULT_RATES};
pub use scenario::{
    build_scenario, farthest_point_beacons, AgentSource, Algorithm, Motion, Scenario,
    ScenarioConfig,
};

use crate::banded::LinalgError;
use crate::filter::FilterError;
use crate::graph::io::IoError;
use crate::graph::GraphError;
use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("could not build a usable scenario: {0}")]
    Scenario(String),
    #[error("every trial diverged for {0}")]
    AllDiverged(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    StdIo(#[from] std::io::Error),
}

impl SimError {
    /// Whether the failure comes from the inputs rather than the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            SimError::Config(_) | SimError::Io(_) | SimError::Csv(_) | SimError::StdIo(_)
        )
    }
}

pub type SimResult<T> = Result<T, SimError>;
