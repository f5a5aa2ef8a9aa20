//! Banded extended Kalman filtering for large sensor-network localization.
//!
//! The crate is organised bottom-up:
//!
//! - [`banded`]: symmetric band storage and the L-banded inverse.
//! - [`graph`]: geometric graphs, vertex relabeling, bandwidth bounds and
//!   random geometric graphs.
//! - [`model`]: motion and distance-measurement models, the sparse Jacobian
//!   and the measurement information matrix.
//! - [`filter`]: the banded EKF recursion.
//! - [`sim`]: experiment drivers and CSV output.
//! - [`cli`]: the `lbekf` command-line front end.

pub mod banded;
pub mod graph;
pub mod output;
pub mod rng;
pub mod filter;
pub mod model;
pub mod sim;
pub mod cli;
