//! Monte Carlo harness, exact small-instance oracles, sweeps and output
//! tables.

use thiserror::Error;

use crate::coupling::CouplingError;
use crate::ctp::CtpError;
use crate::fpp::FppError;
use crate::graph::GraphError;
use crate::landscape::LandscapeError;
use crate::numerics::NumericsError;

pub mod config;
pub mod estimate;
pub mod exact;
pub mod mc;
pub mod output;
pub mod stats;
pub mod sweep;

pub use config::{AccessPath, AlphaSpec, ExperimentConfig, GraphSpec, Observable, OutputFormat, TargetSpec};
pub use estimate::{CiMethod, Estimate};
pub use exact::exact_accessibility_small;
pub use mc::{mc_accessibility, mc_descent_count, mc_path_count, mc_reduced_fpp_cdf, CdfPoint};
pub use sweep::{run_sweep, SweepRow, SweepTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
    #[error(transparent)]
    Fpp(#[from] FppError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Ctp(#[from] CtpError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("output error: {0}")]
    Output(String),
    #[error("the all-ones target needs a hypercube")]
    OnesNeedsHypercube,
    #[error("exact enumeration supports at most {max} vertices, got {vertices}")]
    TooLarge { vertices: usize, max: usize },
    #[error("a sweep needs at least one configuration")]
    EmptySweep,
}
