//! Exponentiated Chen lifetimes, series and parallel systems built from
//! them, and numerical checks of stochastic orderings between systems.
//!
//! All evaluation is done in log space so that tail probabilities far below
//! `f64::MIN_POSITIVE` still compare correctly.

pub mod distribution;
pub mod error;
pub mod exec;
pub mod grid;
pub mod majorization;
pub mod math;
pub mod montecarlo;
pub mod ordering;
pub mod systems;

pub use distribution::{chen_cdf, weibull_transform_sf, EcdParams, LogProbability, Probability};
pub use error::{EcdError, Result};
pub use exec::Execution;
pub use grid::Grid;
pub use majorization::{
    majorizes, psi1, phi1, phi2, psi2, random_majorized, random_majorized_seeded, schur_scan,
    t_transform, ParamVector, SchurReport, SchurTarget, SchurVerdict,
};
pub use ordering::{
    check, check_hr, check_lr, check_rh, check_st, default_grid, find_violation, Direction,
    OrderingVerdict, Relation, ViolationTriple, Witness,
};
pub use systems::{ComponentSet, SystemKind, SystemPoint, SystemSpec};
