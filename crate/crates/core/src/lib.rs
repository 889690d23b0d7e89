//! Bell tests against models that allow a causal influence from one party's
//! outcome to the other's.
//!
//! The crate covers the full chain from a two-qubit polarization state to the
//! numbers reported by an interventional Bell experiment:
//!
//! - [`quantum`]: states, equatorial measurements with lossy detectors and
//!   Born-rule behaviors.
//! - [`inequalities`]: the CHSH functional over its relabelling symmetries
//!   and the three-setting functional `S3`, whose bound of 4 holds for every
//!   one-way outcome-influence model.
//! - [`polytope`]: deterministic strategies of those models, the minimal
//!   average causal effect (ACE) linear program and vertex checks.
//! - [`lp`]: a dense two-phase simplex solver.
//! - [`experiment`]: Poisson simulation of runs with and without the
//!   intervention `do(a)` and the plug-in ACE estimator.
//! - [`noise`]: Monte-Carlo percentile summaries and detector-efficiency
//!   and visibility thresholds.

#![allow(clippy::needless_range_loop)]

pub mod behavior;
pub mod error;
pub mod experiment;
pub mod inequalities;
pub mod lp;
pub mod noise;
pub mod polytope;
pub mod quantum;

pub use behavior::{Behavior, Scenario};
pub use error::{Error, Result};
pub use experiment::{
    ace_point, estimate_ace, intervened_distribution, simulate_run, AceEstimate, AceEstimator, CountsTable,
    InterventionConfig, RunModel, SYSTEMATIC_TILT,
};
pub use inequalities::{chsh_value, s3_value, BellFunctional, ChshReport, S3Report};
pub use lp::{LinearProgram, LpOutcome, LpStatus};
pub use noise::{critical_thresholds, mc_ace_distribution, PercentileSummary, Sampling, ThresholdResult};
pub use polytope::{
    ace_closed_form, min_ace, pr_box, verify_s3_bound, verify_vertex_bound, AceResult, DeterministicStrategy, Direction,
};
pub use quantum::{born_behavior, DetectorModel, EquatorialSetting, TwoQubitState};
