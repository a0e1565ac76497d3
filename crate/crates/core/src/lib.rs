//! Rate regions and secrecy for the cognitive radio channel with
//! confidential messages.
//!
//! * [`prob`]: joint pmfs with named axes, entropies, typicality.
//! * [`channel`]: discrete and Gaussian channel models.
//! * [`gaussian`]: closed-form Gaussian regions and the four-curve example sweep.
//! * [`bounds`]: discrete inner/outer/capacity regions and their search.
//! * [`region`]: Pareto frontiers, hulls, CSV.
//! * [`binning`]: a finite-length simulator of the binning scheme.
//! * [`verify`]: the acceptance checks.

pub mod binning;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod gaussian;
pub mod prob;
pub mod region;
pub mod verify;

pub use binning::{
    build_codebook, derive_scheme_rates, exact_equivocation, run_trials, simulate, Codebook,
    Observer, Scheme, SchemeInfo, SchemeRates, SimConfig, SimReport,
};
pub use bounds::{
    check_condition, search_region, AuxAssignment, AuxCards, BoundKind, BoundSpec, Condition,
    ConditionReport, SearchOutcome,
};
pub use channel::{load_channel, write_channel, DiscreteCrc, GaussianCrc};
pub use error::{Error, Result};
pub use gaussian::{psi, sweep_region, GaussPoint, SweepMode};
pub use prob::{Info, JointPmf, Sequence};
pub use region::{Dims, PointMeta, RatePoint, Region};
