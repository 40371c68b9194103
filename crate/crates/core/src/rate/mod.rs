//! Rate functions and decay predictions.
//!
//! The two geometric rate functions are built on Gaussian measures of
//! shifted and dilated target sets: `i_rate` is the smallest shift magnitude
//! making the set carry mass `p`, and `j_rate` the smallest variance
//! reduction `r` for which some shifted copy of the set, dilated by
//! `1/√(1−r)`, carries mass `p`. The walk-side rate function is the Legendre
//! transform of the step law's log-MGF. `predict_rate` routes a model to the
//! decay regime its tails select and returns the scale plus constants.

mod legendre;
mod predict;
mod rates;
mod target_set;

pub use legendre::{
    legendre, optimize_phi, weibull_sum_rate, PhiError, PhiOptimum, PhiRegime, WeibullSumRate,
};
pub use predict::{
    continuity_probe, predict_rate, DecayScale, OffspringTailKind, OffspringTraits, PredictError,
    RatePrediction, RegimeTag, StepTraits,
};
pub use rates::{gaussian_set_measure, i_rate, i_rate_full, j_rate, j_rate_full, RateError, ShiftRate, VarianceRate};
pub use target_set::{SetParseError, TargetSet};
