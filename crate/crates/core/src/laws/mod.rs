//! Offspring and displacement distribution families.
//!
//! Constructors validate the standing assumptions (no extinction mass,
//! supercritical mean, symmetric unit-variance steps) and report every
//! derived constant the rate predictions need, so downstream modules never
//! re-derive tail behaviour from samples.

mod config;
mod offspring;
mod step;

pub use config::{parse_kv_block, ConfigError};
pub use offspring::{OffspringLaw, OffspringSpec, OffspringTail};
pub use step::{StepLaw, StepSpec, StepTailClass};

/// Construction-time validation failure.
#[derive(Clone, Debug, PartialEq)]
pub enum LawError {
    /// Mass at zero offspring is excluded by assumption.
    ExtinctionMass(f64),
    /// A single child with probability one never changes the population.
    DegenerateSingleChild,
    /// Empty or all-zero support.
    EmptySupport,
    /// A parameter is outside its admissible range.
    BadParameter { name: &'static str, value: f64, requirement: &'static str },
    /// No member of the family satisfies both total mass 1 and variance 1.
    UnitVarianceUnreachable(String),
}

impl std::fmt::Display for LawError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LawError::ExtinctionMass(p) => {
                write!(f, "offspring mass at 0 must be zero, got {p}")
            }
            LawError::DegenerateSingleChild => {
                write!(f, "offspring law must put mass above one child (p1 < 1)")
            }
            LawError::EmptySupport => write!(f, "law has empty support"),
            LawError::BadParameter { name, value, requirement } => {
                write!(f, "parameter {name} = {value} violates: {requirement}")
            }
            LawError::UnitVarianceUnreachable(msg) => {
                write!(f, "cannot normalize to unit variance: {msg}")
            }
        }
    }
}

impl std::error::Error for LawError {}
