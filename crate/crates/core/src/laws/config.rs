//! Key-value text blocks for law specs.
//!
//! Field names are fixed: `variant`, `beta`, `l`, `alpha`, `lambda`,
//! `kappa`, `pmf`, `shift`. A block is lines of `key = value`; `pmf` values
//! are comma-separated `k:mass` pairs. Blank lines and `#` comments are
//! ignored.

use super::{OffspringSpec, StepSpec};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigError {
    MalformedLine(String),
    MissingField(&'static str),
    UnknownVariant(String),
    BadNumber { field: String, text: String },
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::MalformedLine(l) => write!(f, "malformed config line: {l:?}"),
            ConfigError::MissingField(k) => write!(f, "missing field {k:?}"),
            ConfigError::UnknownVariant(v) => write!(f, "unknown variant {v:?}"),
            ConfigError::BadNumber { field, text } => {
                write!(f, "field {field:?} is not a number: {text:?}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parse a `key = value` block into a map; later keys override earlier ones.
pub fn parse_kv_block(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::MalformedLine(raw.to_string()));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn get_f64(map: &BTreeMap<String, String>, key: &'static str) -> Result<f64, ConfigError> {
    let text = map.get(key).ok_or(ConfigError::MissingField(key))?;
    text.parse().map_err(|_| ConfigError::BadNumber { field: key.into(), text: text.clone() })
}

fn get_u64_or(map: &BTreeMap<String, String>, key: &'static str, default: u64) -> Result<u64, ConfigError> {
    match map.get(key) {
        None => Ok(default),
        Some(text) => text
            .parse()
            .map_err(|_| ConfigError::BadNumber { field: key.into(), text: text.clone() }),
    }
}

impl OffspringSpec {
    pub fn from_kv(map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let variant = map.get("variant").ok_or(ConfigError::MissingField("variant"))?;
        match variant.as_str() {
            "finite" => {
                let text = map.get("pmf").ok_or(ConfigError::MissingField("pmf"))?;
                let mut entries = Vec::new();
                for piece in text.split(',') {
                    let piece = piece.trim();
                    if piece.is_empty() {
                        continue;
                    }
                    let Some((k, p)) = piece.split_once(':') else {
                        return Err(ConfigError::MalformedLine(piece.to_string()));
                    };
                    let k: u64 = k.trim().parse().map_err(|_| ConfigError::BadNumber {
                        field: "pmf".into(),
                        text: piece.to_string(),
                    })?;
                    let p: f64 = p.trim().parse().map_err(|_| ConfigError::BadNumber {
                        field: "pmf".into(),
                        text: piece.to_string(),
                    })?;
                    entries.push((k, p));
                }
                Ok(OffspringSpec::FiniteSupport(entries))
            }
            "zipf_pareto" => Ok(OffspringSpec::ZipfPareto {
                beta: get_f64(map, "beta")?,
                shift: get_u64_or(map, "shift", 1)?,
            }),
            "discrete_weibull" => Ok(OffspringSpec::DiscreteWeibull {
                beta: get_f64(map, "beta")?,
                l: get_f64(map, "l")?,
                shift: get_u64_or(map, "shift", 1)?,
            }),
            other => Err(ConfigError::UnknownVariant(other.to_string())),
        }
    }

    pub fn to_kv_block(&self) -> String {
        match self {
            OffspringSpec::FiniteSupport(entries) => {
                let pmf = entries
                    .iter()
                    .map(|(k, p)| format!("{k}:{p}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                format!("variant = finite\npmf = {pmf}\n")
            }
            OffspringSpec::ZipfPareto { beta, shift } => {
                format!("variant = zipf_pareto\nbeta = {beta}\nshift = {shift}\n")
            }
            OffspringSpec::DiscreteWeibull { beta, l, shift } => {
                format!("variant = discrete_weibull\nbeta = {beta}\nl = {l}\nshift = {shift}\n")
            }
        }
    }
}

impl StepSpec {
    pub fn from_kv(map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let variant = map.get("variant").ok_or(ConfigError::MissingField("variant"))?;
        match variant.as_str() {
            "rademacher" => Ok(StepSpec::Rademacher),
            "gaussian" => Ok(StepSpec::Gaussian),
            "bounded" => Ok(StepSpec::BoundedSymmetric { ess_sup: get_f64(map, "l")? }),
            "symmetric_weibull" => Ok(StepSpec::SymmetricWeibull {
                alpha: get_f64(map, "alpha")?,
                lambda: get_f64(map, "lambda")?,
            }),
            "symmetric_pareto" => Ok(StepSpec::SymmetricPareto {
                alpha: get_f64(map, "alpha")?,
                kappa: get_f64(map, "kappa")?,
            }),
            other => Err(ConfigError::UnknownVariant(other.to_string())),
        }
    }

    pub fn to_kv_block(&self) -> String {
        match self {
            StepSpec::Rademacher => "variant = rademacher\n".into(),
            StepSpec::Gaussian => "variant = gaussian\n".into(),
            StepSpec::BoundedSymmetric { ess_sup } => {
                format!("variant = bounded\nl = {ess_sup}\n")
            }
            StepSpec::SymmetricWeibull { alpha, lambda } => {
                format!("variant = symmetric_weibull\nalpha = {alpha}\nlambda = {lambda}\n")
            }
            StepSpec::SymmetricPareto { alpha, kappa } => {
                format!("variant = symmetric_pareto\nalpha = {alpha}\nkappa = {kappa}\n")
            }
        }
    }
}
