//! The JSON run configuration.
//!
//! ```json
//! {
//!   "group": { "kind": "cyclic", "n": 11 },
//!   "A": [1, 10, 3, 8], "B": [2, 9, 4, 7], "delta": 4,
//!   "local_codes": { "k_a": 1, "k_b": 3, "seed_a": 1, "seed_b": 2 },
//!   "decoder": { "role": "Xerror", "epsilon": 0.25, "strategy": { "kind": "exhaustive" } },
//!   "kappa": { "samples": 2000, "seed": 7 },
//!   "distance": { "trials": 400, "seed": 1 },
//!   "experiment": { "grid": [{ "model": "fixed_weight", "w": 2 }], "trials": 500,
//!                   "decoders": ["sequential", "parallel"], "seed": 2000, "record_timing": false }
//! }
//! ```
//!
//! `local_codes` takes either dimensions with seeds or explicit generator
//! rows `gen_a`, `gen_b`. Every error carries a JSON pointer to the field.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::SquareComplex;
use crate::decoder::{DecoderConfig, Role, SearchStrategy};
use crate::gf2::BitMatrix;
use crate::groups::{GeneratorSet, Group, GroupSpec, Side};
use crate::local_codes::{LocalCodePair, DEFAULT_NORM_BUDGET};
use crate::sim::SweepConfig;
use crate::tanner::{CodeError, QuantumTannerCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{pointer}: {message}")]
pub struct ConfigError {
    pub pointer: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(pointer: impl Into<String>, message: impl ToString) -> Self {
        Self {
            pointer: pointer.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupSpec,
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    pub delta: usize,
    pub local_codes: LocalCodesSpec,
    #[serde(default)]
    pub decoder: DecoderSection,
    #[serde(default)]
    pub kappa: KappaSection,
    #[serde(default)]
    pub distance: DistanceSection,
    #[serde(default)]
    pub experiment: Option<SweepConfig>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalCodesSpec {
    pub k_a: Option<usize>,
    pub k_b: Option<usize>,
    pub seed_a: Option<u64>,
    pub seed_b: Option<u64>,
    pub gen_a: Option<Vec<Vec<u8>>>,
    pub gen_b: Option<Vec<Vec<u8>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderSection {
    pub role: Role,
    pub epsilon: f64,
    pub strategy: Option<SearchStrategy>,
    pub budget: usize,
    pub round_limit: Option<usize>,
    pub fixed_rounds: Option<usize>,
}

impl Default for DecoderSection {
    fn default() -> Self {
        Self {
            role: Role::Xerror,
            epsilon: 0.25,
            strategy: None,
            budget: DEFAULT_NORM_BUDGET,
            round_limit: None,
            fixed_rounds: None,
        }
    }
}

impl DecoderSection {
    pub fn decoder_config(&self) -> DecoderConfig {
        DecoderConfig {
            epsilon: self.epsilon,
            strategy: self.strategy,
            budget: self.budget,
            round_limit: self.round_limit,
            fixed_rounds: self.fixed_rounds,
            audit: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KappaSection {
    pub samples: usize,
    pub seed: u64,
}

impl Default for KappaSection {
    fn default() -> Self {
        Self { samples: 2000, seed: 7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistanceSection {
    pub trials: usize,
    pub seed: u64,
}

impl Default for DistanceSection {
    fn default() -> Self {
        Self { trials: 200, seed: 1 }
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{key}")),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl RunConfig {
    /// Parses and validates; nothing is built yet.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| ConfigError::new(pointer_of(e.path()), e.inner()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.delta == 0 {
            return Err(ConfigError::new("/delta", "Δ must be positive"));
        }
        if self.a.len() != self.delta {
            return Err(ConfigError::new(
                "/delta",
                format!("Δ = {} but A has {} elements", self.delta, self.a.len()),
            ));
        }
        if self.b.len() != self.delta {
            return Err(ConfigError::new(
                "/delta",
                format!("Δ = {} but B has {} elements", self.delta, self.b.len()),
            ));
        }
        let lc = &self.local_codes;
        match (&lc.gen_a, &lc.gen_b, lc.k_a, lc.k_b) {
            (Some(ga), Some(gb), None, None) => {
                for (name, rows) in [("gen_a", ga), ("gen_b", gb)] {
                    for (i, row) in rows.iter().enumerate() {
                        if row.len() != self.delta {
                            return Err(ConfigError::new(
                                format!("/local_codes/{name}/{i}"),
                                format!("row has length {} but Δ = {}", row.len(), self.delta),
                            ));
                        }
                        if let Some(j) = row.iter().position(|&x| x > 1) {
                            return Err(ConfigError::new(format!("/local_codes/{name}/{i}/{j}"), "entries must be 0 or 1"));
                        }
                    }
                }
            }
            (None, None, Some(ka), Some(kb)) => {
                for (name, k) in [("k_a", ka), ("k_b", kb)] {
                    if k > self.delta {
                        return Err(ConfigError::new(
                            format!("/local_codes/{name}"),
                            format!("dimension {k} exceeds Δ = {}", self.delta),
                        ));
                    }
                }
            }
            _ => {
                return Err(ConfigError::new(
                    "/local_codes",
                    "give either k_a and k_b (with optional seeds) or gen_a and gen_b",
                ))
            }
        }
        let eps = self.decoder.epsilon;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(ConfigError::new("/decoder/epsilon", format!("ε = {eps} outside (0, 1)")));
        }
        if let Some(exp) = &self.experiment {
            if exp.decoders.is_empty() {
                return Err(ConfigError::new("/experiment/decoders", "at least one decoder is required"));
            }
            if exp.grid.is_empty() {
                return Err(ConfigError::new("/experiment/grid", "grid must not be empty"));
            }
        }
        Ok(())
    }

    pub fn local_code_pair(&self) -> Result<LocalCodePair, ConfigError> {
        let lc = &self.local_codes;
        let pair = match (&lc.gen_a, &lc.gen_b) {
            (Some(ga), Some(gb)) => {
                LocalCodePair::new(self.delta, BitMatrix::from_table(self.delta, ga), BitMatrix::from_table(self.delta, gb))
            }
            _ => LocalCodePair::random(
                self.delta,
                lc.k_a.unwrap_or(0),
                lc.k_b.unwrap_or(0),
                lc.seed_a.unwrap_or(1),
                lc.seed_b.unwrap_or(2),
            ),
        };
        pair.map_err(|e| ConfigError::new("/local_codes", e))
    }

    pub fn complex(&self) -> Result<SquareComplex, ConfigError> {
        let group = Group::build(&self.group).map_err(|e| ConfigError::new("/group", e))?;
        let a = GeneratorSet::new(&group, self.a.clone(), Side::A).map_err(|e| ConfigError::new("/A", e))?;
        let b = GeneratorSet::new(&group, self.b.clone(), Side::B).map_err(|e| ConfigError::new("/B", e))?;
        SquareComplex::new(group, a, b).map_err(|e| ConfigError::new("/delta", e))
    }

    pub fn build_code(&self) -> Result<QuantumTannerCode, BuildError> {
        let complex = self.complex()?;
        let pair = self.local_code_pair()?;
        Ok(QuantumTannerCode::assemble(complex, pair)?)
    }
}

/// The shipped reference configurations.
pub const REF_TINY: &str = include_str!("../../../../configs/ref-tiny.json");
pub const REF_SMALL: &str = include_str!("../../../../configs/ref-small.json");
pub const HAMMING8: &str = include_str!("../../../../configs/hamming8.json");
