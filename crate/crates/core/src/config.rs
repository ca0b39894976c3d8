//! Experiment configuration: a JSON file describing the model, the induced
//! subgraph under study, the probe schedule, and which analyses to run for
//! which seeds.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{InducedMode, InducedSpec, ProbePlan};
use crate::geometry::Geometry;
use crate::model::ModelParams;
use crate::Real;

/// Analyses the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisKind {
    Strips,
    CoverBound,
    Expansion,
    Spectral,
    Walk,
    Rumor,
    Si,
    CutContrast,
}

impl std::fmt::Display for AnalysisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AnalysisKind::Strips => "strips",
            AnalysisKind::CoverBound => "cover_bound",
            AnalysisKind::Expansion => "expansion",
            AnalysisKind::Spectral => "spectral",
            AnalysisKind::Walk => "walk",
            AnalysisKind::Rumor => "rumor",
            AnalysisKind::Si => "si",
            AnalysisKind::CutContrast => "cut_contrast",
        };
        f.write_str(s)
    }
}

/// Model block of the config; the per-run seed comes from `seeds`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModelSection {
    pub n: usize,
    pub d: usize,
    pub tau: Real,
    pub alpha: Real,
    #[serde(default = "default_kernel_c")]
    pub kernel_c: Real,
    pub geometry: Geometry,
}

fn default_kernel_c() -> Real {
    1.0
}

fn default_c_prime() -> Real {
    1.0
}

fn default_c1_prime() -> Real {
    1.0
}

fn default_c2_prime() -> Real {
    2.0
}

fn default_mode() -> InducedMode {
    InducedMode::WeightThreshold
}

fn default_walk_eps() -> Real {
    0.25
}

fn default_walk_max_steps() -> usize {
    10_000
}

fn default_walk_max_vertices() -> usize {
    4_000
}

fn default_spread_coverage() -> Real {
    0.5
}

fn default_spread_beta() -> Real {
    1.0
}

fn default_spread_max_rounds() -> usize {
    10_000
}

fn default_cover_s() -> usize {
    3
}

fn default_cover_k() -> usize {
    1
}

fn default_cover_trials() -> usize {
    100
}

/// Everything one `run` invocation needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    /// Threshold exponent: V' keeps weights at scale (ln n)^gamma.
    pub gamma: Real,
    #[serde(default = "default_c_prime")]
    pub c_prime: Real,
    #[serde(default = "default_c1_prime")]
    pub c1_prime: Real,
    #[serde(default = "default_c2_prime")]
    pub c2_prime: Real,
    #[serde(default = "default_mode")]
    pub mode: InducedMode,
    #[serde(default)]
    pub probes: ProbePlan,
    /// One full pass per seed.
    pub seeds: Vec<u64>,
    pub experiments: Vec<AnalysisKind>,
    /// Accept gamma at or below the critical value 1/(3 - tau).
    #[serde(default)]
    pub allow_subcritical: bool,
    #[serde(default = "default_walk_eps")]
    pub walk_eps: Real,
    #[serde(default = "default_walk_max_steps")]
    pub walk_max_steps: usize,
    /// Walk powering is quadratic in the component size; larger components
    /// are skipped and reported.
    #[serde(default = "default_walk_max_vertices")]
    pub walk_max_vertices: usize,
    #[serde(default = "default_spread_coverage")]
    pub spread_coverage: Real,
    #[serde(default = "default_spread_beta")]
    pub spread_beta: Real,
    #[serde(default = "default_spread_max_rounds")]
    pub spread_max_rounds: usize,
    #[serde(default = "default_cover_s")]
    pub cover_s: usize,
    #[serde(default = "default_cover_k")]
    pub cover_k: usize,
    #[serde(default = "default_cover_trials")]
    pub cover_trials: usize,
}

impl ExperimentConfig {
    /// Model parameters of one run.
    pub fn params_for_seed(&self, seed: u64) -> ModelParams {
        ModelParams {
            n: self.model.n,
            d: self.model.d,
            tau: self.model.tau,
            alpha: self.model.alpha,
            kernel_c: self.model.kernel_c,
            geometry: self.model.geometry,
            seed,
        }
    }

    /// Induced-subgraph constants in the form the expansion code expects.
    pub fn induced_spec(&self) -> InducedSpec {
        InducedSpec {
            mode: self.mode,
            c_prime: self.c_prime,
            c1_prime: self.c1_prime,
            c2_prime: self.c2_prime,
        }
    }

    /// Domain checks beyond what deserialization enforces.
    pub fn validate(&self) -> Result<()> {
        self.params_for_seed(0).validate()?;
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::param("gamma must be finite and >= 0"));
        }
        if self.model.tau < 3.0 {
            let critical = 1.0 / (3.0 - self.model.tau);
            if self.gamma <= critical && !self.allow_subcritical {
                return Err(Error::param(format!(
                    "gamma = {} is at or below the critical value 1/(3 - tau) = {}; \
                     the induced subgraph is not guaranteed to expand \
                     (set allow_subcritical to run anyway)",
                    self.gamma, critical
                )));
            }
        }
        for (name, value) in [
            ("c_prime", self.c_prime),
            ("c1_prime", self.c1_prime),
            ("c2_prime", self.c2_prime),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::param(format!("{name} must be finite and > 0")));
            }
        }
        if self.c1_prime >= self.c2_prime {
            return Err(Error::param("band needs c1_prime < c2_prime"));
        }
        if self.seeds.is_empty() {
            return Err(Error::param("seeds must not be empty"));
        }
        if self.experiments.is_empty() {
            return Err(Error::param("experiments must not be empty"));
        }
        if !(self.walk_eps > 0.0 && self.walk_eps < 1.0) {
            return Err(Error::param("walk_eps must lie in (0, 1)"));
        }
        if !(self.spread_coverage > 0.0 && self.spread_coverage <= 1.0) {
            return Err(Error::param("spread_coverage must lie in (0, 1]"));
        }
        if !(self.spread_beta > 0.0 && self.spread_beta <= 1.0) {
            return Err(Error::param("spread_beta must lie in (0, 1]"));
        }
        if self.cover_s == 0 || self.cover_k == 0 || self.cover_k > self.cover_s {
            return Err(Error::param("cover bound needs 1 <= k <= s"));
        }
        if self.cover_trials == 0 {
            return Err(Error::param("cover_trials must be positive"));
        }
        Ok(())
    }
}

/// Parse and validate a JSON config file. Parse errors carry the file path
/// and serde's field-precise message (with line and column).
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::format(shown.clone(), format!("cannot read config: {e}")))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| Error::format(shown, format!("invalid config: {e}")))?;
    config.validate()?;
    Ok(config)
}
