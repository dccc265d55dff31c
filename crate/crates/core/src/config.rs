//! JSON run configuration shared by every CLI subcommand.
//!
//! The model and grid sections are always required; each subcommand reads
//! its own optional section and fails with a configuration error when it is
//! missing. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Result, SpcError};
use crate::evolution::{PropagationOptions, Schedule, DEFAULT_STEP_FACTOR, MAX_STEP_FACTOR};
use crate::grid::RadialGrid;
use crate::potential::{PotentialModel, Shape, Sign, BASELINE_RADIUS};
use crate::studies::{DichotomyConfig, ShortTimeStudyConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Value(f64),
    /// Only the string "auto" is accepted.
    Keyword(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Well,
    Uniform,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub shape: ShapeKind,
    #[serde(rename = "R", default = "baseline_radius")]
    pub radius: f64,
    pub lambda_c: LambdaSpec,
    pub lambda_slope: f64,
    pub sign: Sign,
    #[serde(default = "default_kappa")]
    pub kappa: i32,
    /// Coupling range searched when `lambda_c` is "auto".
    #[serde(default = "default_search")]
    pub search: (f64, f64),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationConfig {
    #[serde(default = "default_step_factor")]
    pub step_factor: f64,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self { step_factor: DEFAULT_STEP_FACTOR, sample_stride: 1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaList {
    pub sigmas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PinKind {
    /// Pin the numerator constant from the overlap integral.
    C,
    /// Pin C₀ to the statics value.
    C0,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub sigmas: Vec<f64>,
    #[serde(default = "default_pin")]
    pub pin: PinKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KWindow {
    pub k_min: f64,
    pub k_max: f64,
    pub k_points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub schedule: Schedule,
    /// Momentum window of the final-state spectrum, if wanted.
    #[serde(default)]
    pub spectrum: Option<KWindow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticDecayConfig {
    pub sigmas: Vec<f64>,
    pub epsilons: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    /// Time-dependent crossing σ(s) = s.
    Full,
    /// Frozen operator at the self-consistent σ.
    Static,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub mode: ScalingMode,
    pub epsilons: Vec<f64>,
    /// End of the crossing runs (full mode).
    #[serde(default)]
    pub s_max: Option<f64>,
    /// σ values at which τ_½ is tabulated (static mode).
    #[serde(default)]
    pub sigma_table: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub grid: GridConfig,
    /// Outputs never depend on wall-clock or randomness; only `true` is accepted.
    #[serde(default = "yes")]
    pub deterministic: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub propagation: PropagationConfig,
    #[serde(default)]
    pub track: Option<SigmaList>,
    #[serde(default)]
    pub resonance: Option<SigmaList>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
    #[serde(default)]
    pub evolve: Option<EvolveConfig>,
    #[serde(default)]
    pub static_decay: Option<StaticDecayConfig>,
    #[serde(default)]
    pub short_time: Option<ShortTimeStudyConfig>,
    #[serde(default)]
    pub scaling: Option<ScalingConfig>,
    #[serde(default)]
    pub spectrum_compare: Option<DichotomyConfig>,
}

fn baseline_radius() -> f64 {
    BASELINE_RADIUS
}
fn default_kappa() -> i32 {
    1
}
fn default_search() -> (f64, f64) {
    (0.5, 20.0)
}
fn default_step_factor() -> f64 {
    DEFAULT_STEP_FACTOR
}
fn default_stride() -> usize {
    1
}
fn default_pin() -> PinKind {
    PinKind::C
}
fn yes() -> bool {
    true
}

impl RunConfig {
    /// Parses and validates a configuration document. Also returns the
    /// document as a JSON value for hashing.
    pub fn from_json(text: &str) -> Result<(Self, Value)> {
        let value: Value = serde_json::from_str(text).map_err(|e| SpcError::Config(format!("invalid JSON: {e}")))?;
        let cfg: RunConfig =
            serde_json::from_value(value.clone()).map_err(|e| SpcError::Config(format!("schema violation: {e}")))?;
        cfg.validate()?;
        Ok((cfg, value))
    }

    pub fn load(path: &Path) -> Result<(Self, Value)> {
        let text = std::fs::read_to_string(path).map_err(|e| SpcError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            SpcError::Config(m) => SpcError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Collects every problem found rather than stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !self.deterministic {
            problems.push("deterministic must be true".to_string());
        }
        if let LambdaSpec::Keyword(k) = &self.model.lambda_c {
            if k != "auto" {
                problems.push(format!("model.lambda_c must be a number or \"auto\", got \"{k}\""));
            }
        }
        if let Err(e) = self.template_model().validate() {
            problems.push(format!("model: {e}"));
        }
        if let Err(e) = self.radial_grid() {
            problems.push(format!("grid: {e}"));
        }
        let p = self.propagation;
        if !(p.step_factor > 0.0 && p.step_factor <= MAX_STEP_FACTOR) {
            problems.push(format!("propagation.step_factor must lie in (0, 0.5], got {}", p.step_factor));
        }
        if p.sample_stride == 0 {
            problems.push("propagation.sample_stride must be at least 1".into());
        }
        if let Some(e) = &self.evolve {
            if let Err(err) = e.schedule.validate() {
                problems.push(format!("evolve.schedule: {err}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SpcError::Config(format!("schema violation:\n  - {}", problems.join("\n  - "))))
        }
    }

    /// The model with `lambda_c` as given (zero when "auto").
    pub fn template_model(&self) -> PotentialModel {
        let m = &self.model;
        let shape = match m.shape {
            ShapeKind::Well => Shape::Well { radius: m.radius },
            ShapeKind::Uniform => Shape::Uniform,
        };
        let lambda_c = match m.lambda_c {
            LambdaSpec::Value(v) => v,
            LambdaSpec::Keyword(_) => 0.0,
        };
        PotentialModel { shape, lambda_c, lambda_slope: m.lambda_slope, sign: m.sign, kappa: m.kappa }
    }

    pub fn lambda_is_auto(&self) -> bool {
        matches!(self.model.lambda_c, LambdaSpec::Keyword(_))
    }

    pub fn radial_grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.grid.r_max, self.grid.n)
    }

    pub fn propagation_options(&self) -> PropagationOptions {
        PropagationOptions {
            step_factor: self.propagation.step_factor,
            sample_stride: self.propagation.sample_stride,
            stop_below: None,
        }
    }

    /// The section a subcommand needs, or a configuration error naming it.
    pub fn section<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T> {
        section
            .as_ref()
            .ok_or_else(|| SpcError::Config(format!("missing required section \"{name}\"")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"model": {"shape": "well", "R": 0.5, "lambda_c": "auto", "lambda_slope": 1.0, "sign": "+1"},
                           "grid": {"r_max": 20.0, "n": 1000}}"#;

    #[test]
    fn baseline_parses() {
        let (cfg, _) = RunConfig::from_json(BASE).unwrap();
        assert!(cfg.lambda_is_auto());
        assert_eq!(cfg.template_model().kappa, 1);
        assert_eq!(cfg.radial_grid().unwrap().n, 1000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = BASE.replace("\"n\": 1000", "\"n\": 1000, \"m\": 3");
        assert!(matches!(RunConfig::from_json(&text), Err(SpcError::Config(_))));
    }

    #[test]
    fn bad_keyword_and_grid_are_itemized() {
        let text = BASE.replace("\"auto\"", "\"guess\"").replace("\"n\": 1000", "\"n\": 3");
        let Err(SpcError::Config(msg)) = RunConfig::from_json(&text) else { panic!() };
        assert!(msg.contains("lambda_c") && msg.contains("grid"), "{msg}");
    }

    #[test]
    fn missing_section_is_a_config_error() {
        let (cfg, _) = RunConfig::from_json(BASE).unwrap();
        let e = RunConfig::section(&cfg.track, "track").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
