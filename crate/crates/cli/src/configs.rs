//! Config-file schemas and the error type shared by the subcommands.

use std::fmt;
use std::fs;
use std::path::Path;

use bellpulse::fields::FieldProfile;
use bellpulse::model::{BlockIndex, FieldAxis};
use bellpulse::propagator::StepOrder;
use bellpulse::su2::SigmaAxis;
use bellpulse::synthesis::Region;
use serde::{Deserialize, Serialize};

/// Command failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    message: String,
    config_error: bool,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            config_error: true,
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            config_error: false,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.config_error {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<bellpulse::Error> for CliError {
    fn from(err: bellpulse::Error) -> Self {
        match err {
            bellpulse::Error::Config(_) | bellpulse::Error::Domain(_) => {
                CliError::config(err.to_string())
            }
            other => CliError::runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::runtime(err.to_string())
    }
}

/// Read and deserialize a JSON config, reporting line/column on parse
/// failures.
pub fn load_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::config(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Raw model inputs plus the sector to evolve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSource {
    pub h: FieldAxis,
    pub j: [f64; 3],
    pub b1: f64,
    pub b2: f64,
    pub k: BlockIndex,
}

/// Effective block-level coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectiveSource {
    pub ampl: f64,
    pub j: f64,
    pub q: SigmaAxis,
}

fn default_envelope() -> FieldProfile {
    FieldProfile::HalfSine {
        amplitude: 1.0,
        mode: 1,
    }
}

/// Config for `evolve`: exactly one of `model` / `effective`, an optional
/// unit envelope (scaled by the combined or effective amplitude), and the
/// integrator settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub model: Option<ModelSource>,
    pub effective: Option<EffectiveSource>,
    #[serde(default = "default_envelope")]
    pub envelope: FieldProfile,
    pub n: usize,
    pub order: StepOrder,
    #[serde(default)]
    pub attach_global_phase: bool,
    /// Opt-in polar projection of the final matrix.
    #[serde(default)]
    pub unitarize: bool,
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        match (&self.model, &self.effective) {
            (Some(_), Some(_)) => Err(CliError::config(
                "config must set exactly one of `model` and `effective`, not both",
            )),
            (None, None) => Err(CliError::config(
                "config must set one of `model` or `effective`",
            )),
            _ => Ok(()),
        }?;
        if self.n == 0 {
            return Err(CliError::config("field `n` must be >= 1"));
        }
        self.envelope
            .validate()
            .map_err(|e| CliError::config(e.to_string()))
    }
}

fn default_targets() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

fn default_q() -> SigmaAxis {
    SigmaAxis::X
}

fn default_resolution() -> usize {
    101
}

fn default_scan_n() -> usize {
    1000
}

fn default_order() -> StepOrder {
    StepOrder::Quadratic
}

fn default_reference_tol() -> f64 {
    1e-10
}

/// Config for `scan`: one contour scan per entry of `targets`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanFileConfig {
    #[serde(default = "default_targets")]
    pub targets: Vec<f64>,
    #[serde(default = "default_q")]
    pub q: SigmaAxis,
    #[serde(default)]
    pub region: Region,
    #[serde(default = "default_resolution")]
    pub grid_resolution: usize,
    #[serde(default = "default_scan_n")]
    pub n: usize,
    #[serde(default = "default_order")]
    pub order: StepOrder,
    /// Tolerance for the reference re-check in the residual column.
    #[serde(default = "default_reference_tol")]
    pub reference_tol: f64,
}

impl Default for ScanFileConfig {
    fn default() -> Self {
        Self {
            targets: default_targets(),
            q: default_q(),
            region: Region::default(),
            grid_resolution: default_resolution(),
            n: default_scan_n(),
            order: default_order(),
            reference_tol: default_reference_tol(),
        }
    }
}
