use std::path::Path;

use serde::Deserialize;
use tachyon::tunnel::{BarrierProfile, StepControl};

use crate::CliError;

/// File-level settings. Every section is optional; command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub precision: PrecisionSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub zoom: ZoomSection,
    pub output: Option<String>,
    pub workers: Option<usize>,
    pub tunnel: Option<TunnelSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionSection {
    pub digits: Option<u32>,
    pub tol: Option<f64>,
    pub max_digits: Option<u32>,
    pub growth_factor: Option<f64>,
}

/// β values are strings so they survive at full precision.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub beta_min: Option<String>,
    pub beta_max: Option<String>,
    pub samples: Option<usize>,
    pub mode: Option<String>,
    pub exclusion: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoomSection {
    pub center: Option<String>,
    pub width: Option<String>,
    pub samples: Option<usize>,
    pub levels: Option<u32>,
    pub mode: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TunnelSection {
    pub e_total: f64,
    #[serde(default)]
    pub p_y: f64,
    pub start: [f64; 2],
    pub x_end: f64,
    pub barrier: BarrierSection,
    #[serde(default)]
    pub step: StepSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSection {
    pub u_max: f64,
    pub x_rise: f64,
    pub x_plateau_start: f64,
    pub x_plateau_end: f64,
    pub x_fall: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSection {
    pub initial: Option<f64>,
    pub tolerance: Option<f64>,
    pub min_step: Option<f64>,
    pub max_steps: Option<usize>,
}

impl BarrierSection {
    pub fn profile(&self) -> Result<BarrierProfile, CliError> {
        Ok(BarrierProfile::trapezoid(
            self.u_max,
            self.x_rise,
            self.x_plateau_start,
            self.x_plateau_end,
            self.x_fall,
        )?)
    }
}

impl StepSection {
    pub fn control(&self) -> StepControl {
        let d = StepControl::default();
        StepControl {
            step: self.initial.unwrap_or(d.step),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            min_step: self.min_step.unwrap_or(d.min_step),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
        }
    }
}

pub fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<FileConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Usage(e.to_string()))
}
