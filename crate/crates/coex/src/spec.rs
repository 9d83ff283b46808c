//! Sweep specifications: a base scenario and the grid of points to run.

use std::path::Path;

use coex_core::params::ScenarioConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    PacketBytes,
    Alpha,
    NW,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::PacketBytes => "packet_bytes",
            SweepVar::Alpha => "alpha",
            SweepVar::NW => "n_w",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytical,
    Simulate,
    FairnessAccess,
    FairnessThroughput,
}

fn all_modes() -> Vec<Mode> {
    vec![
        Mode::Analytical,
        Mode::Simulate,
        Mode::FairnessAccess,
        Mode::FairnessThroughput,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub sweep_var: SweepVar,
    pub values: Vec<f64>,
    /// Optional second axis: every value is run at each of these duty
    /// cycles, one curve per duty cycle.
    #[serde(default)]
    pub alpha_values: Option<Vec<f64>>,
    #[serde(default = "all_modes")]
    pub modes: Vec<Mode>,
}

/// One resolved grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    /// The swept variable's value at this point.
    pub sweep_value: f64,
    pub scenario: ScenarioConfig,
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text).map_err(|e| CliError::Config(format!("sweep spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(CliError::Config("values must not be empty".into()));
        }
        if self.modes.is_empty() {
            return Err(CliError::Config("modes must not be empty".into()));
        }
        for &v in &self.values {
            check_value(self.sweep_var, v)?;
        }
        if let Some(alphas) = &self.alpha_values {
            if self.sweep_var == SweepVar::Alpha {
                return Err(CliError::Config(
                    "alpha_values cannot be combined with sweep_var = alpha".into(),
                ));
            }
            if alphas.is_empty() {
                return Err(CliError::Config("alpha_values must not be empty".into()));
            }
            for &a in alphas {
                check_value(SweepVar::Alpha, a)?;
            }
        }
        // Every point must be a valid scenario; this also applies the
        // LTE-U limits when they are enforced.
        for p in self.points() {
            p.scenario.validate()?;
        }
        Ok(())
    }

    pub fn enables(&self, mode: Mode) -> bool {
        self.modes.contains(&mode)
    }

    /// Grid points in output order: duty cycles outermost, then values.
    pub fn points(&self) -> Vec<GridPoint> {
        let alphas = match &self.alpha_values {
            Some(a) => a.clone(),
            None => vec![self.base.lte.alpha],
        };
        let mut out = Vec::with_capacity(alphas.len() * self.values.len());
        for &alpha in &alphas {
            for &v in &self.values {
                let mut scenario = self.base.with_alpha(alpha);
                match self.sweep_var {
                    SweepVar::PacketBytes => scenario.packet_bytes = v as u32,
                    SweepVar::Alpha => scenario.lte.alpha = v,
                    SweepVar::NW => scenario.n_w = v as u32,
                }
                out.push(GridPoint {
                    sweep_value: v,
                    scenario,
                });
            }
        }
        out
    }
}

fn check_value(var: SweepVar, v: f64) -> Result<()> {
    let ok = match var {
        SweepVar::Alpha => v > 0.0 && v < 1.0,
        SweepVar::PacketBytes | SweepVar::NW => {
            v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{} value {v} is outside its domain",
            var.name()
        )))
    }
}
