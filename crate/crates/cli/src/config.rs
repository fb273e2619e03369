//! JSON experiment configuration.

use std::path::Path;

use infosearch::belief::PiecewiseDensity;
use infosearch::channel::{CapacityOptions, DiscreteChannel, GaussianBooleanChannel};
use infosearch::policy::{
    PlannerOptions, PrecisionMode, PrecisionModeSet, Sensor, SensorModel, SensorSuite,
};
use infosearch::sim::{ExperimentConfig, Schedule};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub f1: Vec<f64>,
    pub f0: Vec<f64>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModelSpec {
    Discrete { f1: Vec<f64>, f0: Vec<f64> },
    Gaussian { mean0: f64, mean1: f64, sigma: f64 },
    Modes { modes: Vec<ModeSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub name: String,
    #[serde(flatten)]
    pub model: ModelSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric_fast_path: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub sensors: Vec<SensorSpec>,
    #[serde(default)]
    pub gamma: f64,
    pub stages: usize,
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PiecewiseDensity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

fn boolean_channel(sensor: &str, f0: &[f64], f1: &[f64]) -> Result<DiscreteChannel, CliError> {
    if f0.len() != f1.len() {
        return Err(CliError::Config(format!(
            "sensor '{sensor}': f1 has {} entries, f0 has {}",
            f1.len(),
            f0.len()
        )));
    }
    DiscreteChannel::boolean(f0.to_vec(), f1.to_vec())
        .map_err(|e| CliError::Config(format!("sensor '{sensor}' (row 0 = f0, row 1 = f1): {e}")))
}

impl SensorSpec {
    pub fn to_sensor(&self) -> Result<Sensor, CliError> {
        let name = &self.name;
        let model = match &self.model {
            ModelSpec::Discrete { f1, f0 } => SensorModel::Discrete(boolean_channel(name, f0, f1)?),
            ModelSpec::Gaussian {
                mean0,
                mean1,
                sigma,
            } => SensorModel::Gaussian(
                GaussianBooleanChannel::new(*mean0, *mean1, *sigma)
                    .map_err(|e| CliError::Config(format!("sensor '{name}': {e}")))?,
            ),
            ModelSpec::Modes { modes } => {
                let modes = modes
                    .iter()
                    .enumerate()
                    .map(|(l, m)| {
                        Ok(PrecisionMode {
                            channel: boolean_channel(&format!("{name}, mode {l}"), &m.f0, &m.f1)?,
                            cost: m.cost,
                        })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                SensorModel::Modes(
                    PrecisionModeSet::new(modes)
                        .map_err(|e| CliError::Config(format!("sensor '{name}': {e}")))?,
                )
            }
        };
        Ok(Sensor::new(name.clone(), model))
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ConfigFile =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every sensor and the run parameters without computing anything.
    pub fn validate(&self) -> Result<(), CliError> {
        self.suite()?;
        self.experiment()?;
        Ok(())
    }

    pub fn suite(&self) -> Result<SensorSuite, CliError> {
        let mut seen = std::collections::HashSet::new();
        for s in &self.sensors {
            if !seen.insert(s.name.as_str()) {
                return Err(CliError::Config(format!(
                    "duplicate sensor name '{}'",
                    s.name
                )));
            }
        }
        let sensors = self
            .sensors
            .iter()
            .map(SensorSpec::to_sensor)
            .collect::<Result<Vec<_>, _>>()?;
        SensorSuite::new(sensors, self.gamma).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn planner(&self) -> PlannerOptions {
        let defaults = PlannerOptions::default();
        let t = self.tolerances.clone().unwrap_or_default();
        PlannerOptions {
            capacity: CapacityOptions {
                tol: t.capacity_tol.unwrap_or(defaults.capacity.tol),
                max_iters: t.max_iters.unwrap_or(defaults.capacity.max_iters),
            },
            symmetric_fast_path: t
                .symmetric_fast_path
                .unwrap_or(defaults.symmetric_fast_path),
            quad_points: t.quad_points.unwrap_or(defaults.quad_points),
        }
    }

    pub fn prior(&self) -> PiecewiseDensity {
        self.prior.clone().unwrap_or_else(PiecewiseDensity::uniform)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg =
            ExperimentConfig::new(self.suite()?, self.stages, self.replications, self.seed)
                .map_err(|e| CliError::Config(e.to_string()))?
                .with_schedule(self.schedule)
                .with_prior(self.prior());
        cfg.planner = self.planner();
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_BSC: &str = r#"{
        "sensors": [
            {"name": "f", "type": "discrete", "f1": [0.2, 0.8], "f0": [0.8, 0.2]},
            {"name": "g", "type": "discrete", "f1": [0.3, 0.7], "f0": [0.7, 0.3]}
        ],
        "stages": 24, "replications": 100, "seed": 7
    }"#;

    #[test]
    fn defaults_fill_optional_keys() {
        let cfg = ConfigFile::from_json(TWO_BSC).unwrap();
        assert_eq!(cfg.schedule, Schedule::Joint);
        assert_eq!(cfg.gamma, 0.0);
        assert_eq!(cfg.planner(), PlannerOptions::default());
        assert_eq!(cfg.prior(), PiecewiseDensity::uniform());
    }

    #[test]
    fn bad_row_names_the_row() {
        let text = TWO_BSC.replace("[0.2, 0.8]", "[0.2, 0.7]");
        match ConfigFile::from_json(&text) {
            Err(CliError::Config(msg)) => assert!(msg.contains("row 1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_structural_problems() {
        for bad in [
            TWO_BSC.replace("\"replications\": 100", "\"replications\": 0"),
            TWO_BSC.replace("[0.2, 0.8]", "[0.2, 0.3, 0.5]"),
            TWO_BSC.replace("\"g\"", "\"f\""),
            TWO_BSC.replace("\"seed\": 7", "\"seed\": 7, \"extra\": 1"),
            TWO_BSC.replace("discrete", "ternary"),
        ] {
            assert!(
                matches!(ConfigFile::from_json(&bad), Err(CliError::Config(_))),
                "{bad}"
            );
        }
    }
}
