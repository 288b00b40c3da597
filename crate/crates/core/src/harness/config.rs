//! Experiment configuration loaded from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::compiler::Compiler;
use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::gates::{PulseTimes, PulseTimings};
use crate::mitigation::ConfusionMatrix;
use crate::noise::{CrossKerr, LindbladOptions, NoiseModel, QutritCoherence};

/// Profile with the device tables, used when no file is given.
pub const DEFAULT_PROFILE: &str = include_str!("default_profile.toml");

/// Smallest shot count that keeps the MLE floor feasible on nine outcomes.
pub const MIN_MITIGATION_SHOTS: u64 = 81;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutConfig {
    pub assignment_fidelity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub noisy: bool,
    #[serde(default)]
    pub mitigate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub pulses: Vec<PulseTimes>,
    pub coherence: Vec<QutritCoherence>,
    pub cross_kerr: CrossKerr,
    pub device: DeviceParams,
    pub readout: ReadoutConfig,
    pub lindblad: LindbladOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_PROFILE).expect("built-in profile parses")
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pulses.len() != 2 || self.coherence.len() != 2 {
            return Err(Error::Config("pulses and coherence need exactly two entries".into()));
        }
        self.noise_model().validate()?;
        self.device.validate()?;
        if self.mitigate {
            match self.shots {
                Some(s) if s >= MIN_MITIGATION_SHOTS => {}
                other => {
                    return Err(Error::Config(format!(
                        "mitigation needs at least {MIN_MITIGATION_SHOTS} shots, got {other:?}"
                    )))
                }
            }
        }
        if self.shots == Some(0) {
            return Err(Error::Config("shots must be positive".into()));
        }
        if self.shots.is_some() && self.seed.is_none() {
            return Err(Error::Config("sampled runs need a seed".into()));
        }
        if !(self.lindblad.max_step_ns > 0.0) || self.lindblad.min_steps == 0 {
            return Err(Error::Config("lindblad step settings must be positive".into()));
        }
        Ok(())
    }

    pub fn compiler(&self) -> Compiler {
        Compiler::new(PulseTimings { qutrits: self.pulses.clone() })
    }

    pub fn noise_model(&self) -> NoiseModel {
        NoiseModel { qutrits: self.coherence.clone(), cross_kerr: self.cross_kerr }
    }

    /// Loaded matrix if a file is configured, else the synthetic one.
    pub fn confusion_matrix(&self) -> Result<ConfusionMatrix> {
        match &self.readout.matrix_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                let m = ConfusionMatrix::from_text(&text)?;
                if m.dim() != 9 {
                    return Err(Error::DimensionMismatch { expected: 9, found: m.dim() });
                }
                Ok(m)
            }
            None => ConfusionMatrix::synthetic(9, self.readout.assignment_fidelity),
        }
    }

    /// sha256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Independent seed for run `index` of experiment `salt`.
    pub fn run_seed(&self, salt: &str, index: usize) -> Option<u64> {
        let base = self.seed?;
        let mut h = Sha256::new();
        h.update(base.to_le_bytes());
        h.update(salt.as_bytes());
        h.update((index as u64).to_le_bytes());
        let digest = h.finalize();
        Some(u64::from_le_bytes(digest[..8].try_into().expect("8 bytes")))
    }
}
