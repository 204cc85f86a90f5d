//! Run configuration: one optional TOML file shared by every subcommand.
//!
//! Every key is optional; sections mirror the library's own config structs so
//! the file stays a thin override layer. Unknown keys anywhere are rejected —
//! a typo must fail loudly, not silently fall back to a default.

use std::path::{Path, PathBuf};

use imu_movie::eval::LosocvOptions;
use imu_movie::model::TrainConfig;
use imu_movie::render::FrameSpec;
use imu_movie::synth::SynthConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Global seed; the `--seed` flag wins over this.
    pub seed: Option<u64>,
    /// Output directory; the `--out` flag wins over this.
    pub out_dir: Option<PathBuf>,
    /// Rendering overrides (size, sensors, anti-aliasing, mode).
    pub frame: Option<FrameSpec>,
    /// Training hyperparameters.
    pub train: Option<TrainConfig>,
    /// Synthetic dataset parameters.
    pub synth: Option<SynthConfig>,
    /// Cross-validation parameters.
    pub eval: Option<EvalSection>,
}

/// `[eval]` section: the adjustable parts of [`LosocvOptions`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub rounds: Option<usize>,
    pub validation_recordings: Option<usize>,
    pub max_train_pos: Option<usize>,
    pub max_train_neg: Option<usize>,
    pub max_val_sequences: Option<usize>,
    pub min_top_ms: Option<i64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Frame spec with config overrides applied (default spec otherwise).
    pub fn frame_spec(&self) -> FrameSpec {
        self.frame.clone().unwrap_or_default()
    }

    /// Train config with the effective seed folded in.
    pub fn train_config(&self, seed: Option<u64>) -> TrainConfig {
        let mut config = self.train.clone().unwrap_or_default();
        if let Some(seed) = seed.or(self.seed) {
            config.seed = seed;
        }
        config
    }

    /// Synth config with the effective seed folded in.
    pub fn synth_config(&self, seed: Option<u64>) -> SynthConfig {
        let mut config = self.synth.clone().unwrap_or_default();
        if let Some(seed) = seed.or(self.seed) {
            config.seed = seed;
        }
        config
    }

    /// Cross-validation options assembled from defaults, the `[eval]`
    /// section, frame/train overrides, and the effective seed.
    pub fn losocv_options(&self, seed: Option<u64>, rounds: Option<usize>) -> LosocvOptions {
        let mut options = LosocvOptions {
            frame_spec: self.frame_spec(),
            train_config: self.train.clone().unwrap_or_default(),
            ..LosocvOptions::default()
        };
        if let Some(eval) = &self.eval {
            if let Some(v) = eval.rounds {
                options.rounds = v;
            }
            if let Some(v) = eval.validation_recordings {
                options.validation_recordings = v;
            }
            if let Some(v) = eval.max_train_pos {
                options.max_train_pos = v;
            }
            if let Some(v) = eval.max_train_neg {
                options.max_train_neg = v;
            }
            if let Some(v) = eval.max_val_sequences {
                options.max_val_sequences = v;
            }
            if let Some(v) = eval.min_top_ms {
                options.min_top_ms = v;
            }
        }
        if let Some(seed) = seed.or(self.seed) {
            options.seed = seed;
        }
        if let Some(rounds) = rounds {
            options.rounds = rounds;
        }
        options
    }
}
