//! Run configuration.
//!
//! A config file is flat TOML: every field below is a top-level key, any key
//! left out takes its default. `format_version` must match
//! [`CONFIG_FORMAT_VERSION`].

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::GridDims;
pub use crate::message::MessageShape;
use crate::rng::{MAX_AGENTS, MAX_STEPS};

pub const CONFIG_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub format_version: u32,

    pub rows: usize,
    pub cols: usize,
    pub message_len: usize,
    pub message_channels: usize,

    /// Buffered messages per agent.
    pub buffer_capacity: usize,
    /// Radius of the square box messages are received from and promotions go to.
    pub neighborhood_radius: usize,
    /// Radius of the box offspring are placed into around the promoted agent.
    pub replication_radius: usize,
    pub noise_std: f64,

    pub target_entropy: f64,
    pub entropy_rate: f64,
    pub softmax_iters: usize,
    /// Multiplier inside the output-symbol sigmoid.
    pub symbol_gain: f64,

    /// Per-agent per-step promotion chance. `None` picks 0.1 without a task
    /// and 0.2 with one.
    pub promote_prob: Option<f64>,
    pub top_n: usize,
    pub mutation_fraction: f64,
    pub weight_decay: f64,
    pub mutation_std: f64,
    pub init_gain: f64,
    /// Per-step decay of attention selection counts.
    pub count_decay: f64,
    pub gamma_s: f64,
    pub gamma_f: f64,
    /// Clear an offspring site's hidden state, buffer and selection counts
    /// on replacement. When false only the genome and fitness record change.
    pub reset_offspring_state: bool,

    pub evolution_on: bool,
    pub mutation_on: bool,
    pub selection_on: bool,
    pub homogeneous_init: bool,
    pub skip_connection_on: bool,
    pub task_on: bool,

    pub rollout_steps: usize,
    /// Command line of an external environment process; empty selects the
    /// built-in surrogate walker.
    pub environment_command: Vec<String>,
    pub environment_timeout_ms: u64,

    pub seed: u64,
    pub steps: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            format_version: CONFIG_FORMAT_VERSION,
            rows: 32,
            cols: 32,
            message_len: MessageShape::SEQUENCE.len,
            message_channels: MessageShape::SEQUENCE.channels,
            buffer_capacity: 100,
            neighborhood_radius: 2,
            replication_radius: 1,
            noise_std: 0.1,
            target_entropy: 0.6,
            entropy_rate: 0.1,
            softmax_iters: 20,
            symbol_gain: 3.0,
            promote_prob: None,
            top_n: 16,
            mutation_fraction: 0.001,
            weight_decay: 0.99,
            mutation_std: 0.2,
            init_gain: 4.0,
            count_decay: 0.99,
            gamma_s: 0.0,
            gamma_f: 0.0,
            reset_offspring_state: true,
            evolution_on: true,
            mutation_on: true,
            selection_on: true,
            homogeneous_init: false,
            skip_connection_on: true,
            task_on: false,
            rollout_steps: 400,
            environment_command: Vec::new(),
            environment_timeout_ms: 10_000,
            seed: 0,
            steps: 10_000,
        }
    }
}

impl GridConfig {
    pub fn dims(&self) -> GridDims {
        GridDims::new(self.rows, self.cols)
    }

    pub fn set_dims(&mut self, dims: GridDims) {
        self.rows = dims.rows;
        self.cols = dims.cols;
    }

    pub fn message_shape(&self) -> MessageShape {
        MessageShape {
            len: self.message_len,
            channels: self.message_channels,
        }
    }

    pub fn set_message_shape(&mut self, shape: MessageShape) {
        self.message_len = shape.len;
        self.message_channels = shape.channels;
    }

    pub fn effective_promote_prob(&self) -> f64 {
        self.promote_prob
            .unwrap_or(if self.task_on { 0.2 } else { 0.1 })
    }

    /// Fitness gate bypass probability; without a task the gate always passes.
    pub fn effective_gamma_f(&self) -> f64 {
        if self.task_on {
            self.gamma_f
        } else {
            1.0
        }
    }

    /// Uniform-promotion probability; with selection off promotion is always uniform.
    pub fn effective_gamma_s(&self) -> f64 {
        if self.selection_on {
            self.gamma_s
        } else {
            1.0
        }
    }

    pub fn neighbor_count(&self) -> usize {
        (2 * self.neighborhood_radius + 1).pow(2) - 1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.format_version != CONFIG_FORMAT_VERSION {
            return bad(format!(
                "config format_version {} is not supported (expected {CONFIG_FORMAT_VERSION})",
                self.format_version
            ));
        }
        self.message_shape().validate()?;
        self.dims().check_radius(self.neighborhood_radius)?;
        self.dims().check_radius(self.replication_radius)?;
        if self.dims().len() > MAX_AGENTS {
            return bad(format!("grid of {} agents is too large", self.dims().len()));
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        if self.steps >= MAX_STEPS {
            return bad(format!("steps must be below {MAX_STEPS}"));
        }
        if self.buffer_capacity < self.neighbor_count() {
            return bad(format!(
                "buffer_capacity {} cannot hold one round of {} neighbour messages",
                self.buffer_capacity,
                self.neighbor_count()
            ));
        }
        let unit = [
            ("promote_prob", self.effective_promote_prob()),
            ("mutation_fraction", self.mutation_fraction),
            ("gamma_s", self.gamma_s),
            ("gamma_f", self.gamma_f),
            ("count_decay", self.count_decay),
        ];
        for (name, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        let finite_nonneg = [
            ("noise_std", self.noise_std),
            ("entropy_rate", self.entropy_rate),
            ("symbol_gain", self.symbol_gain),
            ("mutation_std", self.mutation_std),
            ("init_gain", self.init_gain),
            ("weight_decay", self.weight_decay),
        ];
        for (name, v) in finite_nonneg {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("{name} = {v} must be finite and non-negative"));
            }
        }
        if !(self.target_entropy.is_finite() && self.target_entropy > 0.0) {
            return bad(format!("target_entropy = {} must be positive", self.target_entropy));
        }
        if self.task_on {
            if self.rollout_steps == 0 {
                return bad("rollout_steps must be at least 1 when the task is on".into());
            }
            if self.top_n == 0 {
                return bad("top_n must be at least 1 when the task is on".into());
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        Self::from_toml_str(&text)
    }

    /// Hash of everything that determines the simulated trajectory. The step
    /// count is excluded so a checkpoint can be resumed into a longer run.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.steps = 0;
        canonical.promote_prob = Some(self.effective_promote_prob());
        let json = serde_json::to_vec(&canonical).expect("config serializes to JSON");
        let digest = Sha256::digest(&json);
        digest[..12].iter().map(|b| format!("{b:02x}")).collect()
    }
}
