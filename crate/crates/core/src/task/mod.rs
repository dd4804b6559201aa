//! Task fitness: environments, the built-in surrogate walker, an adapter for
//! external environment processes, and best-intermediate-reward rollouts.

mod external;
mod surrogate;

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::neural::{Genome, PolicyRunner, TASK_ACTIONS, TASK_STATE};
use crate::rng::RngStream;

pub use external::{ExternalEnv, ExternalSpec};
pub use surrogate::{SurrogateWalker, NATURAL_RATES};

pub const OBS_LEN: usize = crate::neural::TASK_OBS;

pub type Observation = [f64; OBS_LEN];

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Observation,
    pub metric: f64,
    pub done: bool,
}

/// A task the policy network can be rolled out in. Observations have
/// [`OBS_LEN`] entries; each action channel is a bin in `0..20`.
pub trait Environment {
    fn reset(&mut self, seed: u64) -> Result<Observation>;
    fn step(&mut self, actions: &[u8; TASK_ACTIONS]) -> Result<Transition>;
}

/// Running mean of rollout fitness since the agent was born.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FitnessRecord {
    pub mean: f64,
    pub count: u64,
}

impl FitnessRecord {
    pub fn push(&mut self, fitness: f64) {
        self.count += 1;
        self.mean += (fitness - self.mean) / self.count as f64;
    }

    /// Mean used for ranking; agents without a rollout rank last.
    pub fn rank_value(&self) -> f64 {
        if self.count == 0 {
            f64::NEG_INFINITY
        } else {
            self.mean
        }
    }
}

/// Rolls the task policy out for up to `max_steps` with `h_g` held fixed and
/// the task state starting at zero. Fitness is the best metric seen at any
/// step, not the final one.
pub fn rollout_fitness<E: Environment + ?Sized>(
    genome: &Genome,
    h_g: &[f64],
    env: &mut E,
    max_steps: usize,
    reset_seed: u64,
    rng: &mut RngStream,
) -> Result<f64> {
    let policy = PolicyRunner::new(genome, h_g);
    let mut h_t = [0.0; TASK_STATE];
    let mut obs = env.reset(reset_seed)?;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..max_steps {
        let (actions, next) = policy.step(&h_t, &obs, rng);
        h_t = next;
        let t = env.step(&actions)?;
        best = best.max(t.metric);
        obs = t.obs;
        if t.done {
            break;
        }
    }
    Ok(best)
}

/// Hands out environments for rollouts. External sessions are pooled and
/// each is used by one rollout at a time.
#[derive(Debug)]
pub enum EnvSource {
    Surrogate,
    External {
        spec: ExternalSpec,
        idle: Mutex<Vec<ExternalEnv>>,
    },
}

impl EnvSource {
    pub fn from_config(config: &crate::config::GridConfig) -> Self {
        if config.environment_command.is_empty() {
            EnvSource::Surrogate
        } else {
            EnvSource::External {
                spec: ExternalSpec {
                    command: config.environment_command.clone(),
                    timeout: std::time::Duration::from_millis(config.environment_timeout_ms),
                },
                idle: Mutex::new(Vec::new()),
            }
        }
    }

    /// Runs one rollout in an environment from this source.
    pub fn rollout(
        &self,
        genome: &Genome,
        h_g: &[f64],
        max_steps: usize,
        reset_seed: u64,
        rng: &mut RngStream,
    ) -> Result<f64> {
        match self {
            EnvSource::Surrogate => {
                let mut env = SurrogateWalker::default();
                rollout_fitness(genome, h_g, &mut env, max_steps, reset_seed, rng)
            }
            EnvSource::External { spec, idle } => {
                let pooled = idle.lock().expect("env pool lock").pop();
                let mut env = match pooled {
                    Some(env) => env,
                    None => ExternalEnv::spawn(spec)?,
                };
                let result = rollout_fitness(genome, h_g, &mut env, max_steps, reset_seed, rng);
                // A faulted session is dropped (and its process killed).
                if result.is_ok() {
                    idle.lock().expect("env pool lock").push(env);
                }
                result
            }
        }
    }
}
