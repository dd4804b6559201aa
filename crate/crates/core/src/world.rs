//! The simulated grid and one full step of its dynamics.

use rayon::prelude::*;

use crate::config::GridConfig;
use crate::error::Result;
use crate::evolution::{apply_replication, plan_replications, ReplicationEvent};
use crate::grid::NeighborTable;
use crate::memetics::{grid_step, AgentRuntime};
use crate::message::Message;
use crate::neural::{Genome, GenomeLayout};
use crate::rng::{Purpose, RngStream};
use crate::task::EnvSource;

/// Task results of one step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RolloutSummary {
    /// Mean fitness over this step's completed rollouts.
    pub mean: f64,
    pub best: f64,
    pub completed: usize,
    pub faults: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct StepReport {
    pub step: u64,
    /// Every agent's broadcast this step, row-major.
    pub broadcasts: Vec<Message>,
    pub events: Vec<ReplicationEvent>,
    pub placed: usize,
    pub rollouts: Option<RolloutSummary>,
}

#[derive(Debug)]
pub struct World {
    config: GridConfig,
    neighbors: NeighborTable,
    placement: NeighborTable,
    agents: Vec<AgentRuntime>,
    next_step: u64,
    env: EnvSource,
}

impl World {
    /// Validates `config` and initializes every site: one shared genome under
    /// homogeneous init, otherwise one independent draw per site.
    pub fn new(config: GridConfig) -> Result<Self> {
        config.validate()?;
        let layout = GenomeLayout::new(config.message_shape(), config.task_on);
        let draw = |i: usize| {
            let mut rng = RngStream::open(config.seed, i, 0, Purpose::Init);
            Genome::orthogonal(layout, config.init_gain, &mut rng)
        };
        let n = config.dims().len();
        let genomes: Vec<Genome> = if config.homogeneous_init {
            vec![draw(0); n]
        } else {
            (0..n).into_par_iter().map(draw).collect()
        };
        let agents = genomes.into_iter().map(|g| AgentRuntime::new(g, &config)).collect();
        Self::from_parts(config, agents, 0)
    }

    pub(crate) fn from_parts(config: GridConfig, agents: Vec<AgentRuntime>, next_step: u64) -> Result<Self> {
        config.validate()?;
        let neighbors = NeighborTable::new(config.dims(), config.neighborhood_radius)?;
        let placement = NeighborTable::new(config.dims(), config.replication_radius)?;
        let env = EnvSource::from_config(&config);
        Ok(Self {
            config,
            neighbors,
            placement,
            agents,
            next_step,
            env,
        })
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    /// Allows changing the run length of a restored world.
    pub fn set_steps(&mut self, steps: u64) {
        self.config.steps = steps;
    }

    pub fn agents(&self) -> &[AgentRuntime] {
        &self.agents
    }

    pub fn agents_mut(&mut self) -> &mut [AgentRuntime] {
        &mut self.agents
    }

    pub fn neighbors(&self) -> &NeighborTable {
        &self.neighbors
    }

    /// Index of the step the next call to [`World::step`] runs.
    pub fn next_step(&self) -> u64 {
        self.next_step
    }

    /// Message exchange, task rollouts (if enabled), then promotion and
    /// replication. Uses the current rayon pool.
    pub fn step(&mut self) -> StepReport {
        let step = self.next_step;
        let outcomes = grid_step(&mut self.agents, &self.config, &self.neighbors, step);
        let broadcasts = outcomes.iter().map(|o| o.outgoing).collect();
        let rollouts = self.config.task_on.then(|| self.run_rollouts(step));
        let events = plan_replications(&self.agents, &self.config, &self.neighbors, &self.placement, step);
        let placed = apply_replication(&mut self.agents, &events, &self.config);
        self.next_step += 1;
        StepReport {
            step,
            broadcasts,
            events,
            placed,
            rollouts,
        }
    }

    fn run_rollouts(&mut self, step: u64) -> RolloutSummary {
        let config = &self.config;
        let env = &self.env;
        let results: Vec<Result<f64>> = self
            .agents
            .par_iter()
            .enumerate()
            .map(|(i, agent)| {
                let reset_seed = RngStream::open(config.seed, i, step, Purpose::EnvReset).next_u64();
                let mut rng = RngStream::open(config.seed, i, step, Purpose::Rollout);
                env.rollout(&agent.genome, &agent.h_g, config.rollout_steps, reset_seed, &mut rng)
            })
            .collect();
        let mut summary = RolloutSummary {
            best: f64::NEG_INFINITY,
            ..RolloutSummary::default()
        };
        let mut total = 0.0;
        for (i, (agent, result)) in self.agents.iter_mut().zip(results).enumerate() {
            match result {
                Ok(f) => {
                    agent.fitness.push(f);
                    total += f;
                    summary.best = summary.best.max(f);
                    summary.completed += 1;
                }
                Err(e) => summary.faults.push(format!("step {step} agent {i}: {e}")),
            }
        }
        summary.mean = if summary.completed > 0 {
            total / summary.completed as f64
        } else {
            f64::NAN
        };
        summary
    }
}
