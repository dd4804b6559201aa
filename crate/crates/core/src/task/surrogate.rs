use std::f64::consts::TAU;

use crate::error::Result;
use crate::neural::TASK_ACTIONS;
use crate::rng::{Purpose, RngStream};

use super::{Environment, Observation, Transition, OBS_LEN};

/// Natural phase advance per step of the four oscillators, in radians.
pub const NATURAL_RATES: [f64; TASK_ACTIONS] = [0.10, 0.15, 0.20, 0.25];

const TORQUE_PHASE_GAIN: f64 = 0.2;
const VELOCITY_RETAIN: f64 = 0.9;
const THRUST_GAIN: f64 = 0.1;
const ENERGY_COST: f64 = 0.005;
const POSITION_SCALE: f64 = 400.0;

/// Four phase oscillators driven by torques. Thrust is torque applied in
/// phase with `sin θ`; every unit of torque costs energy. The metric is
/// distance travelled minus energy spent.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateWalker {
    phases: [f64; TASK_ACTIONS],
    sin: [f64; TASK_ACTIONS],
    cos: [f64; TASK_ACTIONS],
    torques: [f64; TASK_ACTIONS],
    velocity: f64,
    position: f64,
    energy: f64,
}

impl Default for SurrogateWalker {
    fn default() -> Self {
        Self::with_phases([0.0; TASK_ACTIONS])
    }
}

impl SurrogateWalker {
    pub fn with_phases(phases: [f64; TASK_ACTIONS]) -> Self {
        Self {
            phases,
            sin: phases.map(f64::sin),
            cos: phases.map(f64::cos),
            torques: [0.0; TASK_ACTIONS],
            velocity: 0.0,
            position: 0.0,
            energy: 0.0,
        }
    }

    pub fn phases(&self) -> [f64; TASK_ACTIONS] {
        self.phases
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn position(&self) -> f64 {
        self.position
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn metric(&self) -> f64 {
        self.position - self.energy
    }

    /// Maps an action bin in `0..20` linearly onto a torque in `[−1, 1]`.
    pub fn torque(action: u8) -> f64 {
        f64::from(action) / 19.0 * 2.0 - 1.0
    }

    pub fn observe(&self) -> Observation {
        let mut obs = [0.0; OBS_LEN];
        obs[..4].copy_from_slice(&self.sin);
        obs[4..8].copy_from_slice(&self.cos);
        obs[8] = self.velocity;
        obs[9] = self.position / POSITION_SCALE;
        obs[10..14].copy_from_slice(&self.torques);
        obs
    }

    pub fn advance(&mut self, actions: &[u8; TASK_ACTIONS]) -> Transition {
        let mut thrust = 0.0;
        let mut effort = 0.0;
        for j in 0..TASK_ACTIONS {
            let u = Self::torque(actions[j]);
            self.torques[j] = u;
            self.phases[j] += NATURAL_RATES[j] + TORQUE_PHASE_GAIN * u;
            (self.sin[j], self.cos[j]) = self.phases[j].sin_cos();
            thrust += u * self.sin[j];
            effort += u * u;
        }
        self.velocity = VELOCITY_RETAIN * self.velocity + THRUST_GAIN * thrust / TASK_ACTIONS as f64;
        self.position += self.velocity;
        self.energy += ENERGY_COST * effort;
        Transition {
            obs: self.observe(),
            metric: self.metric(),
            done: false,
        }
    }
}

impl Environment for SurrogateWalker {
    /// Starts from rest with phases drawn uniformly from `[0, 2π)`.
    fn reset(&mut self, seed: u64) -> Result<Observation> {
        let mut rng = RngStream::open(seed, 0, 0, Purpose::EnvReset);
        let mut phases = [0.0; TASK_ACTIONS];
        phases.iter_mut().for_each(|p| *p = TAU * rng.uniform01());
        *self = Self::with_phases(phases);
        Ok(self.observe())
    }

    fn step(&mut self, actions: &[u8; TASK_ACTIONS]) -> Result<Transition> {
        Ok(self.advance(actions))
    }
}
