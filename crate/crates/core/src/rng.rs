//! Counter-based random streams.
//!
//! Every random decision in a run draws from a stream addressed by
//! `(root seed, agent, step, purpose)`. A stream is a ChaCha8 keystream: the
//! key is derived from the root seed and the 64-bit stream selector packs the
//! address, so two addresses never share a keystream and a stream's contents
//! do not depend on which thread opens it or when.

use rand::distr::{Distribution, Open01};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const AGENT_BITS: u32 = 22;
const STEP_BITS: u32 = 34;
const PURPOSE_BITS: u32 = 8;

/// Largest agent index addressable by a stream.
pub const MAX_AGENTS: usize = 1 << AGENT_BITS;
/// Largest step index addressable by a stream.
pub const MAX_STEPS: u64 = 1 << STEP_BITS;

/// What a stream is used for. Values are part of the on-disk determinism
/// contract; never renumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Purpose {
    Init = 1,
    Noise = 2,
    Attend = 3,
    Generate = 4,
    Promote = 5,
    Gate = 6,
    Replicate = 7,
    Mutate = 8,
    Rollout = 9,
    EnvReset = 10,
    /// Free for tests and tooling.
    Scratch = 255,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub agent: usize,
    pub step: u64,
    pub purpose: Purpose,
}

impl StreamId {
    pub fn new(agent: usize, step: u64, purpose: Purpose) -> Self {
        Self {
            agent,
            step,
            purpose,
        }
    }

    fn selector(&self) -> u64 {
        debug_assert!(self.agent < MAX_AGENTS);
        debug_assert!(self.step < MAX_STEPS);
        ((self.agent as u64) << (STEP_BITS + PURPOSE_BITS))
            | (self.step << PURPOSE_BITS)
            | self.purpose as u64
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key_for(root_seed: u64) -> [u8; 32] {
    let mut state = root_seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Which distribution [`RngStream::draw`] samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawKind {
    Uniform01,
    Gaussian,
    Gumbel,
}

#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(root_seed: u64, id: StreamId) -> Self {
        let mut rng = ChaCha8Rng::from_seed(key_for(root_seed));
        rng.set_stream(id.selector());
        Self { rng }
    }

    pub fn open(root_seed: u64, agent: usize, step: u64, purpose: Purpose) -> Self {
        Self::new(root_seed, StreamId::new(agent, step, purpose))
    }

    pub fn draw(&mut self, kind: DrawKind) -> f64 {
        match kind {
            DrawKind::Uniform01 => self.uniform01(),
            DrawKind::Gaussian => self.gaussian(),
            DrawKind::Gumbel => self.gumbel(),
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform01(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Standard normal.
    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Standard Gumbel, `-ln(-ln u)` with `u` on the open interval.
    pub fn gumbel(&mut self) -> f64 {
        let u: f64 = Open01.sample(&mut self.rng);
        -(-u.ln()).ln()
    }

    /// Uniform index below `n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform01() < p
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
