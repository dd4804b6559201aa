//! Per-step message exchange: noisy delivery into FIFO buffers, attention
//! over the buffer, the global-state update, message generation and
//! selection-count bookkeeping.

use serde::{Deserialize, Serialize};

use crate::config::GridConfig;
use crate::grid::NeighborTable;
use crate::message::{Message, MessageShape, NoisyMessage};
use crate::neural::{
    adaptive_softmax, generate_message, sample_index, update_global, AttentionScratch, Genome, MessageBatch,
    GLOBAL_STATE,
};
use crate::rng::{Purpose, RngStream};
use crate::task::FitnessRecord;

/// FIFO of noisy messages; pushing past capacity evicts the oldest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageBuffer {
    capacity: usize,
    symbols: usize,
    start: usize,
    len: usize,
    values: Vec<f64>,
    sources: Vec<u32>,
}

impl MessageBuffer {
    pub fn new(capacity: usize, shape: MessageShape) -> Self {
        let symbols = shape.symbols();
        Self {
            capacity,
            symbols,
            start: 0,
            len: 0,
            values: vec![0.0; capacity * symbols],
            sources: vec![0; capacity],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn clear(&mut self) {
        self.start = 0;
        self.len = 0;
    }

    fn physical(&self, i: usize) -> usize {
        (self.start + i) % self.capacity
    }

    /// Appends a message from the site with flat index `source`, returning the
    /// slot to fill with its values.
    pub fn push_slot(&mut self, source: usize) -> &mut [f64] {
        let slot = if self.len < self.capacity {
            self.len += 1;
            self.physical(self.len - 1)
        } else {
            let s = self.start;
            self.start = (self.start + 1) % self.capacity;
            s
        };
        self.sources[slot] = source as u32;
        &mut self.values[slot * self.symbols..(slot + 1) * self.symbols]
    }

    /// Values of the `i`-th oldest message.
    pub fn values(&self, i: usize) -> &[f64] {
        let p = self.physical(i);
        &self.values[p * self.symbols..(p + 1) * self.symbols]
    }

    /// Flat site index of the sender of the `i`-th oldest message.
    pub fn source(&self, i: usize) -> usize {
        self.sources[self.physical(i)] as usize
    }

    /// Messages oldest first.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.len).map(move |i| self.values(i))
    }

    pub fn entries(&self, dims: crate::grid::GridDims) -> Vec<NoisyMessage> {
        (0..self.len)
            .map(|i| NoisyMessage {
                values: self.values(i).to_vec(),
                source: dims.site(self.source(i)),
            })
            .collect()
    }
}

/// Decaying per-neighbour tally of how often each neighbour's message was
/// attended. Slots follow the receiver's neighbour order, so each slot is a
/// fixed grid site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionCounts {
    weights: Vec<f64>,
}

impl SelectionCounts {
    pub fn new(slots: usize) -> Self {
        Self {
            weights: vec![0.0; slots],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, slot: usize) -> f64 {
        self.weights[slot]
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn decay(&mut self, factor: f64) {
        self.weights.iter_mut().for_each(|w| *w *= factor);
    }

    pub fn increment(&mut self, slot: usize) {
        self.weights[slot] += 1.0;
    }

    pub fn set(&mut self, slot: usize, weight: f64) {
        self.weights[slot] = weight.max(0.0);
    }

    pub fn clear(&mut self) {
        self.weights.iter_mut().for_each(|w| *w = 0.0);
    }
}

/// Everything one grid site carries between steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRuntime {
    pub genome: Genome,
    pub h_g: Vec<f64>,
    pub buffer: MessageBuffer,
    pub counts: SelectionCounts,
    pub fitness: FitnessRecord,
    pub last_broadcast: Option<Message>,
}

impl AgentRuntime {
    pub fn new(genome: Genome, config: &GridConfig) -> Self {
        let shape = genome.shape();
        Self {
            genome,
            h_g: vec![0.0; GLOBAL_STATE],
            buffer: MessageBuffer::new(config.buffer_capacity, shape),
            counts: SelectionCounts::new(config.neighbor_count()),
            fitness: FitnessRecord::default(),
            last_broadcast: None,
        }
    }

    /// Clears all per-life state; the genome is kept. The previous broadcast
    /// is already in flight and stays.
    pub fn reset_state(&mut self) {
        self.h_g.iter_mut().for_each(|v| *v = 0.0);
        self.buffer.clear();
        self.counts.clear();
        self.fitness = FitnessRecord::default();
    }
}

/// Reusable per-thread work buffers.
#[derive(Debug, Default)]
pub struct StepScratch {
    batch: MessageBatch,
    attention: AttentionScratch,
    logits: Vec<f64>,
}

/// Pushes one noisy copy of each neighbour's previous broadcast into the
/// receiver's buffer, neighbours in row-major offset order, noise drawn from
/// the receiver's stream symbol by symbol.
pub fn deliver(
    buffer: &mut MessageBuffer,
    broadcasts: &[Option<Message>],
    neighbors: &NeighborTable,
    receiver: usize,
    noise_std: f64,
    rng: &mut RngStream,
) {
    for &n in neighbors.of(receiver) {
        let Some(msg) = broadcasts[n as usize] else {
            continue;
        };
        let slot = buffer.push_slot(n as usize);
        for (k, v) in slot.iter_mut().enumerate() {
            *v = f64::from(msg.symbol(k)) + noise_std * rng.gaussian();
        }
    }
}

/// What one agent did in one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentStepOutcome {
    pub outgoing: Message,
    /// Sender of the attended message, `None` when the buffer was empty.
    pub selected_source: Option<usize>,
}

/// Attend, update the global state, generate, and tally the selection.
///
/// With an empty buffer the attended message is all zeros and nothing is
/// tallied. Counts decay every step either way.
pub fn agent_step(
    agent: &mut AgentRuntime,
    config: &GridConfig,
    neighbors: &NeighborTable,
    index: usize,
    step: u64,
    scratch: &mut StepScratch,
) -> AgentStepOutcome {
    let shape = agent.genome.shape();
    let seed = config.seed;
    let mut attended_buf = [0.0; crate::message::MAX_SYMBOLS];
    let attended = &mut attended_buf[..shape.symbols()];

    let selected = if agent.buffer.is_empty() {
        None
    } else {
        scratch.batch.fill(shape, agent.buffer.iter());
        scratch
            .attention
            .logits(&agent.genome, &agent.h_g, &scratch.batch, &mut scratch.logits);
        let probs = adaptive_softmax(
            &scratch.logits,
            config.target_entropy,
            config.entropy_rate,
            config.softmax_iters,
        );
        let mut rng = RngStream::open(seed, index, step, Purpose::Attend);
        let pick = sample_index(&probs, &mut rng);
        attended.copy_from_slice(agent.buffer.values(pick));
        Some(agent.buffer.source(pick))
    };

    agent.h_g = update_global(&agent.genome, &agent.h_g, attended);
    let mut rng = RngStream::open(seed, index, step, Purpose::Generate);
    let outgoing = generate_message(
        &agent.genome,
        &agent.h_g,
        attended,
        config.skip_connection_on,
        config.symbol_gain,
        &mut rng,
    );

    agent.counts.decay(config.count_decay);
    if let Some(src) = selected {
        let slot = neighbors
            .slot_of(index, src)
            .expect("buffered messages come from neighbours");
        agent.counts.increment(slot);
    }

    AgentStepOutcome {
        outgoing,
        selected_source: selected,
    }
}

/// Runs delivery and agent steps for every site.
///
/// All deliveries read the broadcasts of the previous step (`last_broadcast`
/// before this call); every agent then steps on its own post-delivery
/// buffer. Runs on the current rayon pool; results do not depend on its size.
pub fn grid_step(
    agents: &mut [AgentRuntime],
    config: &GridConfig,
    neighbors: &NeighborTable,
    step: u64,
) -> Vec<AgentStepOutcome> {
    use rayon::prelude::*;

    let previous: Vec<Option<Message>> = agents.iter().map(|a| a.last_broadcast).collect();
    let outcomes: Vec<AgentStepOutcome> = agents
        .par_iter_mut()
        .enumerate()
        .map_init(StepScratch::default, |scratch, (i, agent)| {
            let mut noise = RngStream::open(config.seed, i, step, Purpose::Noise);
            deliver(&mut agent.buffer, &previous, neighbors, i, config.noise_std, &mut noise);
            agent_step(agent, config, neighbors, i, step, scratch)
        })
        .collect();
    for (agent, out) in agents.iter_mut().zip(&outcomes) {
        agent.last_broadcast = Some(out.outgoing);
    }
    outcomes
}
