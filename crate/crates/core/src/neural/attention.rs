use crate::message::{MessageShape, NoisyMessage};

use super::genome::{Genome, GLOBAL_STATE, MEMORY_STATE};
use super::fastmath::{mul_add, sigmoid};

/// Messages per SIMD block.
pub const LANES: usize = 8;
type Lane = [f64; LANES];

/// Buffered messages laid out in blocks of [`LANES`] messages, symbol-major
/// within a block: `blocks[b * symbols + s][l]` is symbol `s` of message
/// `b * LANES + l`. The last block is zero-padded.
#[derive(Debug, Clone, Default)]
pub struct MessageBatch {
    symbols: usize,
    n: usize,
    blocks: Vec<Lane>,
}

impl MessageBatch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fill<'a>(&mut self, shape: MessageShape, messages: impl ExactSizeIterator<Item = &'a [f64]>) {
        let n = messages.len();
        let symbols = shape.symbols();
        self.symbols = symbols;
        self.n = n;
        self.blocks.clear();
        self.blocks.resize(n.div_ceil(LANES) * symbols, [0.0; LANES]);
        for (k, m) in messages.enumerate() {
            debug_assert_eq!(m.len(), symbols);
            let (b, l) = (k / LANES, k % LANES);
            for (s, &v) in m.iter().enumerate() {
                self.blocks[b * symbols + s][l] = v;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Reusable work buffers for [`AttentionScratch::logits`].
#[derive(Debug, Clone, Default)]
pub struct AttentionScratch {
    /// Gate and update weights per unit over `[message symbols; attention state]`.
    w_gate: Vec<f64>,
    w_update: Vec<f64>,
}

impl AttentionScratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Scores every message of `batch` independently: the attention state
    /// starts at zero, reads the message one position at a time through the
    /// gated cell, and the final state is projected to a scalar. Logits are
    /// written in batch order.
    pub fn logits(&mut self, genome: &Genome, h_g: &[f64], batch: &MessageBatch, out: &mut Vec<f64>) {
        const M: usize = MEMORY_STATE;
        let layout = genome.layout();
        let shape = layout.shape;
        let c = shape.channels;
        let n = batch.len();
        let gate = genome.dense(layout.attn_gate);
        let update = genome.dense(layout.attn_update);
        let logit = genome.dense(layout.attn_logit);
        debug_assert_eq!(h_g.len(), GLOBAL_STATE);

        // The global-state contribution is the same for every message and position.
        let mut gate_base = [0.0; M];
        let mut update_base = [0.0; M];
        let state_col = c + GLOBAL_STATE;
        let nin = c + M;
        self.w_gate.clear();
        self.w_update.clear();
        for j in 0..M {
            let gr = gate.row(j);
            let ur = update.row(j);
            gate_base[j] = gate.bias[j] + super::genome::dot(&gr[c..state_col], h_g);
            update_base[j] = update.bias[j] + super::genome::dot(&ur[c..state_col], h_g);
            self.w_gate.extend_from_slice(&gr[..c]);
            self.w_gate.extend_from_slice(&gr[state_col..]);
            self.w_update.extend_from_slice(&ur[..c]);
            self.w_update.extend_from_slice(&ur[state_col..]);
        }

        out.clear();
        out.reserve(n);
        // Cell inputs: this position's symbols followed by the attention state.
        let mut xs = [[0.0; LANES]; crate::message::MAX_SYMBOLS + M];
        for block in batch.blocks.chunks_exact(shape.symbols()) {
            xs[c..nin].fill([0.0; LANES]);
            for pos in 0..shape.len {
                xs[..c].copy_from_slice(&block[pos * c..(pos + 1) * c]);
                // The state is zero at the first position.
                let k = if pos == 0 { c } else { nin };
                let mut g = [[0.0; LANES]; M];
                let mut u = [[0.0; LANES]; M];
                for j in 0..M {
                    let mut gj = [gate_base[j]; LANES];
                    let mut uj = [update_base[j]; LANES];
                    let wg = &self.w_gate[j * nin..j * nin + k];
                    let wu = &self.w_update[j * nin..j * nin + k];
                    for ((x, &a), &b) in xs[..k].iter().zip(wg).zip(wu) {
                        for l in 0..LANES {
                            gj[l] = mul_add(a, x[l], gj[l]);
                            uj[l] = mul_add(b, x[l], uj[l]);
                        }
                    }
                    g[j] = gj;
                    u[j] = uj;
                }
                for j in 0..M {
                    let h = &mut xs[c + j];
                    for l in 0..LANES {
                        let s = sigmoid(g[j][l]);
                        h[l] = s * h[l] + (1.0 - s) * u[j][l];
                    }
                }
            }
            let mut score = [logit.bias[0]; LANES];
            for (hi, &w) in xs[c..nin].iter().zip(logit.weight) {
                for l in 0..LANES {
                    score[l] = mul_add(w, hi[l], score[l]);
                }
            }
            let take = (n - out.len()).min(LANES);
            out.extend_from_slice(&score[..take]);
        }
    }
}

/// Attention logits of `memory` in memory order, or `None` for an empty memory.
pub fn attention_logits(genome: &Genome, h_g: &[f64], memory: &[NoisyMessage]) -> Option<Vec<f64>> {
    if memory.is_empty() {
        return None;
    }
    let mut batch = MessageBatch::new();
    batch.fill(genome.shape(), memory.iter().map(|m| m.values.as_slice()));
    let mut out = Vec::new();
    AttentionScratch::new().logits(genome, h_g, &batch, &mut out);
    Some(out)
}
