use crate::rng::RngStream;

use super::elu;
use super::fastmath::mul_add;
use super::genome::{dot, Genome, GLOBAL_STATE, TASK_ACTIONS, TASK_BINS, TASK_HIDDEN, TASK_OBS, TASK_STATE};

const IN: usize = TASK_STATE + TASK_OBS;
const LOGITS: usize = TASK_ACTIONS * TASK_BINS;

/// Task policy prepared for a rollout: the global-state contribution to the
/// input layer is folded into its bias (`h_g` is constant for a whole
/// rollout) and every weight matrix is stored input-major, so each layer is a
/// sequence of vectorizable `out += x_i · column_i` updates.
#[derive(Debug, Clone)]
pub struct PolicyRunner {
    input_base: [f64; TASK_HIDDEN],
    input_t: [[f64; TASK_HIDDEN]; IN],
    hidden_bias: [f64; TASK_HIDDEN],
    hidden_t: [[f64; TASK_HIDDEN]; TASK_HIDDEN],
    state_bias: [f64; TASK_STATE],
    state_t: [[f64; TASK_STATE]; TASK_HIDDEN],
    action_bias: [f64; LOGITS],
    action_t: [[f64; LOGITS]; TASK_HIDDEN],
}

fn transpose<const O: usize, const I: usize>(layer: &super::Dense<'_>, skip: usize, out: &mut [[f64; O]; I]) {
    for (j, col) in (0..O).map(|j| (j, layer.row(j))) {
        for i in 0..I {
            out[i][j] = col[skip + i];
        }
    }
}

#[inline(always)]
fn axpy<const N: usize>(acc: &mut [f64; N], x: f64, col: &[f64; N]) {
    for (a, &w) in acc.iter_mut().zip(col) {
        *a = mul_add(x, w, *a);
    }
}

impl PolicyRunner {
    /// # Panics
    /// If the genome has no task layers.
    pub fn new(genome: &Genome, h_g: &[f64]) -> Self {
        let task = genome.layout().task.expect("genome carries task layers");
        let input = genome.dense(task.input);
        let hidden = genome.dense(task.hidden);
        let state = genome.dense(task.state);
        let action = genome.dense(task.action);
        let mut r = Self {
            input_base: [0.0; TASK_HIDDEN],
            input_t: [[0.0; TASK_HIDDEN]; IN],
            hidden_bias: hidden.bias.try_into().expect("hidden width"),
            hidden_t: [[0.0; TASK_HIDDEN]; TASK_HIDDEN],
            state_bias: state.bias.try_into().expect("state width"),
            state_t: [[0.0; TASK_STATE]; TASK_HIDDEN],
            action_bias: action.bias.try_into().expect("action width"),
            action_t: [[0.0; LOGITS]; TASK_HIDDEN],
        };
        for (j, b) in r.input_base.iter_mut().enumerate() {
            *b = input.bias[j] + dot(&input.row(j)[..GLOBAL_STATE], h_g);
        }
        transpose(&input, GLOBAL_STATE, &mut r.input_t);
        transpose(&hidden, 0, &mut r.hidden_t);
        transpose(&state, 0, &mut r.state_t);
        transpose(&action, 0, &mut r.action_t);
        r
    }

    /// One policy step. Each action channel is drawn from the softmax of its
    /// 20 logits by inverse CDF with one uniform, channels in order.
    pub fn step(
        &self,
        h_t: &[f64; TASK_STATE],
        obs: &[f64; TASK_OBS],
        rng: &mut RngStream,
    ) -> ([u8; TASK_ACTIONS], [f64; TASK_STATE]) {
        let mut a1 = self.input_base;
        for (&x, col) in h_t.iter().chain(obs).zip(&self.input_t) {
            axpy(&mut a1, x, col);
        }
        a1.iter_mut().for_each(|v| *v = elu(*v));

        let mut a2 = self.hidden_bias;
        for (&x, col) in a1.iter().zip(&self.hidden_t) {
            axpy(&mut a2, x, col);
        }
        a2.iter_mut().for_each(|v| *v = elu(*v));

        let mut next = self.state_bias;
        let mut logits = self.action_bias;
        for ((&x, s), a) in a2.iter().zip(&self.state_t).zip(&self.action_t) {
            axpy(&mut next, x, s);
            axpy(&mut logits, x, a);
        }
        for (n, h) in next.iter_mut().zip(h_t) {
            *n = super::tanh(h + *n);
        }

        let mut actions = [0u8; TASK_ACTIONS];
        for (ch, a) in actions.iter_mut().enumerate() {
            let bins = logits[ch * TASK_BINS..(ch + 1) * TASK_BINS].try_into().expect("bin count");
            *a = sample_bin(bins, rng) as u8;
        }
        (actions, next)
    }
}

/// Inverse-CDF draw from `softmax(logits)` without data-dependent branches.
#[inline(always)]
fn sample_bin(logits: &[f64; TASK_BINS], rng: &mut RngStream) -> usize {
    let mut max = logits[0];
    for &z in &logits[1..] {
        max = if z > max { z } else { max };
    }
    let mut cdf = [0.0; TASK_BINS];
    for (c, &z) in cdf.iter_mut().zip(logits) {
        *c = super::fastmath::exp(z - max);
    }
    for i in 1..TASK_BINS {
        cdf[i] += cdf[i - 1];
    }
    let target = rng.uniform01() * cdf[TASK_BINS - 1];
    let below = cdf.iter().map(|&c| usize::from(c <= target)).sum::<usize>();
    below.min(TASK_BINS - 1)
}

/// One task-network step: `x = [h_g; h_t; obs]`, two ELU layers, a tanh state
/// head and four 20-way action distributions.
pub fn task_policy_step(
    genome: &Genome,
    h_g: &[f64],
    h_t: &[f64; TASK_STATE],
    obs: &[f64; TASK_OBS],
    rng: &mut RngStream,
) -> ([u8; TASK_ACTIONS], [f64; TASK_STATE]) {
    PolicyRunner::new(genome, h_g).step(h_t, obs, rng)
}
