use crate::rng::RngStream;

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let mut out = logits.to_vec();
    softmax_in_place(&mut out);
    out
}

const L: usize = 8;

fn max_of(z: &[f64]) -> f64 {
    let mut lane_max = [f64::NEG_INFINITY; L];
    let mut chunks = z.chunks_exact(L);
    for c in &mut chunks {
        for l in 0..L {
            lane_max[l] = lane_max[l].max(c[l]);
        }
    }
    chunks
        .remainder()
        .iter()
        .chain(&lane_max)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `(S, Σ eˢ s)` with `s = z − max` and `S = Σ eˢ`, optionally storing `eˢ`
/// back into `z`. Reductions run over eight interleaved partial sums combined
/// in a fixed order, so results do not depend on how the loop is vectorized.
#[inline(always)]
fn exp_sums<const STORE: bool>(z: &mut [f64], max: f64) -> (f64, f64) {
    let mut sum = [0.0; L];
    let mut weighted = [0.0; L];
    let mut chunks = z.chunks_exact_mut(L);
    for c in &mut chunks {
        for l in 0..L {
            let s = c[l] - max;
            let e = super::fastmath::exp(s);
            weighted[l] += e * s;
            sum[l] += e;
            if STORE {
                c[l] = e;
            }
        }
    }
    for (l, v) in chunks.into_remainder().iter_mut().enumerate() {
        let s = *v - max;
        let e = super::fastmath::exp(s);
        weighted[l] += e * s;
        sum[l] += e;
        if STORE {
            *v = e;
        }
    }
    (pairwise(&sum), pairwise(&weighted))
}

/// H = ln S − Σ p_i s_i with s_i the shifted logits.
fn entropy_from_sums(sum: f64, weighted: f64) -> f64 {
    (sum.ln() - weighted / sum).max(0.0)
}

/// Replaces `z` with `softmax(z)` and returns the distribution's entropy in nats.
fn softmax_in_place(z: &mut [f64]) -> f64 {
    let max = max_of(z);
    let (sum, weighted) = exp_sums::<true>(z, max);
    let inv = 1.0 / sum;
    for v in z.iter_mut() {
        *v *= inv;
    }
    entropy_from_sums(sum, weighted)
}

fn pairwise(v: &[f64; 8]) -> f64 {
    ((v[0] + v[4]) + (v[2] + v[6])) + ((v[1] + v[5]) + (v[3] + v[7]))
}

/// Entropy in nats.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Softmax whose logits are rescaled `iters` times by
/// `1 + rate · (H − target) / target`, pulling the entropy `H` toward `target`.
pub fn adaptive_softmax(logits: &[f64], target: f64, rate: f64, iters: usize) -> Vec<f64> {
    if logits.len() == 1 {
        return vec![1.0];
    }
    let mut z = logits.to_vec();
    let mut max = max_of(&z);
    for _ in 0..iters {
        let (sum, weighted) = exp_sums::<false>(&mut z, max);
        let h = entropy_from_sums(sum, weighted);
        let factor = 1.0 + rate * (h - target) / target;
        z.iter_mut().for_each(|v| *v *= factor);
        // Scaling by a positive factor is monotone, so the maximum moves with it exactly.
        max = if factor > 0.0 { max * factor } else { max_of(&z) };
    }
    softmax_in_place(&mut z);
    z
}

/// Gumbel-max draw: `argmax_i ln p_i + g_i`.
pub fn sample_index(probs: &[f64], rng: &mut RngStream) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, &p) in probs.iter().enumerate() {
        let g = rng.gumbel();
        if p <= 0.0 {
            continue;
        }
        let score = p.ln() + g;
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    best
}
