use crate::message::{Message, MAX_SYMBOLS};
use crate::rng::RngStream;

use super::genome::{dot, Genome, GLOBAL_STATE, MEMORY_STATE};
use super::sigmoid;

/// Samples an outgoing message from the attended (noisy) message.
///
/// The generator state starts at zero. At position `i` the gated cell reads
/// `[attended[i]; attended[L−1−i]; h_g; h_m]`, then each output symbol is `+1`
/// with probability `σ(gain · (skip · attended[i,c] + L_M(h_m)[c]))`, one
/// uniform draw per symbol in row-major order.
pub fn generate_message(
    genome: &Genome,
    h_g: &[f64],
    attended: &[f64],
    skip_on: bool,
    gain: f64,
    rng: &mut RngStream,
) -> Message {
    let layout = genome.layout();
    let shape = layout.shape;
    let c = shape.channels;
    let l = shape.len;
    debug_assert_eq!(attended.len(), shape.symbols());
    let gate = genome.dense(layout.gen_gate);
    let update = genome.dense(layout.gen_update);
    let out = genome.dense(layout.gen_out);

    let mut gate_base = [0.0; MEMORY_STATE];
    let mut update_base = [0.0; MEMORY_STATE];
    for j in 0..MEMORY_STATE {
        gate_base[j] = gate.bias[j] + dot(&gate.row(j)[2 * c..2 * c + GLOBAL_STATE], h_g);
        update_base[j] = update.bias[j] + dot(&update.row(j)[2 * c..2 * c + GLOBAL_STATE], h_g);
    }

    let state_col = 2 * c + GLOBAL_STATE;
    let mut h = [0.0; MEMORY_STATE];
    let mut next = [0.0; MEMORY_STATE];
    let mut logits = [0.0; MAX_SYMBOLS];
    let mut bits = 0u32;
    for i in 0..l {
        let fwd = &attended[i * c..(i + 1) * c];
        let rev = &attended[(l - 1 - i) * c..(l - i) * c];
        for j in 0..MEMORY_STATE {
            let gr = gate.row(j);
            let ur = update.row(j);
            let g = gate_base[j] + dot(&gr[..c], fwd) + dot(&gr[c..2 * c], rev) + dot(&gr[state_col..], &h);
            let u = update_base[j] + dot(&ur[..c], fwd) + dot(&ur[c..2 * c], rev) + dot(&ur[state_col..], &h);
            let s = sigmoid(g);
            next[j] = s * h[j] + (1.0 - s) * u;
        }
        h = next;
        out.apply(&h, &mut logits[..c]);
        for ch in 0..c {
            let skip = if skip_on { fwd[ch] } else { 0.0 };
            let p = sigmoid(gain * (skip + logits[ch]));
            bits = (bits << 1) | u32::from(rng.uniform01() < p);
        }
    }
    Message::from_bits(shape, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::MessageShape;
    use crate::neural::genome::GenomeLayout;
    use crate::rng::Purpose;

    fn zero_genome() -> Genome {
        Genome::zeros(GenomeLayout::new(MessageShape::SEQUENCE, false))
    }

    #[test]
    fn skip_copies_with_logistic_fidelity() {
        let g = zero_genome();
        let attended = vec![1.0; 30];
        let p = 1.0 / (1.0 + (-3.0f64).exp());
        assert!((p - 0.952_574_126_822_433_4).abs() < 1e-15);
        let trials = 100_000 / 30 + 1;
        let mut plus = 0usize;
        let mut total = 0usize;
        for t in 0..trials {
            let mut rng = RngStream::open(11, 0, t as u64, Purpose::Generate);
            let m = generate_message(&g, &[0.0; 16], &attended, true, 3.0, &mut rng);
            plus += m.symbols().filter(|&s| s == 1).count();
            total += 30;
        }
        let rate = plus as f64 / total as f64;
        assert!((rate - 0.9526).abs() < 0.005, "copy rate {rate}");
    }

    #[test]
    fn no_skip_is_a_fair_coin() {
        let g = zero_genome();
        let attended = vec![1.0; 30];
        let mut plus = 0usize;
        for t in 0..2000u64 {
            let mut rng = RngStream::open(12, 0, t, Purpose::Generate);
            let m = generate_message(&g, &[0.0; 16], &attended, false, 3.0, &mut rng);
            plus += m.symbols().filter(|&s| s == 1).count();
        }
        let rate = plus as f64 / 60_000.0;
        // 3σ of Binomial(60000, 0.5) rate is about 0.0061.
        assert!((rate - 0.5).abs() < 0.0062, "rate {rate}");
    }

    #[test]
    fn saturated_output_bias_forces_plus() {
        let mut g = zero_genome();
        let spec = g.layout().gen_out;
        g.bias_mut(spec).copy_from_slice(&[50.0; 3]);
        let attended: Vec<f64> = (0..30).map(|k| if k % 2 == 0 { -1.0 } else { 1.0 }).collect();
        for t in 0..200u64 {
            let mut rng = RngStream::open(13, 0, t, Purpose::Generate);
            let m = generate_message(&g, &[0.5; 16], &attended, true, 3.0, &mut rng);
            assert_eq!(m, Message::filled(MessageShape::SEQUENCE, 1));
        }
    }

    #[test]
    fn flat_shape_generates_thirty_channels() {
        let g = Genome::zeros(GenomeLayout::new(MessageShape::FLAT, false));
        let mut rng = RngStream::open(14, 0, 0, Purpose::Generate);
        let m = generate_message(&g, &[0.0; 16], &[1.0; 30], true, 50.0, &mut rng);
        assert_eq!(m, Message::filled(MessageShape::FLAT, 1));
    }

    #[test]
    fn pure_function_of_inputs() {
        let layout = GenomeLayout::new(MessageShape::SEQUENCE, false);
        let mut init = RngStream::open(15, 0, 0, Purpose::Init);
        let g = Genome::orthogonal(layout, 4.0, &mut init);
        let attended: Vec<f64> = (0..30).map(|k| ((k * 7) % 5) as f64 - 2.0).collect();
        let run = || {
            let mut rng = RngStream::open(15, 3, 9, Purpose::Generate);
            generate_message(&g, &[0.1; 16], &attended, true, 3.0, &mut rng)
        };
        assert_eq!(run(), run());
    }
}
