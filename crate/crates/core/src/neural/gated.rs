use super::genome::Dense;
use super::sigmoid;

/// One gated recurrent update: `h' = G ⊙ h + (1 − G) ⊙ U` with
/// `G = σ(gate(x))` and `U = update(x)`. `x` already contains `h`.
pub fn gated_step(gate: Dense<'_>, update: Dense<'_>, x: &[f64], h: &[f64]) -> Vec<f64> {
    debug_assert_eq!(gate.outputs, h.len());
    debug_assert_eq!(update.outputs, h.len());
    let mut g = vec![0.0; h.len()];
    let mut u = vec![0.0; h.len()];
    gate.apply(x, &mut g);
    update.apply(x, &mut u);
    h.iter()
        .zip(g.iter().zip(&u))
        .map(|(&hj, (&gj, &uj))| {
            let s = sigmoid(gj);
            s * hj + (1.0 - s) * uj
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, RngStream};
    use proptest::prelude::*;

    struct Layer {
        w: Vec<f64>,
        b: Vec<f64>,
        inputs: usize,
        outputs: usize,
    }

    impl Layer {
        fn random(inputs: usize, outputs: usize, rng: &mut RngStream) -> Self {
            Self {
                w: (0..inputs * outputs).map(|_| rng.gaussian()).collect(),
                b: (0..outputs).map(|_| rng.gaussian()).collect(),
                inputs,
                outputs,
            }
        }

        fn zero(inputs: usize, outputs: usize) -> Self {
            Self {
                w: vec![0.0; inputs * outputs],
                b: vec![0.0; outputs],
                inputs,
                outputs,
            }
        }

        fn view(&self) -> Dense<'_> {
            Dense {
                weight: &self.w,
                bias: &self.b,
                inputs: self.inputs,
                outputs: self.outputs,
            }
        }
    }

    #[test]
    fn zero_layers_halve_the_state() {
        let gate = Layer::zero(5, 3);
        let update = Layer::zero(5, 3);
        let h = [0.4, -2.0, 1.5];
        let x = [1.0, 2.0, 0.4, -2.0, 1.5];
        let out = gated_step(gate.view(), update.view(), &x, &h);
        for (o, hv) in out.iter().zip(h) {
            assert_eq!(*o, 0.5 * hv);
        }
    }

    #[test]
    fn saturated_gate_keeps_state() {
        let mut rng = RngStream::open(1, 0, 0, Purpose::Scratch);
        let mut gate = Layer::zero(4, 2);
        gate.b = vec![50.0; 2];
        let update = Layer::random(4, 2, &mut rng);
        let h = [0.3, -0.7];
        let x = [0.1, 0.2, 0.3, -0.7];
        let out = gated_step(gate.view(), update.view(), &x, &h);
        for (o, hv) in out.iter().zip(h) {
            assert!((o - hv).abs() < 1e-8);
        }
    }

    #[test]
    fn matches_direct_formula() {
        let mut rng = RngStream::open(2, 0, 0, Purpose::Scratch);
        let gate = Layer::random(29, 10, &mut rng);
        let update = Layer::random(29, 10, &mut rng);
        let x: Vec<f64> = (0..29).map(|_| rng.gaussian()).collect();
        let h = x[19..].to_vec();
        let out = gated_step(gate.view(), update.view(), &x, &h);
        for j in 0..10 {
            let mut gs = gate.b[j];
            let mut us = update.b[j];
            for i in 0..29 {
                gs += gate.w[j * 29 + i] * x[i];
                us += update.w[j * 29 + i] * x[i];
            }
            let gv = 1.0 / (1.0 + (-gs).exp());
            let expect = gv * h[j] + (1.0 - gv) * us;
            assert!((out[j] - expect).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn output_is_convex_combination(seed in any::<u64>(), scale in 0.1f64..10.0) {
            let mut rng = RngStream::open(seed, 0, 0, Purpose::Scratch);
            let mut gate = Layer::random(8, 4, &mut rng);
            let mut update = Layer::random(8, 4, &mut rng);
            gate.w.iter_mut().for_each(|w| *w *= scale);
            update.w.iter_mut().for_each(|w| *w *= scale);
            let x: Vec<f64> = (0..8).map(|_| rng.gaussian() * scale).collect();
            let h = x[4..].to_vec();
            let mut u = vec![0.0; 4];
            update.view().apply(&x, &mut u);
            let out = gated_step(gate.view(), update.view(), &x, &h);
            for j in 0..4 {
                let bound = h[j].abs().max(u[j].abs());
                prop_assert!(out[j].abs() <= bound * (1.0 + 1e-12) + 1e-15);
            }
        }
    }
}
