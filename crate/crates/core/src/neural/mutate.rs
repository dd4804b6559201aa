use crate::rng::RngStream;

use super::genome::Genome;

/// Independently selects each weight with probability `fraction` and replaces
/// it with `decay · w + N(0, std²)`. Returns how many weights were selected.
pub fn mutate_in_place(genome: &mut Genome, fraction: f64, decay: f64, std: f64, rng: &mut RngStream) -> usize {
    if fraction <= 0.0 {
        return 0;
    }
    let mut selected = 0;
    for w in genome.weights_mut() {
        if rng.uniform01() < fraction {
            *w = decay * *w + std * rng.gaussian();
            selected += 1;
        }
    }
    selected
}

pub fn mutate(genome: &Genome, fraction: f64, decay: f64, std: f64, rng: &mut RngStream) -> Genome {
    let mut child = genome.clone();
    mutate_in_place(&mut child, fraction, decay, std, rng);
    child
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::MessageShape;
    use crate::neural::genome::GenomeLayout;
    use crate::rng::Purpose;

    fn parent() -> Genome {
        let layout = GenomeLayout::new(MessageShape::SEQUENCE, true);
        Genome::orthogonal(layout, 4.0, &mut RngStream::open(1, 0, 0, Purpose::Init))
    }

    #[test]
    fn zero_fraction_is_identity() {
        let p = parent();
        let c = mutate(&p, 0.0, 0.99, 0.2, &mut RngStream::open(2, 0, 0, Purpose::Mutate));
        assert_eq!(c, p);
    }

    #[test]
    fn full_fraction_without_noise_is_pure_decay() {
        let p = parent();
        let c = mutate(&p, 1.0, 0.99, 0.0, &mut RngStream::open(3, 0, 0, Purpose::Mutate));
        for (a, b) in c.weights().iter().zip(p.weights()) {
            assert_eq!(*a, 0.99 * b);
        }
    }

    #[test]
    fn untouched_weights_are_bit_identical() {
        let p = parent();
        let mut c = p.clone();
        let n = mutate_in_place(&mut c, 0.01, 0.99, 0.2, &mut RngStream::open(4, 0, 0, Purpose::Mutate));
        let changed = c
            .weights()
            .iter()
            .zip(p.weights())
            .filter(|(a, b)| a.to_bits() != b.to_bits())
            .count();
        assert!(n > 0);
        // A selected weight can only coincide with its parent by measure-zero luck.
        assert_eq!(changed, n);
        assert_eq!(c.layout(), p.layout());
    }
}
