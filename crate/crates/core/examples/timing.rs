//! Rough per-step and per-rollout timings on this machine.
//!
//! `cargo run --release -p memesim --example timing`

use std::time::Instant;

use memesim::neural::{Genome, GenomeLayout};
use memesim::task::{rollout_fitness, SurrogateWalker};
use memesim::{GridConfig, MessageShape, Purpose, RngStream, World};

fn main() {
    let mut world = World::new(GridConfig::default()).expect("world");
    for _ in 0..10 {
        world.step();
    }
    let steps = 50;
    let t = Instant::now();
    for _ in 0..steps {
        world.step();
    }
    let per_step = t.elapsed().as_secs_f64() / steps as f64;
    println!("32x32 step: {:.1} ms ({:.1} us per agent)", per_step * 1e3, per_step * 1e6 / 1024.0);

    let layout = GenomeLayout::new(MessageShape::SEQUENCE, true);
    let genome = Genome::orthogonal(layout, 4.0, &mut RngStream::open(1, 0, 0, Purpose::Init));
    let rollouts = 200;
    let t = Instant::now();
    let mut total = 0.0;
    for i in 0..rollouts {
        let mut env = SurrogateWalker::default();
        let mut rng = RngStream::open(1, 0, i, Purpose::Rollout);
        total += rollout_fitness(&genome, &[0.1; 16], &mut env, 400, i, &mut rng).expect("rollout");
    }
    println!(
        "400-step rollout: {:.0} us (mean fitness {:.3})",
        t.elapsed().as_secs_f64() * 1e6 / rollouts as f64,
        total / rollouts as f64
    );
}
