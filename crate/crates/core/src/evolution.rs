//! Promotion-weighted, fitness-gated replication with mutation.

use serde::{Deserialize, Serialize};

use crate::config::GridConfig;
use crate::grid::{GridDims, NeighborTable, Site};
use crate::memetics::{AgentRuntime, SelectionCounts};
use crate::neural::mutate_in_place;
use crate::rng::{Purpose, RngStream};

/// One promotion and what came of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationEvent {
    pub step: u64,
    pub promoter: Site,
    pub promoted: Site,
    pub target: Site,
    pub passed_fitness_gate: bool,
}

/// Picks a neighbour slot to promote: uniformly with probability `gamma_s`
/// (or when nothing has been attended yet), otherwise proportionally to the
/// selection counts.
pub fn choose_promotee(counts: &SelectionCounts, gamma_s: f64, rng: &mut RngStream) -> usize {
    let slots = counts.weights().len();
    let uniform = rng.uniform01() < gamma_s;
    let total = counts.total();
    if uniform || total <= 0.0 {
        return rng.index(slots);
    }
    let target = rng.uniform01() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (slot, &w) in counts.weights().iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = slot;
            if target < acc {
                return slot;
            }
        }
    }
    last_positive
}

/// Which agents currently rank among the `top_n` by mean fitness. Ties go to
/// the lower row-major index; agents without a rollout rank last.
#[derive(Debug, Clone)]
pub struct FitnessRanking {
    in_top: Vec<bool>,
}

impl FitnessRanking {
    pub fn new(means: &[f64], top_n: usize) -> Self {
        let mut order: Vec<usize> = (0..means.len()).collect();
        order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(a.cmp(&b)));
        let mut in_top = vec![false; means.len()];
        for &i in order.iter().take(top_n) {
            in_top[i] = true;
        }
        Self { in_top }
    }

    pub fn from_agents(agents: &[AgentRuntime], top_n: usize) -> Self {
        let means: Vec<f64> = agents.iter().map(|a| a.fitness.rank_value()).collect();
        Self::new(&means, top_n)
    }

    pub fn is_top(&self, index: usize) -> bool {
        self.in_top[index]
    }
}

/// Passes with probability `gamma_f` regardless of fitness, otherwise only
/// if `promoted` is in the top ranks.
pub fn fitness_gate(ranking: &FitnessRanking, promoted: usize, gamma_f: f64, rng: &mut RngStream) -> bool {
    let bypass = rng.uniform01() < gamma_f;
    bypass || ranking.is_top(promoted)
}

/// Draws this step's promotions, gates and offspring targets. Nothing is
/// modified; every decision reads the state at the start of the phase.
pub fn plan_replications(
    agents: &[AgentRuntime],
    config: &GridConfig,
    neighbors: &NeighborTable,
    placement: &NeighborTable,
    step: u64,
) -> Vec<ReplicationEvent> {
    if !config.evolution_on {
        return Vec::new();
    }
    let dims = config.dims();
    let promote_prob = config.effective_promote_prob();
    let gamma_s = config.effective_gamma_s();
    let gamma_f = config.effective_gamma_f();
    let ranking = config
        .task_on
        .then(|| FitnessRanking::from_agents(agents, config.top_n));
    let mut events = Vec::new();
    for (i, agent) in agents.iter().enumerate() {
        let mut rng = RngStream::open(config.seed, i, step, Purpose::Promote);
        if !rng.bernoulli(promote_prob) {
            continue;
        }
        let slot = choose_promotee(&agent.counts, gamma_s, &mut rng);
        let promoted = neighbors.of(i)[slot] as usize;
        let passed = match &ranking {
            Some(r) => fitness_gate(r, promoted, gamma_f, &mut RngStream::open(config.seed, i, step, Purpose::Gate)),
            None => true,
        };
        let mut place = RngStream::open(config.seed, i, step, Purpose::Replicate);
        let target = placement.of(promoted)[place.index(placement.width())] as usize;
        events.push(ReplicationEvent {
            step,
            promoter: dims.site(i),
            promoted: dims.site(promoted),
            target: dims.site(target),
            passed_fitness_gate: passed,
        });
    }
    events
}

/// Applies the gated events in promoter row-major order. Each offspring is a
/// (possibly mutated) copy of the promoted agent's genome as it was before
/// any of this step's events; later events overwrite earlier ones. The target
/// site's state is reset. Returns how many offspring were placed.
pub fn apply_replication(agents: &mut [AgentRuntime], events: &[ReplicationEvent], config: &GridConfig) -> usize {
    let dims: GridDims = config.dims();
    let children: Vec<(usize, crate::neural::Genome)> = events
        .iter()
        .filter(|e| e.passed_fitness_gate)
        .map(|e| {
            let promoter = dims.index(e.promoter);
            let mut child = agents[dims.index(e.promoted)].genome.clone();
            if config.mutation_on {
                let mut rng = RngStream::open(config.seed, promoter, e.step, Purpose::Mutate);
                mutate_in_place(
                    &mut child,
                    config.mutation_fraction,
                    config.weight_decay,
                    config.mutation_std,
                    &mut rng,
                );
            }
            (dims.index(e.target), child)
        })
        .collect();
    let placed = children.len();
    for (target, genome) in children {
        let agent = &mut agents[target];
        agent.genome = genome;
        if config.reset_offspring_state {
            agent.reset_state();
        } else {
            agent.fitness = Default::default();
        }
    }
    placed
}
