//! Meme accounting: message identity, per-step populations, the
//! first-appearance registry, dominance statistics and the raster view.

mod raster;
mod registry;
mod stats;

pub use raster::{render_raster, Raster};
pub use registry::{MemeRecord, MemeRegistry, StepCensus};
pub use stats::{summarize, CensusSummary, StepStats, SummaryOptions, WindowStats};

use std::collections::HashMap;

use crate::message::Message;

/// Injective key of a message: its symbols row-major as bits, `+1` as 1.
pub type MemeKey = u32;

pub fn canonical_key(m: &Message) -> MemeKey {
    m.bits()
}

/// Population of every message broadcast in one step, in order of first
/// occurrence among the row-major broadcasts.
pub fn take_census(broadcasts: &[Message]) -> Vec<(MemeKey, u32)> {
    let mut position: HashMap<MemeKey, usize> = HashMap::with_capacity(broadcasts.len());
    let mut out: Vec<(MemeKey, u32)> = Vec::new();
    for m in broadcasts {
        let key = canonical_key(m);
        match position.get(&key) {
            Some(&p) => out[p].1 += 1,
            None => {
                position.insert(key, out.len());
                out.push((key, 1));
            }
        }
    }
    out
}
