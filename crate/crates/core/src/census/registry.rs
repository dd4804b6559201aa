use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::MemeKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemeRecord {
    pub key: MemeKey,
    pub first_seen: u64,
    pub peak: u32,
    pub peak_step: u64,
}

/// Populations of one step as `(meme index, population)`; absent memes have
/// population zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCensus {
    pub step: u64,
    pub entries: Vec<(u32, u32)>,
}

/// Every distinct message ever broadcast, indexed by order of first
/// appearance, with a sparse population series.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "RegistryData", into = "RegistryData")]
pub struct MemeRegistry {
    grid_size: u32,
    memes: Vec<MemeRecord>,
    steps: Vec<StepCensus>,
    index_of: HashMap<MemeKey, u32>,
}

#[derive(Serialize, Deserialize)]
struct RegistryData {
    grid_size: u32,
    memes: Vec<MemeRecord>,
    steps: Vec<StepCensus>,
}

impl From<RegistryData> for MemeRegistry {
    fn from(d: RegistryData) -> Self {
        let index_of = d
            .memes
            .iter()
            .enumerate()
            .map(|(i, m)| (m.key, i as u32))
            .collect();
        Self {
            grid_size: d.grid_size,
            memes: d.memes,
            steps: d.steps,
            index_of,
        }
    }
}

impl From<MemeRegistry> for RegistryData {
    fn from(r: MemeRegistry) -> Self {
        Self {
            grid_size: r.grid_size,
            memes: r.memes,
            steps: r.steps,
        }
    }
}

impl PartialEq for MemeRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.grid_size == other.grid_size && self.memes == other.memes && self.steps == other.steps
    }
}

impl MemeRegistry {
    pub fn new(grid_size: usize) -> Self {
        Self {
            grid_size: grid_size as u32,
            memes: Vec::new(),
            steps: Vec::new(),
            index_of: HashMap::new(),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size as usize
    }

    /// Index the next new message will get.
    pub fn next_index(&self) -> usize {
        self.memes.len()
    }

    pub fn memes(&self) -> &[MemeRecord] {
        &self.memes
    }

    pub fn steps(&self) -> &[StepCensus] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn index_of(&self, key: MemeKey) -> Option<usize> {
        self.index_of.get(&key).map(|&i| i as usize)
    }

    /// Folds one step's census in: unseen keys get the next indices in
    /// census order, peaks are raised.
    pub fn update(&mut self, census: &[(MemeKey, u32)], step: u64) {
        debug_assert!(self.steps.last().is_none_or(|s| s.step < step));
        let mut entries = Vec::with_capacity(census.len());
        for &(key, pop) in census {
            let next = self.memes.len() as u32;
            let idx = *self.index_of.entry(key).or_insert(next);
            if idx == next {
                self.memes.push(MemeRecord {
                    key,
                    first_seen: step,
                    peak: 0,
                    peak_step: step,
                });
            }
            let rec = &mut self.memes[idx as usize];
            if pop > rec.peak {
                rec.peak = pop;
                rec.peak_step = step;
            }
            entries.push((idx, pop));
        }
        self.steps.push(StepCensus { step, entries });
    }

    /// `(step, population)` of one meme wherever it was non-zero.
    pub fn series(&self, index: usize) -> Vec<(u64, u32)> {
        let first = self.memes[index].first_seen;
        self.steps
            .iter()
            .filter(|s| s.step >= first)
            .filter_map(|s| {
                s.entries
                    .iter()
                    .find(|e| e.0 as usize == index)
                    .map(|e| (s.step, e.1))
            })
            .collect()
    }

    /// Series of every meme whose peak is at least `min_peak`, in one pass.
    pub fn series_where(&self, min_peak: u32) -> Vec<(usize, Vec<(u64, u32)>)> {
        let mut slot = vec![u32::MAX; self.memes.len()];
        let mut out = Vec::new();
        for (i, m) in self.memes.iter().enumerate() {
            if m.peak >= min_peak {
                slot[i] = out.len() as u32;
                out.push((i, Vec::new()));
            }
        }
        for s in &self.steps {
            for &(idx, pop) in &s.entries {
                let k = slot[idx as usize];
                if k != u32::MAX {
                    out[k as usize].1.push((s.step, pop));
                }
            }
        }
        out
    }

    /// Writes one JSON object per meme with `peak ≥ min_peak`:
    /// `{"key","index","first_seen","peak","peak_step","series":[[step,pop],…]}`.
    pub fn write_dump(&self, mut w: impl std::io::Write, min_peak: u32) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct Line<'a> {
            key: MemeKey,
            message: String,
            index: usize,
            first_seen: u64,
            peak: u32,
            peak_step: u64,
            series: &'a [(u64, u32)],
        }
        for (index, series) in self.series_where(min_peak) {
            let m = &self.memes[index];
            let line = Line {
                key: m.key,
                message: format!("{:030b}", m.key),
                index,
                first_seen: m.first_seen,
                peak: m.peak,
                peak_step: m.peak_step,
                series: &series,
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}
