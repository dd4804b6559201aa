use serde::{Deserialize, Serialize};

use super::registry::{MemeRegistry, StepCensus};

/// Dominance statistics of one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub step: u64,
    pub max_population: u32,
    pub n_above_40: u32,
    pub n_above_8: u32,
    /// `max_population / grid size`.
    pub coverage: f64,
    pub distinct: u32,
}

impl StepStats {
    pub fn from_census(step: &StepCensus, grid_size: usize, thresholds: &SummaryOptions) -> Self {
        let pops = step.entries.iter().map(|e| e.1);
        let max_population = pops.clone().max().unwrap_or(0);
        Self {
            step: step.step,
            max_population,
            n_above_40: count_above(pops.clone(), thresholds.count_threshold),
            n_above_8: count_above(pops, thresholds.sweep_threshold),
            coverage: max_population as f64 / grid_size as f64,
            distinct: step.entries.len() as u32,
        }
    }

    pub const CSV_HEADER: [&'static str; 6] =
        ["step", "max_pop", "n_above_40", "n_above_8", "coverage", "distinct"];

    pub fn csv_record(&self) -> [String; 6] {
        [
            self.step.to_string(),
            self.max_population.to_string(),
            self.n_above_40.to_string(),
            self.n_above_8.to_string(),
            format!("{}", self.coverage),
            self.distinct.to_string(),
        ]
    }
}

/// Number of populations strictly above `threshold`.
pub fn count_above(pops: impl Iterator<Item = u32>, threshold: u32) -> u32 {
    pops.filter(|&p| p > threshold).count() as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryOptions {
    /// Table-style meme threshold (population strictly above).
    pub count_threshold: u32,
    /// Sweep meme threshold (peak at least this many copies).
    pub sweep_threshold: u32,
    /// Raster brightness threshold (population strictly above).
    pub raster_threshold: u32,
    pub window: u64,
    /// Bins of the window-coverage histogram over [0, 1].
    pub histogram_bins: usize,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        Self {
            count_threshold: 40,
            sweep_threshold: 8,
            raster_threshold: 80,
            window: 1000,
            histogram_bins: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub start: u64,
    pub end: u64,
    pub max_coverage: f64,
    pub mean_coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub options: SummaryOptions,
    pub grid_size: usize,
    pub steps: u64,
    pub max_population: u32,
    pub max_population_step: Option<u64>,
    pub max_population_key: Option<u32>,
    /// Distinct keys whose peak exceeds `count_threshold`.
    pub memes_above: u32,
    /// First step at which any population exceeded `count_threshold`.
    pub first_step_above: Option<u64>,
    /// Distinct keys whose peak is at least `sweep_threshold`.
    pub memes_at_least_sweep: u32,
    /// Distinct keys whose peak exceeds `raster_threshold`.
    pub memes_above_raster: u32,
    pub distinct_total: usize,
    /// Per-step mean count of messages with at least 10 and 20 copies.
    pub mean_at_least_10: f64,
    pub mean_at_least_20: f64,
    pub windows: Vec<WindowStats>,
    /// Histogram of per-window maximum coverage.
    pub coverage_histogram: Vec<u32>,
    pub per_step: Vec<StepStats>,
}

impl CensusSummary {
    /// Table 1 row: `max pop & count above threshold`.
    pub fn table_row(&self) -> String {
        format!("{} & {}", self.max_population, self.memes_above)
    }
}

/// Pure fold over the registry.
pub fn summarize(registry: &MemeRegistry, options: SummaryOptions) -> CensusSummary {
    let grid_size = registry.grid_size();
    let per_step: Vec<StepStats> = registry
        .steps()
        .iter()
        .map(|s| StepStats::from_census(s, grid_size, &options))
        .collect();

    let mut max_population = 0;
    let mut max_population_step = None;
    let mut max_population_key = None;
    for (s, census) in per_step.iter().zip(registry.steps()) {
        if s.max_population > max_population {
            max_population = s.max_population;
            max_population_step = Some(s.step);
            max_population_key = census
                .entries
                .iter()
                .find(|e| e.1 == s.max_population)
                .map(|e| registry.memes()[e.0 as usize].key);
        }
    }
    let first_step_above = per_step.iter().find(|s| s.n_above_40 > 0).map(|s| s.step);

    let memes = registry.memes();
    let peaks = || memes.iter().map(|m| m.peak);
    let memes_above = count_above(peaks(), options.count_threshold);
    let memes_above_raster = count_above(peaks(), options.raster_threshold);
    let memes_at_least_sweep = peaks().filter(|&p| p >= options.sweep_threshold).count() as u32;

    let n = registry.steps().len().max(1) as f64;
    let at_least = |k: u32| {
        registry
            .steps()
            .iter()
            .map(|s| s.entries.iter().filter(|e| e.1 >= k).count())
            .sum::<usize>() as f64
            / n
    };

    let windows = window_stats(&per_step, options.window);
    let bins = options.histogram_bins.max(1);
    let mut coverage_histogram = vec![0u32; bins];
    for w in &windows {
        let b = ((w.max_coverage * bins as f64) as usize).min(bins - 1);
        coverage_histogram[b] += 1;
    }

    CensusSummary {
        options,
        grid_size,
        steps: per_step.len() as u64,
        max_population,
        max_population_step,
        max_population_key,
        memes_above,
        first_step_above,
        memes_at_least_sweep,
        memes_above_raster,
        distinct_total: memes.len(),
        mean_at_least_10: at_least(10),
        mean_at_least_20: at_least(20),
        windows,
        coverage_histogram,
        per_step,
    }
}

fn window_stats(per_step: &[StepStats], window: u64) -> Vec<WindowStats> {
    let window = window.max(1);
    let mut out: Vec<WindowStats> = Vec::new();
    let mut sum = 0.0;
    let mut n = 0usize;
    for s in per_step {
        let start = s.step / window * window;
        if out.last().is_none_or(|w| w.start != start) {
            if let Some(w) = out.last_mut() {
                w.mean_coverage = sum / n as f64;
            }
            out.push(WindowStats {
                start,
                end: start + window,
                max_coverage: 0.0,
                mean_coverage: 0.0,
            });
            sum = 0.0;
            n = 0;
        }
        let w = out.last_mut().unwrap();
        w.max_coverage = w.max_coverage.max(s.coverage);
        sum += s.coverage;
        n += 1;
    }
    if let Some(w) = out.last_mut() {
        w.mean_coverage = sum / n as f64;
    }
    out
}
