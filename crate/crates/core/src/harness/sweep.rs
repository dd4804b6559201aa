use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::GridConfig;
use crate::error::{Error, Result};
use crate::grid::GridDims;

use super::run::{run, RunOptions, Simulation};

/// Grid of task-experiment runs over both selection strengths.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: GridConfig,
    pub gamma_s: Vec<f64>,
    pub gamma_f: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl SweepSpec {
    /// Task on, 16×16, 1000 steps.
    pub fn new(gamma_s: Vec<f64>, gamma_f: Vec<f64>, seeds: Vec<u64>) -> Self {
        let mut base = GridConfig {
            task_on: true,
            steps: 1000,
            ..GridConfig::default()
        };
        base.set_dims(GridDims::new(16, 16));
        Self {
            base,
            gamma_s,
            gamma_f,
            seeds,
        }
    }

    /// One config per (γ_s, γ_f, seed), in that nesting order.
    pub fn cells(&self) -> Result<Vec<GridConfig>> {
        if self.gamma_s.is_empty() || self.gamma_f.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config("sweep needs at least one γ_s, one γ_f and one seed".into()));
        }
        let mut out = Vec::new();
        for &gs in &self.gamma_s {
            for &gf in &self.gamma_f {
                for &seed in &self.seeds {
                    let c = GridConfig {
                        gamma_s: gs,
                        gamma_f: gf,
                        seed,
                        ..self.base.clone()
                    };
                    c.validate()?;
                    out.push(c);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma_s: f64,
    pub gamma_f: f64,
    pub seed: u64,
    pub mean_final_fitness: f64,
    /// Distinct messages whose population reached 8.
    pub memes_at_least_8: u32,
}

pub fn run_cell(config: GridConfig) -> Result<SweepRow> {
    let (gamma_s, gamma_f, seed) = (config.gamma_s, config.gamma_f, config.seed);
    let mut sim = Simulation::new(config)?;
    let summary = run(&mut sim, &RunOptions::default())?;
    Ok(SweepRow {
        gamma_s,
        gamma_f,
        seed,
        mean_final_fitness: summary.final_fitness.unwrap_or(f64::NAN),
        memes_at_least_8: summary.census.memes_at_least_sweep,
    })
}

/// Runs every cell sequentially, reporting each row as it completes.
pub fn sweep(spec: &SweepSpec, mut on_row: impl FnMut(&SweepRow)) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for c in spec.cells()? {
        let row = run_cell(c)?;
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
