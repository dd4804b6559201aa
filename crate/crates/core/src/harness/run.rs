use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::census::{render_raster, summarize, take_census, CensusSummary, MemeRegistry, StepStats, SummaryOptions};
use crate::config::GridConfig;
use crate::error::{Error, Result};
use crate::evolution::ReplicationEvent;
use crate::world::{StepReport, World};

use super::checkpoint::{write_checkpoint, Checkpoint, CheckpointRef};
use super::msglog::{LogHeader, MessageLogWriter};

pub const STATS_FILE: &str = "stats.csv";
pub const REGISTRY_FILE: &str = "registry.jsonl";
pub const RASTER_FILE: &str = "raster.pgm";
pub const EVENTS_FILE: &str = "events.csv";
pub const FITNESS_FILE: &str = "fitness.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const LOG_FILE: &str = "messages.log";
pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const FAULTS_FILE: &str = "faults.log";

/// Task outcome of one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessRow {
    pub step: u64,
    pub mean: f64,
    pub best: f64,
    pub completed: u32,
    pub faults: u32,
}

/// A world plus everything recorded about it so far.
pub struct Simulation {
    world: World,
    registry: MemeRegistry,
    stats: Vec<StepStats>,
    events: Vec<ReplicationEvent>,
    fitness: Vec<FitnessRow>,
    options: SummaryOptions,
    log: Option<MessageLogWriter>,
    faults: Vec<String>,
}

impl Simulation {
    pub fn new(config: GridConfig) -> Result<Self> {
        let world = World::new(config)?;
        let registry = MemeRegistry::new(world.config().dims().len());
        Ok(Self {
            world,
            registry,
            stats: Vec::new(),
            events: Vec::new(),
            fitness: Vec::new(),
            options: SummaryOptions::default(),
            log: None,
            faults: Vec::new(),
        })
    }

    pub fn from_checkpoint(ck: Checkpoint) -> Result<Self> {
        let options = SummaryOptions::default();
        let grid = ck.registry.grid_size();
        let stats = ck
            .registry
            .steps()
            .iter()
            .map(|s| StepStats::from_census(s, grid, &options))
            .collect();
        let world = World::from_parts(ck.config, ck.agents, ck.next_step)?;
        Ok(Self {
            world,
            registry: ck.registry,
            stats,
            events: ck.events,
            fitness: ck.fitness,
            options,
            log: None,
            faults: Vec::new(),
        })
    }

    /// Records every step's broadcasts to `path`. A fresh run creates the
    /// file; a resumed one appends after the steps already taken.
    pub fn attach_log(&mut self, path: &Path) -> Result<()> {
        let header = LogHeader {
            dims: self.world.config().dims(),
            shape: self.world.config().message_shape(),
        };
        self.log = Some(if self.world.next_step() == 0 {
            MessageLogWriter::create(path, header)?
        } else {
            MessageLogWriter::resume(path, header, self.world.next_step())?
        });
        Ok(())
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn config(&self) -> &GridConfig {
        self.world.config()
    }

    pub fn set_steps(&mut self, steps: u64) {
        self.world.set_steps(steps);
    }

    pub fn registry(&self) -> &MemeRegistry {
        &self.registry
    }

    pub fn stats(&self) -> &[StepStats] {
        &self.stats
    }

    pub fn events(&self) -> &[ReplicationEvent] {
        &self.events
    }

    pub fn fitness(&self) -> &[FitnessRow] {
        &self.fitness
    }

    pub fn is_done(&self) -> bool {
        self.world.next_step() >= self.config().steps
    }

    /// One step followed by its census. A rollout fault only drops that
    /// agent's fitness sample and is reported in [`Simulation::faults`]; a
    /// step in which every rollout failed is an error, as is any I/O failure.
    pub fn step(&mut self) -> Result<StepReport> {
        let report = self.world.step();
        let census = take_census(&report.broadcasts);
        self.registry.update(&census, report.step);
        let last = self.registry.steps().last().expect("just updated");
        self.stats
            .push(StepStats::from_census(last, self.registry.grid_size(), &self.options));
        self.events.extend_from_slice(&report.events);
        if let Some(log) = &mut self.log {
            log.write_step(&report.broadcasts)?;
        }
        if let Some(r) = &report.rollouts {
            self.fitness.push(FitnessRow {
                step: report.step,
                mean: r.mean,
                best: r.best,
                completed: r.completed as u32,
                faults: r.faults.len() as u32,
            });
            self.faults.extend(r.faults.iter().cloned());
            if r.completed == 0 && !r.faults.is_empty() {
                return Err(Error::Environment(format!(
                    "every rollout failed at step {}, first: {}",
                    report.step, r.faults[0]
                )));
            }
        }
        Ok(report)
    }

    /// Rollout faults seen since this simulation was created or resumed.
    pub fn faults(&self) -> &[String] {
        &self.faults
    }

    /// Writes buffered message-log steps to disk.
    pub fn flush_log(&mut self) -> Result<()> {
        match &mut self.log {
            Some(log) => log.flush(),
            None => Ok(()),
        }
    }

    pub fn save_checkpoint(&mut self, path: &Path) -> Result<()> {
        self.flush_log()?;
        write_checkpoint(
            path,
            &CheckpointRef {
                config: self.world.config(),
                config_hash: self.world.config().hash(),
                next_step: self.world.next_step(),
                agents: self.world.agents(),
                registry: &self.registry,
                events: &self.events,
                fitness: &self.fitness,
            },
        )
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            config: self.world.config().clone(),
            config_hash: self.world.config().hash(),
            next_step: self.world.next_step(),
            agents: self.world.agents().to_vec(),
            registry: self.registry.clone(),
            events: self.events.clone(),
            fitness: self.fitness.clone(),
        }
    }

    /// Mean of the per-step mean rollout fitness over the last tenth of the
    /// recorded steps (at least one step).
    pub fn final_fitness(&self) -> Option<f64> {
        if self.fitness.is_empty() {
            return None;
        }
        let n = (self.fitness.len() / 10).max(1);
        let tail = &self.fitness[self.fitness.len() - n..];
        let valid: Vec<f64> = tail.iter().map(|r| r.mean).filter(|m| m.is_finite()).collect();
        (!valid.is_empty()).then(|| valid.iter().sum::<f64>() / valid.len() as f64)
    }

    pub fn summary(&self) -> RunSummary {
        let census = summarize(&self.registry, self.options);
        let c = self.config();
        RunSummary {
            config_hash: c.hash(),
            seed: c.seed,
            dims: c.dims().to_string(),
            message_shape: format!("{}x{}", c.message_len, c.message_channels),
            steps: self.world.next_step(),
            table_row: census.table_row(),
            replications: self.events.iter().filter(|e| e.passed_fitness_gate).count() as u64,
            promotions: self.events.len() as u64,
            final_fitness: self.final_fitness(),
            rollout_faults: self.fitness.iter().map(|r| u64::from(r.faults)).sum(),
            census,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub config_hash: String,
    pub seed: u64,
    pub dims: String,
    pub message_shape: String,
    pub steps: u64,
    /// `max pop & count above 40`.
    pub table_row: String,
    pub promotions: u64,
    pub replications: u64,
    pub final_fitness: Option<f64>,
    pub rollout_faults: u64,
    #[serde(serialize_with = "census_without_steps")]
    pub census: CensusSummary,
}

fn census_without_steps<S: serde::Serializer>(c: &CensusSummary, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut c = c.clone();
    c.per_step.clear();
    let mut v = serde_json::to_value(&c).map_err(serde::ser::Error::custom)?;
    if let Some(m) = v.as_object_mut() {
        m.remove("per_step");
    }
    v.serialize(s)
}

/// What a run writes besides its summary.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    /// Record broadcasts to `messages.log` for later replay.
    pub message_log: bool,
    /// Save `checkpoint.bin` every this many steps.
    pub checkpoint_every: Option<u64>,
    /// Save `checkpoint.bin` after the last step.
    pub final_checkpoint: bool,
    /// Registry dump includes memes whose peak is at least this.
    pub dump_min_peak: u32,
    pub raster_threshold: u32,
    pub raster_downsample: usize,
    /// Print one progress line every this many steps to stderr.
    pub progress_every: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            out_dir: None,
            message_log: false,
            checkpoint_every: None,
            final_checkpoint: false,
            dump_min_peak: 8,
            raster_threshold: 80,
            raster_downsample: 1,
            progress_every: None,
        }
    }
}

impl RunOptions {
    pub fn with_out_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: Some(dir.into()),
            ..Self::default()
        }
    }

    fn file(&self, name: &str) -> Option<PathBuf> {
        self.out_dir.as_ref().map(|d| d.join(name))
    }
}

/// Runs `sim` to its configured step count, writing outputs under
/// `options.out_dir`. A step error saves a checkpoint there (when an output
/// directory is set) and aborts with the error.
pub fn run(sim: &mut Simulation, options: &RunOptions) -> Result<RunSummary> {
    if let Some(dir) = &options.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        std::fs::write(dir.join(CONFIG_FILE), sim.config().to_toml_string())
            .map_err(|e| Error::io(format!("writing {}", dir.join(CONFIG_FILE).display()), e))?;
        if options.message_log && sim.log.is_none() {
            sim.attach_log(&dir.join(LOG_FILE))?;
        }
    }
    let started = std::time::Instant::now();
    while !sim.is_done() {
        if let Err(e) = sim.step() {
            if let Some(path) = options.file(CHECKPOINT_FILE) {
                sim.save_checkpoint(&path)?;
                eprintln!("aborting: {e}; state saved to {}", path.display());
            }
            return Err(e);
        }
        let done = sim.world.next_step();
        if let (Some(every), Some(path)) = (options.checkpoint_every, options.file(CHECKPOINT_FILE)) {
            if every > 0 && done % every == 0 {
                sim.save_checkpoint(&path)?;
            }
        }
        if let Some(every) = options.progress_every {
            if every > 0 && done % every == 0 {
                let s = sim.stats.last().unwrap();
                eprintln!(
                    "step {done}/{}: max pop {}, distinct {}, {:.1}s",
                    sim.config().steps,
                    s.max_population,
                    s.distinct,
                    started.elapsed().as_secs_f64()
                );
            }
        }
    }
    sim.flush_log()?;
    if options.final_checkpoint {
        if let Some(path) = options.file(CHECKPOINT_FILE) {
            sim.save_checkpoint(&path)?;
        }
    }
    let summary = sim.summary();
    if let Some(dir) = &options.out_dir {
        write_outputs(sim, &summary, dir, options)?;
    }
    Ok(summary)
}

pub fn write_outputs(sim: &Simulation, summary: &RunSummary, dir: &Path, options: &RunOptions) -> Result<()> {
    write_stats_csv(&dir.join(STATS_FILE), sim.stats())?;
    write_events_csv(&dir.join(EVENTS_FILE), sim.events())?;
    if sim.config().task_on {
        write_fitness_csv(&dir.join(FITNESS_FILE), sim.fitness())?;
    }
    if !sim.faults().is_empty() {
        let path = dir.join(FAULTS_FILE);
        std::fs::write(&path, sim.faults().join("\n") + "\n")
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    let path = dir.join(REGISTRY_FILE);
    let file = File::create(&path).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    let mut out = BufWriter::new(file);
    sim.registry()
        .write_dump(&mut out, options.dump_min_peak)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    let raster = render_raster(sim.registry(), options.raster_threshold, options.raster_downsample);
    let path = dir.join(RASTER_FILE);
    std::fs::write(&path, raster.to_pgm()).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    let path = dir.join(SUMMARY_FILE);
    let text = serde_json::to_string_pretty(summary)?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_stats_csv(path: &Path, stats: &[StepStats]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(StepStats::CSV_HEADER)?;
    for s in stats {
        w.write_record(s.csv_record())?;
    }
    w.flush().map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_events_csv(path: &Path, events: &[ReplicationEvent]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "step",
        "promoter_row",
        "promoter_col",
        "promoted_row",
        "promoted_col",
        "target_row",
        "target_col",
        "replicated",
    ])?;
    for e in events {
        w.write_record([
            e.step.to_string(),
            e.promoter.row.to_string(),
            e.promoter.col.to_string(),
            e.promoted.row.to_string(),
            e.promoted.col.to_string(),
            e.target.row.to_string(),
            e.target.col.to_string(),
            (e.passed_fitness_gate as u8).to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_fitness_csv(path: &Path, rows: &[FitnessRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
