use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use memesim::census::{summarize, SummaryOptions};
use memesim::harness::{
    self, preset, replay, run, with_workers, worker_count, Checkpoint, Profile, RunOptions, Simulation, SweepSpec,
};
use memesim::{GridConfig, GridDims};

#[derive(Parser)]
#[command(name = "memesim", version, about = "Grid simulator of memetic evolution among recurrent agents")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = harness::WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Run(RunArgs),
    /// Run a grid of task experiments over γ_s × γ_f × seeds.
    Sweep(SweepArgs),
    /// Continue a run from a checkpoint.
    Resume(ResumeArgs),
    /// Recompute the census of a run from its message log.
    Replay(ReplayArgs),
    /// List ablation presets.
    Presets,
}

#[derive(Args)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Record every broadcast to messages.log.
    #[arg(long)]
    log_messages: bool,
    /// Save checkpoint.bin every N steps.
    #[arg(long, value_name = "N")]
    checkpoint_every: Option<u64>,
    /// Save checkpoint.bin after the last step.
    #[arg(long)]
    final_checkpoint: bool,
    /// Minimum peak population of memes written to registry.jsonl.
    #[arg(long, default_value_t = 8)]
    dump_min_peak: u32,
    /// Raster column block width in steps (max-pooled).
    #[arg(long, default_value_t = 1)]
    downsample: usize,
    /// Progress line interval in steps (0 disables).
    #[arg(long, default_value_t = 100)]
    progress: u64,
}

impl OutputArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            out_dir: Some(self.out.clone()),
            message_log: self.log_messages,
            checkpoint_every: self.checkpoint_every,
            final_checkpoint: self.final_checkpoint,
            dump_min_peak: self.dump_min_peak,
            raster_downsample: self.downsample,
            progress_every: (self.progress > 0).then_some(self.progress),
            ..RunOptions::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Ablation preset.
    #[arg(long, default_value = "baseline")]
    preset: String,
    /// Scale profile applied before --dims/--steps: ci (16x16, 2000) or paper (32x32, 10000).
    #[arg(long)]
    profile: Option<Profile>,
    /// Config file (TOML); preset flags are applied on top.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<u64>,
    /// Grid size as RxC.
    #[arg(long)]
    dims: Option<GridDims>,
    /// Enable the task (surrogate unless the config names a command).
    #[arg(long)]
    task: bool,
    #[arg(long)]
    gamma_s: Option<f64>,
    #[arg(long)]
    gamma_f: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    gamma_s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    gamma_f: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    seeds: Vec<u64>,
    /// Base config file (TOML); task is forced on.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    dims: Option<GridDims>,
    /// Output CSV.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ResumeArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// New total step count.
    #[arg(long)]
    steps: Option<u64>,
    /// Refuse the checkpoint unless it was written under this config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: the checkpoint's directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    log_messages: bool,
    #[arg(long, value_name = "N")]
    checkpoint_every: Option<u64>,
    #[arg(long)]
    final_checkpoint: bool,
    #[arg(long, default_value_t = 8)]
    dump_min_peak: u32,
    #[arg(long, default_value_t = 1)]
    downsample: usize,
    #[arg(long, default_value_t = 100)]
    progress: u64,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    log: PathBuf,
    /// Output directory for stats.csv, registry.jsonl and raster.pgm.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    dump_min_peak: u32,
    #[arg(long, default_value_t = 1)]
    downsample: usize,
}

fn main() {
    if let Err(e) = real_main() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    let workers = worker_count(cli.workers)?;
    match cli.command {
        Command::Run(args) => with_workers(workers, || cmd_run(args))?,
        Command::Sweep(args) => with_workers(workers, || cmd_sweep(args))?,
        Command::Resume(args) => with_workers(workers, || cmd_resume(args))?,
        Command::Replay(args) => cmd_replay(args),
        Command::Presets => {
            for p in harness::PRESETS {
                println!("{}", serde_json::to_string(&p)?);
            }
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<GridConfig> {
    Ok(match path {
        Some(p) => GridConfig::load(p)?,
        None => GridConfig::default(),
    })
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(p) = args.profile {
        p.apply(&mut config);
    }
    preset(&args.preset)?.apply(&mut config);
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(s) = args.steps {
        config.steps = s;
    }
    if let Some(d) = args.dims {
        config.set_dims(d);
    }
    if args.task {
        config.task_on = true;
    }
    if let Some(g) = args.gamma_s {
        config.gamma_s = g;
    }
    if let Some(g) = args.gamma_f {
        config.gamma_f = g;
    }
    let mut sim = Simulation::new(config)?;
    let summary = run(&mut sim, &args.output.options())?;
    print_summary(&args.preset, &summary);
    Ok(())
}

fn cmd_resume(args: ResumeArgs) -> Result<()> {
    let expected = args.config.as_deref().map(GridConfig::load).transpose()?;
    let ck = Checkpoint::load(&args.checkpoint, expected.as_ref())?;
    let out = match args.out {
        Some(o) => o,
        None => args.checkpoint.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    eprintln!("resuming at step {} (config {})", ck.next_step, ck.config_hash);
    let mut sim = Simulation::from_checkpoint(ck)?;
    if let Some(s) = args.steps {
        sim.set_steps(s);
    }
    let options = RunOptions {
        out_dir: Some(out),
        message_log: args.log_messages,
        checkpoint_every: args.checkpoint_every,
        final_checkpoint: args.final_checkpoint,
        dump_min_peak: args.dump_min_peak,
        raster_downsample: args.downsample,
        progress_every: (args.progress > 0).then_some(args.progress),
        ..RunOptions::default()
    };
    let summary = run(&mut sim, &options)?;
    print_summary("resumed", &summary);
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut spec = SweepSpec::new(args.gamma_s, args.gamma_f, args.seeds);
    if let Some(p) = &args.config {
        spec.base = GridConfig::load(p)?;
        spec.base.task_on = true;
    }
    if let Some(s) = args.steps {
        spec.base.steps = s;
    }
    if let Some(d) = args.dims {
        spec.base.set_dims(d);
    }
    let total = spec.cells()?.len();
    let mut done = 0;
    let rows = harness::sweep(&spec, |r| {
        done += 1;
        eprintln!(
            "[{done}/{total}] γ_s={} γ_f={} seed={}: fitness {:.4}, memes≥8 {}",
            r.gamma_s, r.gamma_f, r.seed, r.mean_final_fitness, r.memes_at_least_8
        );
    })?;
    harness::write_sweep_csv(&args.out, &rows).with_context(|| format!("writing {}", args.out.display()))?;
    println!("{} rows written to {}", rows.len(), args.out.display());
    Ok(())
}

fn cmd_replay(args: ReplayArgs) -> Result<()> {
    let registry = replay(&args.log)?;
    if registry.is_empty() {
        bail!("{} contains no steps", args.log.display());
    }
    let summary = summarize(&registry, SummaryOptions::default());
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        harness::write_stats_csv(&dir.join(harness::STATS_FILE), &summary.per_step)?;
        let mut dump = Vec::new();
        registry.write_dump(&mut dump, args.dump_min_peak)?;
        std::fs::write(dir.join(harness::REGISTRY_FILE), dump)?;
        let raster = memesim::census::render_raster(&registry, summary.options.raster_threshold, args.downsample);
        std::fs::write(dir.join(harness::RASTER_FILE), raster.to_pgm())?;
    }
    println!(
        "steps {}  distinct {}  max pop {}  memes >40 {}",
        summary.steps, summary.distinct_total, summary.max_population, summary.memes_above
    );
    println!("table: {}", summary.table_row());
    Ok(())
}

fn print_summary(label: &str, s: &harness::RunSummary) {
    println!("{label} seed {} {} {} steps: {}", s.seed, s.dims, s.steps, s.table_row);
    println!(
        "max pop {} at step {}, memes >40: {}, memes >=8: {}, first >40 at {}",
        s.census.max_population,
        s.census.max_population_step.map_or("-".into(), |v| v.to_string()),
        s.census.memes_above,
        s.census.memes_at_least_sweep,
        s.census.first_step_above.map_or("-".into(), |v| v.to_string()),
    );
    if let Some(f) = s.final_fitness {
        println!("final fitness {f:.6}");
    }
}
