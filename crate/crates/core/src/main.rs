use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use gazelod::config::RunConfig;
use gazelod::gaze::read_interest_table;
use gazelod::sim::{self, Preset, Scenario};
use gazelod::terrain::{hf1, TerrainTree, TreeParams};
use gazelod::Result;

/// Gaze-aware terrain preloading: tree building, simulation and reports.
#[derive(Parser)]
#[command(name = "gazelod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the subdivision tree of an HF1 height field and print its shape.
    BuildTree {
        hf1: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 4)]
        max_children: usize,
        #[arg(long, default_value_t = 16)]
        max_points: usize,
    },
    /// Run one or more scenario files and write a report directory.
    Simulate {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Flat TOML run configuration; defaults apply to missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Interest table from an earlier trip; skips the survey trip.
        #[arg(long)]
        interests: Option<PathBuf>,
    },
    /// Write a preset scenario as TOML.
    GenScenario {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// standard, turny, fatigue-heavy or fatigue-control
        #[arg(long, default_value = "standard")]
        preset: Preset,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the accuracy and throughput tables of a run directory.
    Report { run_dir: PathBuf },
    /// Print the default run configuration.
    DefaultConfig,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
}

fn build_tree(path: &Path, alpha: f64, max_children: usize, max_points: usize) -> Result<()> {
    let field = Arc::new(hf1::read(path)?);
    let tree = TerrainTree::build(field, TreeParams::new(alpha, max_children, max_points))?;
    let leaves = tree.leaves().count();
    let worst = tree.leaves().map(|n| n.error).fold(0.0, f64::max);
    println!("nodes {}", tree.len());
    println!("leaves {leaves}");
    println!("depth {}", tree.depth());
    println!("root_error {:.6}", tree.root().error);
    println!("max_leaf_error {worst:.6}");
    println!("root_bytes {}", tree.root().data_size);
    Ok(())
}

fn simulate(scenarios: &[PathBuf], config: Option<&Path>, out: &Path, interests: Option<&Path>) -> Result<()> {
    let cfg = load_config(config)?;
    let loaded: Vec<Scenario> = scenarios.iter().map(|p| Scenario::load(p)).collect::<Result<_>>()?;
    let prior = interests
        .map(|p| read_interest_table(p, cfg.interest_capacity))
        .transpose()?;
    let mut runs = Vec::with_capacity(loaded.len());
    for s in &loaded {
        let prepared = sim::prepare(s, &cfg, prior.clone())?;
        let run = sim::run_prepared(s, &cfg, &prepared)?;
        let r = &run.result;
        eprintln!(
            "{}: detected {}/{}  cruise bytes {:.3} of baseline  alerts {}",
            r.scenario,
            r.detected,
            r.total,
            r.cruise.ratio(),
            r.fatigue_alerts + r.flight_risk_alerts
        );
        runs.push(run);
    }
    let sources: Vec<String> = scenarios.iter().map(|p| p.display().to_string()).collect();
    sim::emit_report(out, &runs, &cfg, &sources)?;
    print!("{}", sim::summarize_run_dir(out)?);
    Ok(())
}

fn gen_scenario(seed: u64, preset: Preset, config: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let cfg = load_config(config)?;
    let s = sim::build_preset(preset, seed, &cfg)?;
    match out {
        Some(p) => s.save(p),
        None => {
            print!("{}", s.to_toml());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildTree {
            hf1,
            alpha,
            max_children,
            max_points,
        } => build_tree(&hf1, alpha, max_children, max_points),
        Command::Simulate {
            scenarios,
            config,
            out,
            interests,
        } => simulate(&scenarios, config.as_deref(), &out, interests.as_deref()),
        Command::GenScenario {
            seed,
            preset,
            config,
            out,
        } => gen_scenario(seed, preset, config.as_deref(), out.as_deref()),
        Command::Report { run_dir } => {
            print!("{}", sim::summarize_run_dir(&run_dir)?);
            Ok(())
        }
        Command::DefaultConfig => {
            print!("{}", RunConfig::default().to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
