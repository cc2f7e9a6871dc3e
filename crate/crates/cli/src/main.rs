use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use symshape::harness::{potential_grids, run_experiment, write_csv, ExperimentConfig};
use symshape::{parse_automaton, GridWorld, GuardSemantics, Metric, ProductMDP, RewardConfig};

#[derive(Parser)]
#[command(name = "symshape", version, about = "Potential-based reward shaping from symbolic automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every strategy and seed of an experiment and write the learning curves as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to the config's `out` key, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that an automaton file is deterministic and complete.
    Validate {
        #[arg(long)]
        automaton: PathBuf,
    },
    /// Dump the shaping potential of every location as a CSV grid.
    Potential {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        automaton: PathBuf,
        /// Files are written as `<prefix>_<location>.csv`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "manhattan")]
        metric: Metric,
        #[arg(long, default_value = "next")]
        semantics: GuardSemantics,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(config: &Path, out: Option<PathBuf>) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let rows = run_experiment(&cfg)?;
    match out.or_else(|| cfg.output.clone()) {
        Some(path) => {
            let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(&rows, BufWriter::new(file))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}

fn validate(path: &Path) -> Result<bool> {
    let spec = parse_automaton(&read(path)?)?;
    let report = spec.validate();
    if report.violations.is_empty() {
        println!(
            "ok: {} locations, {} transitions",
            spec.location_count(),
            spec.transitions().len()
        );
        return Ok(true);
    }
    for v in &report.violations {
        println!("{v}");
    }
    Ok(false)
}

fn potential(
    map: &Path,
    automaton: &Path,
    out: &Path,
    metric: Metric,
    semantics: GuardSemantics,
) -> Result<()> {
    let env = GridWorld::load_map(&read(map)?)?;
    let spec = parse_automaton(&read(automaton)?)?;
    let p = ProductMDP::new(env, spec, semantics)?;
    let rcfg = RewardConfig::resolve(&p, metric, 1.0, None, None)?;
    let prefix = out.to_string_lossy();
    if prefix.is_empty() {
        bail!("empty output prefix");
    }
    for (loc, csv) in potential_grids(&p, &rcfg)? {
        let path = PathBuf::from(format!("{prefix}_{loc}.csv"));
        fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => run(&config, out).map(|_| true),
        Command::Validate { automaton } => validate(&automaton),
        Command::Potential {
            map,
            automaton,
            out,
            metric,
            semantics,
        } => potential(&map, &automaton, &out, metric, semantics).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
