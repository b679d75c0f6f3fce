use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gridqaoa::cli::{self, SolveConfig};
use gridqaoa::instance::{BitString, Grid, ProblemGraph};
use gridqaoa::Error;

#[derive(Parser)]
#[command(
    name = "gridqaoa",
    about = "Variational grid-ansatz experiments for MaxCut",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a generate -> embed -> optimize experiment from a JSON config.
    Solve {
        /// Experiment config file.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for report.json, trace.csv, assignment.json,
        /// schedule.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Upper bound on worker threads (the current kernels are
        /// sequential, so any value >= 1 is accepted).
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Run a named invariant suite (formulas, lightcone, embedding, cat,
    /// optimizer).
    Verify { suite: String },
    /// Optimal two angles and the worst-case ratio bound for an edge census.
    Bound { m: usize, m1: usize, m2: usize, m3: usize },
    /// Greedy-embed a graph onto a grid; emits the assignment and census.
    Embed {
        /// Problem graph JSON file {"n": ..., "edges": [[i,j], ...]}.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write assignment.json (omit to skip the file).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cat-state schedule for a target string; emits schedule + fidelity.
    Cat {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Target string w over grid sites, first character is site 0.
        #[arg(long)]
        w: String,
        /// Where to write schedule.json (omit to skip the file).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(command: Command) -> Result<bool, Error> {
    match command {
        Command::Solve { config, seed, out, threads } => {
            if threads == 0 {
                return Err(Error::Config("--threads must be at least 1".into()));
            }
            let mut config: SolveConfig = cli::load_config(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let report = cli::cmd_solve(&config, &out)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
        Command::Verify { suite } => {
            let checks = cli::cmd_verify(&suite)?;
            let mut all_ok = true;
            for check in &checks {
                let status = if check.pass { "ok  " } else { "FAIL" };
                println!("{status} {:<40} {}", check.name, check.detail);
                all_ok &= check.pass;
            }
            Ok(all_ok)
        }
        Command::Bound { m, m1, m2, m3 } => {
            let bound = cli::cmd_bound(m, m1, m2, m3)?;
            println!("{}", serde_json::to_string_pretty(&bound)?);
            Ok(true)
        }
        Command::Embed { graph, rows, cols, seed, out } => {
            let text = std::fs::read_to_string(&graph)?;
            let graph: ProblemGraph = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("graph file: {e}")))?;
            let grid = Grid::new(rows, cols)?;
            let report = cli::cmd_embed(&graph, &grid, seed)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                let mut text = serde_json::to_string_pretty(&report.assignment)?;
                text.push('\n');
                std::fs::write(dir.join("assignment.json"), text)?;
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
        Command::Cat { rows, cols, w, out } => {
            let grid = Grid::new(rows, cols)?;
            let w: BitString = w.parse()?;
            let report = cli::cmd_cat(&grid, &w)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                let mut text = serde_json::to_string_pretty(&report.schedule)?;
                text.push('\n');
                std::fs::write(dir.join("schedule.json"), text)?;
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
