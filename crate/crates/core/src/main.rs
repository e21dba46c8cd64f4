use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use psph::scenario::analysis::analyze;
use psph::scenario::output::{read_crack_csv, read_snapshot_csv};
use psph::scenario::run::{run_with, RunOptions};
use psph::scenario::{Manifest, ScenarioError, ScenarioSpec};

#[derive(Parser)]
#[command(name = "psph", version, about = "Pseudo-spring SPH dynamic fracture simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write snapshots, audit log and crack metrics.
    Simulate {
        /// branching, hole-plate-1|2|3, chalk, kalthoff, taylor or bar
        scenario: String,
        /// TOML file overriding the scenario defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Particle spacing (m)
        #[arg(long)]
        dp: Option<f64>,
        /// Applied stress amplitude (Pa)
        #[arg(long)]
        sigma: Option<f64>,
        /// End time (s)
        #[arg(long)]
        tend: Option<f64>,
        /// Output directory
        #[arg(long, default_value = "run")]
        out: PathBuf,
        /// Bit-reproducible reductions (always honoured; recorded in the manifest)
        #[arg(long)]
        deterministic: bool,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Recompute crack metrics for a finished run directory.
    Analyze {
        run_dir: PathBuf,
        #[arg(long, value_enum)]
        metric: Option<Metric>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Speed,
    Branching,
    Angle,
}

fn resolve(
    scenario: &str,
    config: Option<PathBuf>,
    dp: Option<f64>,
    sigma: Option<f64>,
    tend: Option<f64>,
) -> Result<ScenarioSpec, ScenarioError> {
    let mut spec = match config {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))?;
            ScenarioSpec::from_toml(scenario, &text)?
        }
        None => ScenarioSpec::preset(scenario)?,
    };
    if let Some(dp) = dp {
        spec.dp = dp;
    }
    if let Some(s) = sigma {
        spec.load.sigma = s;
    }
    if let Some(t) = tend {
        spec.t_end = t;
    }
    spec.validate()?;
    Ok(spec)
}

fn analyze_dir(dir: &PathBuf, metric: Option<Metric>) -> Result<(), ScenarioError> {
    let manifest = Manifest::load(dir)?;
    let crack = dir.join("crack.csv");
    let records = read_crack_csv(&crack).map_err(|source| ScenarioError::Io { path: crack, source })?;
    let last = (0..=manifest.spec.snapshots)
        .rev()
        .map(|k| dir.join(format!("snapshot_{k:04}.csv")))
        .find(|p| p.exists());
    let rows = match last {
        Some(p) => Some(read_snapshot_csv(&p).map_err(|source| ScenarioError::Io { path: p, source })?),
        None => None,
    };
    let m = analyze(&records, &manifest.frame, &manifest.sample_times(), rows.as_deref());
    let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:e}"));
    match metric {
        Some(Metric::Speed) => {
            println!("time,tip,speed");
            for [t, x, v] in &m.tip_history {
                println!("{t:e},{x:e},{v:e}");
            }
        }
        Some(Metric::Branching) => {
            println!("initiation = {}", opt(m.initiation));
            println!("branch_onset = {}", opt(m.branch_onset));
            println!("branch_count = {}", m.branch_count);
            println!("boundary_arrival = {}", opt(m.boundary_arrival));
        }
        Some(Metric::Angle) => {
            if m.crack_angles.is_empty() {
                println!("crack_angle = none");
            }
            for a in &m.crack_angles {
                println!("crack_angle = {a:.2}");
            }
            for a in &m.cluster_angles {
                println!("cluster_angle = {a:.2}");
            }
            if let Some(a) = m.surface_normal_angle {
                println!("surface_normal_angle = {a:.2}");
            }
        }
        None => print!("{}", toml::to_string_pretty(&m).map_err(|e| ScenarioError::Config(e.to_string()))?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            scenario,
            config,
            dp,
            sigma,
            tend,
            out,
            deterministic,
            threads,
        } => (|| {
            let spec = resolve(&scenario, config, dp, sigma, tend)?;
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| ScenarioError::Config(e.to_string()))?;
            }
            let summary = run_with(
                &spec,
                &out,
                RunOptions {
                    deterministic,
                    snapshots: true,
                },
            )?;
            println!(
                "{}: {} steps to t = {:e} s in {:.1} s; {} broken bonds; output in {}",
                spec.scenario,
                summary.steps,
                summary.t,
                summary.wall_seconds,
                summary.metrics.broken_bonds,
                summary.dir.display()
            );
            Ok(())
        })(),
        Command::Analyze { run_dir, metric } => analyze_dir(&run_dir, metric),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
