//! `relus-lab`: run spectral, approximation and learning experiments from a
//! JSON configuration and write CSV, JSON and SVG outputs.

mod config;
mod run;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Experiment, ExperimentConfig};
use run::CliError;

#[derive(Parser, Debug)]
#[command(name = "relus-lab", version, about = "Shallow ReLU^s network rate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: `out` from the config, else `relus-lab-out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: the config, else all cores).
    #[arg(long, global = true, env = "RELUS_LAB_JOBS")]
    jobs: Option<usize>,
    /// Write plot.svg.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Funk–Hecke coefficients λ_i with the closed-form comparison column.
    Spectrum {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        maxdeg: Option<usize>,
    },
    /// Filtered spherical approximation sweep.
    ApproxSphere,
    /// Width sweep of trained networks.
    ApproxM,
    /// Mollifier sweep.
    ApproxMollify,
    /// Single regularized fit.
    Train,
    /// Sample-size generalization sweep.
    RateN,
    /// Local complexity Monte Carlo.
    Complexity,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::ApproxSphere => "approx-sphere",
            Command::ApproxM => "approx-m",
            Command::ApproxMollify => "approx-mollify",
            Command::Train => "train",
            Command::RateN => "rate-n",
            Command::Complexity => "complexity",
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&cli.config, &cli.command) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let cfg = ExperimentConfig::from_json(&text)
                .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
            if cfg.experiment.command() != cli.command.name() {
                return Err(CliError::Usage(format!(
                    "config describes `{}` but the subcommand is `{}`",
                    cfg.experiment.command(),
                    cli.command.name()
                )));
            }
            cfg
        }
        (None, Command::Spectrum { d: Some(d), s: Some(s), maxdeg: Some(maxdeg) }) => ExperimentConfig {
            seed: 0,
            out: None,
            jobs: None,
            plot: false,
            experiment: Experiment::Spectrum { d: *d, s: *s, maxdeg: *maxdeg },
        },
        (None, Command::Spectrum { .. }) => {
            return Err(CliError::Usage("spectrum needs --config or all of --d, --s, --maxdeg".into()))
        }
        (None, other) => return Err(CliError::Usage(format!("{} needs --config <path>", other.name()))),
    };
    if let Command::Spectrum { d, s, maxdeg } = &cli.command {
        if let Experiment::Spectrum { d: cd, s: cs, maxdeg: cm } = &mut cfg.experiment {
            *cd = d.unwrap_or(*cd);
            *cs = s.unwrap_or(*cs);
            *cm = maxdeg.unwrap_or(*cm);
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.plot |= cli.plot;
    Ok(cfg)
}

/// Load, run and report; returns the summary lines for stdout.
fn execute(cli: &Cli) -> Result<Vec<String>, CliError> {
    let cfg = load(cli)?;
    let dir = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("relus-lab-out"));
    let jobs = cli.jobs.or(cfg.jobs).unwrap_or(0);
    let lines = if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?
            .install(|| run::run(&cfg, &dir))?
    } else {
        run::run(&cfg, &dir)?
    };
    let mut out = vec![format!("{} {} -> {}", run::TOOL, cfg.experiment.command(), dir.display())];
    out.extend(lines.into_iter().map(|l| format!("  {l}")));
    Ok(out)
}

/// Help and version requests are not errors.
fn parse_exit_code(e: &clap::Error) -> u8 {
    if e.use_stderr() {
        2
    } else {
        0
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(parse_exit_code(&e));
        }
    };
    match execute(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests;
