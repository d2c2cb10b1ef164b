use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hwnrisk::config::ScenarioConfig;
use hwnrisk::error::{HarnessError, Result};
use hwnrisk::run::{execute, verify, Job};
use hwnrisk::sweep::Axis;

/// Outage and ruin risk for heterogeneous wireless networks under jamming.
#[derive(Parser, Debug)]
#[command(name = "hwnrisk", version)]
struct Cli {
    /// Scenario file (JSON). The reference preset is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo network realizations, overriding the scenario.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Surplus paths, overriding the scenario.
    #[arg(long, global = true)]
    paths: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write one realization of every tier and the jammers.
    SampleGeometry,
    /// Estimate the outage probability.
    Outage,
    /// Estimate the finite-horizon ruin probability.
    Ruin {
        /// Claim intensity; derived from a simulated outage when omitted.
        #[arg(long)]
        lambda: Option<f64>,
        /// Also write one ruined and one surviving reserve path.
        #[arg(long)]
        sample_paths: bool,
    },
    /// Outage, claim intensity and ruin for the scenario.
    Assess {
        /// Use this outage probability instead of simulating it.
        #[arg(long)]
        forced_outage: Option<f64>,
        /// Also find the smallest premium meeting the target ruin probability.
        #[arg(long)]
        calibrate: bool,
    },
    /// Repeat the assessment over one parameter.
    Sweep {
        /// zeta_j, alpha_j, premium_rate or tau.
        #[arg(long)]
        axis: String,
        /// Comma-separated values; the scenario's sweep block is used when omitted.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Option<Vec<f64>>,
    },
    /// Find the smallest premium meeting the target ruin probability.
    Calibrate {
        #[arg(long)]
        forced_outage: Option<f64>,
    },
    /// Check a manifest against its outputs.
    Verify {
        manifest: PathBuf,
        /// Recompute every output and compare.
        #[arg(long)]
        rerun: bool,
    },
    /// Print the reference scenario as JSON.
    Preset,
}

fn scenario(cli: &Cli) -> Result<ScenarioConfig> {
    let mut c = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::preset(),
    };
    if let Some(s) = cli.seed {
        c.simulation.seed = s;
    }
    if let Some(t) = cli.trials {
        c.simulation.trials = t;
    }
    if let Some(p) = cli.paths {
        c.simulation.paths = p;
    }
    c.validate()?;
    Ok(c)
}

fn job(command: &Command, config: &ScenarioConfig) -> Result<Job> {
    Ok(match command {
        Command::SampleGeometry => Job::SampleGeometry,
        Command::Outage => Job::Outage,
        Command::Ruin { lambda, sample_paths } => Job::Ruin {
            lambda: *lambda,
            sample_paths: *sample_paths,
        },
        Command::Assess {
            forced_outage,
            calibrate,
        } => Job::Assess {
            forced_outage: *forced_outage,
            calibrate: *calibrate,
        },
        Command::Sweep { axis, values } => {
            let axis: Axis = axis.parse()?;
            let values = match values {
                Some(v) => v.clone(),
                None => axis.configured_values(config).ok_or_else(|| HarnessError::Config {
                    field: format!("sweep.{axis}"),
                    reason: "no --values given and the scenario lists none".into(),
                })?,
            };
            Job::Sweep { axis, values }
        }
        Command::Calibrate { forced_outage } => Job::Calibrate {
            forced_outage: *forced_outage,
        },
        Command::Verify { .. } | Command::Preset => unreachable!("handled before job construction"),
    })
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Verify { manifest, rerun } => {
            let v = verify(manifest, *rerun)?.into_result()?;
            println!("{} ok{}", manifest.display(), if v.reran { " (rerun)" } else { "" });
            Ok(())
        }
        Command::Preset => {
            let text = serde_json::to_string_pretty(&ScenarioConfig::preset()).expect("preset serializes");
            println!("{text}");
            Ok(())
        }
        command => {
            let config = scenario(cli)?;
            let job = job(command, &config)?;
            let result = execute(&job, &config, &cli.out)?;
            for f in &result.files {
                println!("{}", cli.out.join(&f.name).display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
