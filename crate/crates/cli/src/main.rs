use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crowdkin::scenario::{builtin, builtin_names, Experiment, ScenarioConfig};
use crowdkin::{output, solver, CrowdError};

/// Environment variable holding the worker-thread count.
const WORKERS_ENV: &str = "CROWDKIN_WORKERS";

#[derive(Parser)]
#[command(name = "crowdkin", version, about = "Kinetic pedestrian crowd simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List built-in scenarios.
    List,
    /// Print a scenario as TOML, after overrides.
    Show {
        /// Built-in name or path to a TOML file.
        scenario: String,
        /// Override a config value, e.g. `--set model.epsilon=0.7`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run one scenario and write CSV series and snapshots.
    Run {
        scenario: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Snapshot cadence in seconds; overrides `output.cadence_s`.
        #[arg(long)]
        cadence: Option<f64>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run a scenario once per value of one key and tabulate a derived metric.
    Sweep {
        scenario: String,
        /// Dotted config key to vary, e.g. `domain.exits.0.width`.
        #[arg(long)]
        key: String,
        /// Comma-separated values (at least two).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long, value_enum, default_value = "evacuation-time")]
        metric: Metric,
        /// Summary CSV path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    EvacuationTime,
    FinalOrder,
}

fn exit_code(e: &CrowdError) -> u8 {
    match e {
        CrowdError::NumericState { .. } => 3,
        e if e.is_validation() => 2,
        _ => 1,
    }
}

fn load(source: &str, overrides: &[String]) -> Result<ScenarioConfig, CrowdError> {
    let mut cfg = if Path::new(source).is_file() {
        ScenarioConfig::parse(&fs::read_to_string(source)?)?
    } else {
        builtin(source)?
    };
    for o in overrides {
        let (k, v) =
            o.split_once('=').ok_or_else(|| CrowdError::config(o.as_str(), "override must look like KEY=VALUE"))?;
        cfg = cfg.with_override(k.trim(), v)?;
    }
    Ok(cfg)
}

fn cmd_run(source: &str, out: &Path, cadence: Option<f64>, overrides: &[String]) -> Result<(), CrowdError> {
    let mut cfg = load(source, overrides)?;
    if let Some(c) = cadence {
        cfg.output.cadence_s = c;
    }
    let exp = Experiment::from_config(&cfg)?;
    let trace = solver::run(&exp)?;
    fs::create_dir_all(out)?;
    fs::write(out.join("scenario.toml"), cfg.to_toml_string()?)?;
    let files = output::write_trace(out, &exp, &trace)?;
    match trace.evacuation_time {
        Some(t) => println!("evacuation time: {t:.3} s"),
        None => println!("not evacuated by t_end = {} s", cfg.numerics.t_end_s),
    }
    if let Some((t, v)) = trace.series("lane_order").and_then(|s| s.last()) {
        println!("lane order at {t:.2} s: {v:.4}");
    }
    println!("wrote {} files to {}", files.len() + 1, out.display());
    Ok(())
}

fn sweep_row(cfg: &ScenarioConfig, key: &str, value: &str, metric: Metric) -> Result<Option<f64>, CrowdError> {
    let cfg = cfg.with_override(key, value)?;
    let exp = Experiment::from_config(&cfg)?;
    let trace = solver::run_observed(&exp, false, |_, _| Ok(()))?;
    Ok(match metric {
        Metric::EvacuationTime => trace.evacuation_time,
        Metric::FinalOrder => trace.series("lane_order").and_then(|s| s.last()).map(|(_, v)| v),
    })
}

fn cmd_sweep(
    source: &str,
    key: &str,
    values: &[String],
    metric: Metric,
    out: Option<&Path>,
    overrides: &[String],
) -> Result<u8, CrowdError> {
    if values.len() < 2 {
        return Err(CrowdError::config("--values", "a sweep needs at least two values"));
    }
    let cfg = load(source, overrides)?;
    // Reject bad keys and values before spending time on any run.
    for v in values {
        Experiment::from_config(&cfg.with_override(key, v)?)?;
    }
    let name = match metric {
        Metric::EvacuationTime => "evacuation_time_s",
        Metric::FinalOrder => "final_lane_order",
    };
    let mut table = format!("{key},{name},status\n");
    let mut status = 0;
    for v in values {
        match sweep_row(&cfg, key, v, metric) {
            Ok(Some(m)) => table.push_str(&format!("{v},{m},ok\n")),
            Ok(None) => table.push_str(&format!("{v},,not-reached\n")),
            Err(e) => {
                eprintln!("row {key}={v} failed: {e}");
                table.push_str(&format!("{v},,failed\n"));
                if status == 0 {
                    status = exit_code(&e);
                }
            }
        }
    }
    match out {
        Some(p) => fs::write(p, &table)?,
        None => print!("{table}"),
    }
    Ok(status)
}

fn configure_workers() -> Result<(), CrowdError> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CrowdError::config(WORKERS_ENV, format!("`{v}` is not a positive integer")))?;
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_workers().and_then(|()| match cli.command {
        Command::List => {
            for name in builtin_names() {
                let cfg = builtin(name)?;
                println!("{name}\t{}", cfg.scenario.description);
            }
            Ok(0)
        }
        Command::Show { scenario, overrides } => {
            print!("{}", load(&scenario, &overrides)?.to_toml_string()?);
            Ok(0)
        }
        Command::Run { scenario, out, cadence, overrides } => cmd_run(&scenario, &out, cadence, &overrides).map(|()| 0),
        Command::Sweep { scenario, key, values, metric, out, overrides } => {
            cmd_sweep(&scenario, &key, &values, metric, out.as_deref(), &overrides)
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
