use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use occlusion_sim::harness::{
    parse_speeds, run_scenario, save, sweep, write_csv, write_trace, SweepSpec,
};
use occlusion_sim::scenario::{calibrate_entry, load_config, ScenarioConfig};
use occlusion_sim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "occlusion-sim",
    version,
    about = "Occluded-pedestrian V2V braking simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        v2v: Option<Toggle>,
        /// Subject vehicle speed, mph.
        #[arg(long)]
        speed: Option<f64>,
        /// Result CSV path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-step trace CSV path.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run every speed with and without V2V.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// `start:end:step` (inclusive) or a comma-separated list, mph.
        #[arg(long, default_value = "10:70:5")]
        speeds: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the calibrated pedestrian walk-start time.
    Calibrate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        speed: Option<f64>,
    },
}

fn load(path: Option<&PathBuf>) -> Result<ScenarioConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            load_config(&text)
        }
        None => Ok(ScenarioConfig::default()),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => save(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            v2v,
            speed,
            out,
            trace,
        } => {
            let mut cfg = load(config.as_ref())?;
            if let Some(s) = speed {
                cfg.av_speed_mph = s;
            }
            if let Some(t) = v2v {
                cfg.v2v = matches!(t, Toggle::On);
            }
            let (result, steps) = run_scenario(&cfg)?;
            emit(out.as_ref(), &write_csv(&[result]))?;
            if let Some(p) = trace {
                save(&p, &write_trace(&steps))?;
            }
        }
        Command::Sweep {
            config,
            speeds,
            out,
        } => {
            let spec = SweepSpec::new(load(config.as_ref())?).with_speeds(parse_speeds(&speeds)?);
            let results = sweep(&spec)?;
            emit(out.as_ref(), &write_csv(&results))?;
        }
        Command::Calibrate { config, speed } => {
            let mut cfg = load(config.as_ref())?;
            if let Some(s) = speed {
                cfg.av_speed_mph = s;
            }
            println!("{:.4}", calibrate_entry(&cfg)?);
        }
    }
    Ok(())
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
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
