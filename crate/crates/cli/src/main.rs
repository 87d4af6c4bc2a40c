use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use secrelay_core::beamform::{oracle_grid, Method, PowerBudget};
use secrelay_core::channel::{parse_channel, ChannelRealization, RateUnit};
use secrelay_core::harness::{
    parse_budget_list, run_experiment, run_method, write_csv, ExperimentSpec,
};
use secrelay_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "secrelay",
    version,
    about = "Secrecy-rate beamforming for relay networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one channel instance read from a JSON file.
    Solve {
        channel: PathBuf,
        #[arg(long, default_value = "total")]
        method: Method,
        /// Total relay power (equal split across relays for per-relay methods).
        #[arg(long)]
        pt: Option<f64>,
        /// Per-relay power caps, comma separated.
        #[arg(long)]
        budgets: Option<String>,
        /// Destination/eavesdropper noise power, replacing the file's value.
        #[arg(long)]
        n0: Option<f64>,
        /// Report rates in nats instead of bits.
        #[arg(long)]
        nats: bool,
    },
    /// Run a Monte Carlo sweep described by a JSON experiment file.
    Sweep {
        config: PathBuf,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid-search the per-relay problem (at most 3 relays).
    Oracle {
        channel: PathBuf,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long)]
        pt: Option<f64>,
        #[arg(long)]
        budgets: Option<String>,
        #[arg(long)]
        n0: Option<f64>,
        #[arg(long)]
        nats: bool,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(path.display().to_string(), e.to_string()))
}

fn load_channel(path: &PathBuf, n0: Option<f64>) -> Result<ChannelRealization> {
    let mut ch = parse_channel(&read(path)?)?;
    if let Some(n0) = n0 {
        ch.noise_rx = n0;
        ch.validate()?;
    }
    Ok(ch)
}

fn budget(ch: &ChannelRealization, pt: Option<f64>, budgets: Option<&str>) -> Result<PowerBudget> {
    match (pt, budgets) {
        (_, Some(list)) => {
            let b = parse_budget_list(list)?;
            if let Some(pt) = pt {
                if (b.total() - pt).abs() > 1e-9 * pt.max(1.0) {
                    return Err(Error::invalid(
                        "budgets",
                        format!("caps sum to {} but --pt is {pt}", b.total()),
                    ));
                }
            }
            Ok(b)
        }
        (Some(pt), None) => {
            if !(pt > 0.0 && pt.is_finite()) {
                return Err(Error::invalid("pt", format!("{pt} is not positive")));
            }
            PowerBudget::equal_split(pt, ch.relays())
        }
        (None, None) => Err(Error::invalid("pt", "give --pt or --budgets")),
    }
}

fn unit(nats: bool) -> RateUnit {
    if nats {
        RateUnit::Nats
    } else {
        RateUnit::Bits
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            channel,
            method,
            pt,
            budgets,
            n0,
            nats,
        } => {
            let ch = load_channel(&channel, n0)?;
            let b = budget(&ch, pt, budgets.as_deref())?;
            let (design, t_max, rank_ratio) = run_method(method, &ch, &b, &Default::default())?;
            let unit = unit(nats);
            let w: Vec<[f64; 2]> = design.beamformer.w.iter().map(|c| [c.re, c.im]).collect();
            let mut out = json!({
                "method": method.name(),
                "rate": unit.from_bits(design.rate),
                "unit": unit.label(),
                "w": w,
                "relay_powers": design.beamformer.relay_powers(),
            });
            if let Some(t) = t_max {
                out["t_max"] = json!(t);
            }
            if let Some(r) = rank_ratio {
                out["rank_ratio"] = json!(r);
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Sweep { config, out } => {
            let spec = ExperimentSpec::parse(&read(&config)?)?.with_env_overrides()?;
            let result = run_experiment(&spec)?;
            let with_overall = spec.p_s.is_some();
            match out {
                Some(path) => write_csv(&result, with_overall, fs::File::create(path)?)?,
                None => write_csv(&result, with_overall, std::io::stdout().lock())?,
            }
        }
        Command::Oracle {
            channel,
            resolution,
            pt,
            budgets,
            n0,
            nats,
        } => {
            let ch = load_channel(&channel, n0)?;
            let b = budget(&ch, pt, budgets.as_deref())?;
            let rate = oracle_grid(&ch, &b, resolution)?;
            let unit = unit(nats);
            let out = json!({
                "method": "oracle",
                "resolution": resolution,
                "rate": unit.from_bits(rate),
                "unit": unit.label(),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
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
            ExitCode::from(if e.is_solver_failure() { 2 } else { 1 })
        }
    }
}
