use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vsys::commands::{self, Format, ParamsArgs};
use vsys::{CliError, CliResult, Overrides, Preset, RunConfig};
use vsys_core::Fault;

/// Incoherently pumped V-system: secular vs non-secular coherence dynamics.
#[derive(Debug, Parser)]
#[command(name = "vsys", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one configuration and write trajectory CSV (and SVG).
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Steady-state and peak summaries over a list of Δ/γ values.
    Scan {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated Δ/γ values.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the invariant suite; exits 3 on any failed check.
    Validate {
        /// Deliberately corrupt a computation to prove the suite can fail.
        #[arg(long, value_name = "FAULT")]
        check_fault: Option<String>,
        /// Print the JSON report instead of the text one.
        #[arg(long)]
        json: bool,
        /// Also write validation.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derived SI rates for the calcium laboratory inputs.
    Params {
        #[arg(long)]
        nbar: Option<f64>,
        /// Magnetic field in tesla.
        #[arg(long)]
        b_field: Option<f64>,
        /// Interaction time in seconds.
        #[arg(long)]
        t_transit: Option<f64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML file with RunConfig keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// ns-vec, s-vec, ns-direct, s-direct, iso-ns or iso-s.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    nbar: Option<f64>,
    /// Splitting Δ/γ.
    #[arg(long = "delta")]
    delta_over_gamma: Option<f64>,
    /// End time in units of τ = 1/γ.
    #[arg(long = "t-end")]
    t_end_over_tau: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated detector names (full, A, A', B, B').
    #[arg(long, value_delimiter = ',')]
    detectors: Option<Vec<String>>,
    /// Decay rate in rad/s, used to report τ in seconds.
    #[arg(long)]
    gamma_si: Option<f64>,
    /// Dipole alignment for the isotropic variants.
    #[arg(long)]
    alignment: Option<f64>,
}

impl RunArgs {
    fn resolve(self, deltas: Option<Vec<f64>>) -> CliResult<RunConfig> {
        let flags = Overrides {
            variant: self.variant,
            gamma_si: self.gamma_si,
            nbar: self.nbar,
            delta_over_gamma: self.delta_over_gamma,
            t_end_over_tau: self.t_end_over_tau,
            samples: self.samples,
            detectors: self.detectors,
            preset: self.preset,
            alignment: self.alignment,
            deltas,
        };
        let cfg = RunConfig::resolve(self.config.as_deref(), flags)?;
        for note in &cfg.preset_overrides {
            eprintln!(
                "preset {} overrides {note}",
                cfg.seed_preset.map_or("?", Preset::name)
            );
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { run, out, format } => {
            let cfg = run.resolve(None)?;
            for path in commands::run_simulate(&cfg, &out, format)? {
                println!("wrote {}", path.display());
            }
            if let Some(g) = cfg.gamma_si {
                println!(
                    "τ = {:.4e} s; t_end = {:.4e} s",
                    1.0 / g,
                    cfg.t_end_over_tau / g
                );
            }
        }
        Command::Scan { run, deltas, out } => {
            let cfg = run.resolve(deltas)?;
            println!("wrote {}", commands::run_scan(&cfg, &out)?.display());
        }
        Command::Validate {
            check_fault,
            json,
            out,
        } => {
            let fault = match check_fault.as_deref() {
                None => None,
                Some(name) => Some(Fault::from_name(name).ok_or_else(|| {
                    CliError::Config(format!("unknown fault {name:?}; expected charpoly"))
                })?),
            };
            commands::run_validate(fault, json, out.as_deref())?;
        }
        Command::Params {
            nbar,
            b_field,
            t_transit,
            json,
        } => commands::print_params(
            ParamsArgs {
                nbar,
                b_field,
                t_transit,
            },
            json,
        )?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vsys: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
