use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use viscodelay::commands::{execute, exit, resolve_out_dir, Command, RunOverrides};
use viscodelay::pipeline::DEFAULT_FIT_WINDOW;
use viscodelay::sweep::SweepOptions;
use viscodelay_core::dynamics::AuditToggles;

/// Simulate and certify a delayed, viscoelastic wave equation with a
/// nonlinear source.
#[derive(Debug, Parser)]
#[command(name = "viscodelay", version)]
struct Cli {
    /// Output directory (default: $VISCODELAY_OUT_DIR, then ./viscodelay-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// Scenario TOML file, or `preset:<name>`.
    config: String,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Check every hypothesis of a scenario.
    Validate(ConfigArg),
    /// Compute the decay certificate.
    Certify {
        #[command(flatten)]
        config: ConfigArg,
        /// Report failed hypotheses as warnings.
        #[arg(long)]
        exploratory: bool,
    },
    /// Simulate a scenario and write trajectory, energy and audit files.
    Run {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        horizon: Option<f64>,
        /// Record every `cadence` steps.
        #[arg(long)]
        cadence: Option<usize>,
        /// Comma-separated audits to run: gronwall, lower-bound, energy-derivative, all, none.
        #[arg(long, value_delimiter = ',')]
        audits: Option<Vec<String>>,
        /// Fraction of the run used by the decay fit.
        #[arg(long)]
        window: Option<f64>,
        /// Also write energy.svg.
        #[arg(long)]
        plot: bool,
        #[arg(long)]
        exploratory: bool,
    },
    /// Fit an exponential decay rate to an energy CSV.
    Fit {
        csv: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FIT_WINDOW)]
        window: f64,
    },
    /// Sweep one parameter and certify (optionally simulate) each point.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// gain.amplitude, history.amplitude or delay.tau.
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        simulate: bool,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_FIT_WINDOW)]
        window: f64,
    },
    /// Render an energy CSV as a two-panel SVG.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        title: Option<String>,
    },
}

fn parse_audits(names: &[String]) -> Result<AuditToggles, String> {
    let mut t = AuditToggles::none();
    for n in names {
        match n.trim() {
            "gronwall" => t.gronwall = true,
            "lower-bound" => t.lower_bound = true,
            "energy-derivative" => t.energy_derivative = true,
            "all" => t = AuditToggles { gronwall: true, lower_bound: true, energy_derivative: true },
            "none" => t = AuditToggles::none(),
            other => return Err(format!("unknown audit `{other}`")),
        }
    }
    Ok(t)
}

fn command(sub: Sub) -> Result<Command, String> {
    Ok(match sub {
        Sub::Validate(c) => Command::Validate { config: c.config },
        Sub::Certify { config, exploratory } => Command::Certify { config: config.config, exploratory },
        Sub::Run { config, horizon, cadence, audits, window, plot, exploratory } => Command::Run {
            config: config.config,
            overrides: RunOverrides {
                horizon,
                cadence,
                audits: audits.as_deref().map(parse_audits).transpose()?,
                fit_window: window,
                plot,
            },
            exploratory,
        },
        Sub::Fit { csv, window } => Command::Fit { csv, window },
        Sub::Sweep { config, param, values, simulate, horizon, window } => Command::Sweep {
            config: config.config,
            param,
            values,
            options: SweepOptions { simulate, horizon, fit_window: window },
        },
        Sub::Plot { csv, title } => Command::Plot { csv, title },
    })
}

fn main() -> ExitCode {
    // Usage errors exit with 1 so that 2 stays reserved for failed hypotheses.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::ERROR as u8 } else { 0 });
        }
    };
    let cmd = match command(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::ERROR as u8);
        }
    };
    let out = resolve_out_dir(cli.out.as_deref());
    let outcome = execute(&cmd, &out);
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for l in &outcome.lines {
        if outcome.exit_code == exit::ERROR && l.starts_with("error:") {
            eprintln!("{l}");
        } else {
            println!("{l}");
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}
