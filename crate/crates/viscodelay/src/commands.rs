//! The subcommands. Each one writes its reports plus exactly one manifest
//! into the output directory and yields a process exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use viscodelay_core::analysis::{decay_fit_series, AuditStatus};
use viscodelay_core::dynamics::{AuditToggles, Termination};
use viscodelay_core::scenarios::{validate, CheckStatus, HypothesisReport, ScenarioConfig};

use crate::config::{config_to_toml, load_config};
use crate::format::{
    read_columns, to_json, write_energy_csv, write_report, write_text, write_trajectory_csv, write_violations_csv,
};
use crate::manifest::RunManifest;
use crate::pipeline::{run_scenario, RunSummary};
use crate::plot::{energy_svg, Series};
use crate::sweep::{run_sweep, write_sweep_csv, SweepOptions, SweepParam};
use crate::{Error, Result, DEFAULT_OUT_DIR, OUT_DIR_ENV};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const HYPOTHESIS: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const BLOW_UP: i32 = 4;
}

/// Checks that only concern the certificate itself; `certify` reports them
/// through its verdict rather than as hypothesis failures.
const CERTIFICATE_CHECKS: [&str; 3] = ["gain-growth", "certificate", "smallness"];

/// Overrides for `run`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOverrides {
    pub horizon: Option<f64>,
    pub cadence: Option<usize>,
    pub audits: Option<AuditToggles>,
    pub fit_window: Option<f64>,
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Validate { config: String },
    Certify { config: String, exploratory: bool },
    Run { config: String, overrides: RunOverrides, exploratory: bool },
    Fit { csv: PathBuf, window: f64 },
    Sweep { config: String, param: String, values: Vec<f64>, options: SweepOptions },
    Plot { csv: PathBuf, title: Option<String> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Certify { .. } => "certify",
            Command::Run { .. } => "run",
            Command::Fit { .. } => "fit",
            Command::Sweep { .. } => "sweep",
            Command::Plot { .. } => "plot",
        }
    }

    fn input(&self) -> String {
        match self {
            Command::Validate { config }
            | Command::Certify { config, .. }
            | Command::Run { config, .. }
            | Command::Sweep { config, .. } => config.clone(),
            Command::Fit { csv, .. } | Command::Plot { csv, .. } => csv.display().to_string(),
        }
    }
}

/// Result of one invocation: the exit code plus lines for the terminal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
    pub summary: Value,
}

impl Outcome {
    fn new() -> Self {
        Outcome { summary: Value::Null, ..Default::default() }
    }

    fn file(&mut self, name: &str) {
        self.files.push(name.to_string());
    }
}

/// Output directory: the `--out` flag, then `$VISCODELAY_OUT_DIR`, then
/// `viscodelay-out`.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_OUT_DIR),
    }
}

/// Runs `cmd`, writing into `out`. Errors become exit code 1; the manifest
/// is written whenever the directory is usable.
pub fn execute(cmd: &Command, out: &Path) -> Outcome {
    let start = Instant::now();
    let mut outcome = Outcome::new();
    let result = fs::create_dir_all(out).map_err(|e| Error::io(out, e)).and_then(|()| match cmd {
        Command::Validate { config } => cmd_validate(config, out, &mut outcome),
        Command::Certify { config, exploratory } => cmd_certify(config, *exploratory, out, &mut outcome),
        Command::Run { config, overrides, exploratory } => {
            cmd_run(config, overrides, *exploratory, out, &mut outcome)
        }
        Command::Fit { csv, window } => cmd_fit(csv, *window, out, &mut outcome),
        Command::Sweep { config, param, values, options } => {
            cmd_sweep(config, param, values, options, out, &mut outcome)
        }
        Command::Plot { csv, title } => cmd_plot(csv, title.as_deref(), out, &mut outcome),
    });
    if let Err(e) = result {
        outcome.exit_code = exit::ERROR;
        outcome.lines.push(format!("error: {e}"));
        outcome.summary = json!({ "error": e.to_string() });
    }
    let mut manifest = RunManifest::new(cmd.name(), Some(&cmd.input()), out);
    manifest.exit_code = outcome.exit_code;
    manifest.files = outcome.files.clone();
    manifest.summary = outcome.summary.clone();
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    if out.is_dir() {
        if let Err(e) = manifest.write(out) {
            outcome.exit_code = exit::ERROR;
            outcome.lines.push(format!("error: {e}"));
        }
    }
    outcome
}

fn status_word(s: &CheckStatus) -> String {
    match s {
        CheckStatus::Pass => "PASS".into(),
        CheckStatus::Fail => "FAIL".into(),
        CheckStatus::Skipped { reason } => format!("SKIP ({reason})"),
    }
}

fn check_lines(report: &HypothesisReport, outcome: &mut Outcome) {
    for c in &report.checks {
        let detail = if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) };
        outcome.lines.push(format!("{:<20} {}{detail}", c.name, status_word(&c.status)));
    }
}

fn write_config_copy(cfg: &ScenarioConfig, out: &Path, outcome: &mut Outcome) -> Result<()> {
    write_text(&out.join("config.toml"), &config_to_toml(cfg)?)?;
    outcome.file("config.toml");
    Ok(())
}

fn report_files(stem: &str, outcome: &mut Outcome) {
    outcome.file(&format!("{stem}.json"));
    outcome.file(&format!("{stem}.txt"));
}

/// Evaluates every hypothesis. Exit 0 when all pass, 2 otherwise.
pub fn cmd_validate(source: &str, out: &Path, outcome: &mut Outcome) -> Result<()> {
    let cfg = load_config(source)?;
    let report = validate(&cfg)?;
    write_config_copy(&cfg, out, outcome)?;
    write_report(out, "hypotheses", &report)?;
    report_files("hypotheses", outcome);
    check_lines(&report, outcome);
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    outcome.summary = json!({ "scenario": cfg.name, "all_passed": failed.is_empty(), "failed": failed });
    outcome.exit_code = if failed.is_empty() { exit::OK } else { exit::HYPOTHESIS };
    Ok(())
}

#[derive(Serialize)]
struct CertificateDocument<'a> {
    scenario: &'a str,
    certified: bool,
    hypotheses_passed: bool,
    report: &'a HypothesisReport,
}

/// Computes the certificate chain. Exit 0 when issued, 3 when infeasible and
/// 2 when a structural hypothesis fails (unless exploratory).
pub fn cmd_certify(source: &str, exploratory: bool, out: &Path, outcome: &mut Outcome) -> Result<()> {
    let cfg = load_config(source)?;
    let exploratory = exploratory || cfg.exploratory;
    let report = validate(&cfg)?;
    write_config_copy(&cfg, out, outcome)?;
    let blocking: Vec<&str> =
        report.failures().map(|c| c.name.as_str()).filter(|n| !CERTIFICATE_CHECKS.contains(n)).collect();
    let certified = report.is_certified();
    let doc = CertificateDocument {
        scenario: &cfg.name,
        certified,
        hypotheses_passed: report.all_passed(),
        report: &report,
    };
    write_report(out, "certificate", &doc)?;
    report_files("certificate", outcome);

    if let Some(c) = &report.certificate {
        let show = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"));
        outcome.lines.push(format!("M = {:.6e}, omega = {:.6e}, tau_bar = {}", c.m, c.omega, c.tau_bar));
        outcome.lines.push(format!(
            "gamma = {}, omega' = {}, T = {}, C*_T = {}",
            show(c.gamma),
            show(c.omega_prime),
            show(c.t_window),
            show(c.c_star_t)
        ));
        outcome.lines.push(format!(
            "rho = {} ({} halvings), mu = {}, C_tilde = {}",
            show(c.rho),
            c.rho_halvings,
            show(c.mu),
            show(report.decay_amplitude)
        ));
    }
    outcome.summary = json!({
        "scenario": cfg.name,
        "certified": certified,
        "blocking_failures": blocking,
        "certificate": to_json(&report.certificate)?,
    });
    if !blocking.is_empty() {
        let msg = format!("hypotheses failed: {}", blocking.join(", "));
        if !exploratory {
            outcome.lines.push(msg);
            outcome.exit_code = exit::HYPOTHESIS;
            return Ok(());
        }
        outcome.warnings.push(msg);
    }
    let chain_ok = report.certificate.as_ref().is_some_and(|c| c.is_certified());
    if chain_ok && !certified {
        let msg = "certificate chain closes but the initial data are not small enough".to_string();
        if !exploratory {
            outcome.lines.push(msg);
            outcome.exit_code = exit::HYPOTHESIS;
            return Ok(());
        }
        outcome.warnings.push(msg);
    }
    outcome.lines.push(if chain_ok { "verdict: certified" } else { "verdict: infeasible" }.into());
    outcome.exit_code = if chain_ok { exit::OK } else { exit::INFEASIBLE };
    Ok(())
}

fn energy_plot(summary: &RunSummary, times: &[f64], energies: &[f64], maxima: &[f64]) -> String {
    let mut series = vec![
        Series { label: "E(t)".into(), t: times.to_vec(), y: energies.to_vec(), dashed: false },
        Series { label: "running max".into(), t: times.to_vec(), y: maxima.to_vec(), dashed: true },
    ];
    if let (true, Some(mu), Some(c)) = (summary.certified, summary.mu, summary.decay_amplitude) {
        let y = times.iter().map(|t| c * (-mu * t).exp()).collect();
        series.push(Series { label: "certified bound".into(), t: times.to_vec(), y, dashed: true });
    }
    energy_svg(&summary.scenario, &series)
}

/// Simulates a scenario. Exit 0 on completion, 4 on blow-up (with partial
/// outputs) and 2 when hypotheses fail outside exploratory mode.
pub fn cmd_run(
    source: &str,
    overrides: &RunOverrides,
    exploratory: bool,
    out: &Path,
    outcome: &mut Outcome,
) -> Result<()> {
    let mut cfg = load_config(source)?;
    if let Some(h) = overrides.horizon {
        cfg.horizon = h;
    }
    if let Some(c) = overrides.cadence {
        cfg.cadence = c;
    }
    if let Some(a) = overrides.audits {
        cfg.audits = a;
    }
    let exploratory = exploratory || cfg.exploratory;
    let report = validate(&cfg)?;
    write_config_copy(&cfg, out, outcome)?;
    write_report(out, "hypotheses", &report)?;
    report_files("hypotheses", outcome);
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if !failed.is_empty() {
        let msg = format!("hypotheses failed: {}", failed.join(", "));
        if !exploratory {
            outcome.lines.push(format!("{msg}; pass --exploratory to simulate anyway"));
            outcome.summary = json!({ "scenario": cfg.name, "failed": failed });
            outcome.exit_code = exit::HYPOTHESIS;
            return Ok(());
        }
        outcome.warnings.push(msg);
    }

    let window = overrides.fit_window.unwrap_or(crate::pipeline::DEFAULT_FIT_WINDOW);
    let run = run_scenario(&cfg, &report, &cfg.simulation_options(), window)?;
    write_trajectory_csv(&out.join("trajectory.csv"), &run.output.trajectory)?;
    outcome.file("trajectory.csv");
    write_energy_csv(&out.join("energy.csv"), &run.output.energy)?;
    outcome.file("energy.csv");
    write_violations_csv(&out.join("violations.csv"), &run.output.energy.audits)?;
    outcome.file("violations.csv");
    let summary = &run.summary;
    let value = write_report(out, "run_summary", summary)?;
    report_files("run_summary", outcome);
    if overrides.plot && !run.output.energy.samples.is_empty() {
        let e = &run.output.energy;
        let maxima: Vec<f64> = e.samples.iter().map(|s| s.running_max).collect();
        write_text(&out.join("energy.svg"), &energy_plot(summary, &e.times(), &e.energies(), &maxima))?;
        outcome.file("energy.svg");
    }

    outcome.lines.push(format!("steps: {} ({} corrected)", summary.steps, summary.corrected_steps));
    for a in &summary.audits {
        let status = match &a.status {
            AuditStatus::Passed => "passed".to_string(),
            AuditStatus::Violated => "violated".to_string(),
            AuditStatus::Skipped { reason } => format!("skipped ({reason})"),
        };
        outcome.lines.push(format!(
            "audit {:<18} {status}: {} checked, {} violations",
            a.kind.name(),
            a.checked,
            a.violations.len()
        ));
    }
    if let Some(f) = &summary.fit {
        outcome.lines.push(format!("fitted decay rate: {:.6e} (r2 = {:.4})", f.rate, f.r2));
    }
    if let (Some(n), Some(mu)) = (summary.decay_bound_violations, summary.mu) {
        outcome.lines.push(format!("certified bound, mu = {mu:.6e}: {n} violations"));
    }
    outcome.summary = value;
    outcome.exit_code = match summary.termination {
        Termination::Completed => {
            outcome.lines.push("termination: completed".into());
            exit::OK
        }
        Termination::BlowUp { t, norm } => {
            outcome.lines.push(format!("termination: blow-up at t = {t} (norm {norm:e})"));
            exit::BLOW_UP
        }
        Termination::NonFinite { t } => {
            outcome.lines.push(format!("termination: non-finite state at t = {t}"));
            exit::BLOW_UP
        }
    };
    Ok(())
}

/// Fits an exponential decay rate to the `t, energy` columns of a CSV file.
pub fn cmd_fit(csv: &Path, window: f64, out: &Path, outcome: &mut Outcome) -> Result<()> {
    let cols = read_columns(csv, &["t", "energy"])?;
    let fit = decay_fit_series(&cols[0], &cols[1], window)?;
    let value = write_report(out, "fit", &fit)?;
    report_files("fit", outcome);
    outcome.lines.push(format!("rate = {:.6e}, amplitude = {:.6e}, r2 = {:.6}, {} points", fit.rate, fit.amplitude, fit.r2, fit.points));
    outcome.summary = value;
    outcome.exit_code = exit::OK;
    Ok(())
}

/// Evaluates the certificate (and optionally a simulation) along a parameter
/// grid.
pub fn cmd_sweep(
    source: &str,
    param: &str,
    values: &[f64],
    options: &SweepOptions,
    out: &Path,
    outcome: &mut Outcome,
) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Usage("a sweep needs at least one value".into()));
    }
    let cfg = load_config(source)?;
    let param: SweepParam = param.parse()?;
    let rows = run_sweep(&cfg, param, values, options);
    write_config_copy(&cfg, out, outcome)?;
    write_sweep_csv(&out.join("sweep.csv"), param, &rows)?;
    outcome.file("sweep.csv");
    write_report(out, "sweep", &json!({ "parameter": param.name(), "rows": to_json(&rows)? }))?;
    report_files("sweep", outcome);
    for r in &rows {
        let rho = r.rho.map_or_else(|| "-".into(), |x| format!("{x:.6e}"));
        let mu = r.mu.map_or_else(|| "-".into(), |x| format!("{x:.6e}"));
        let mut line = format!("{} = {:<12} {:<10} rho = {rho}, mu = {mu}", param.name(), r.value, r.verdict);
        if let Some(e) = &r.error {
            line.push_str(&format!(" ({e})"));
        }
        outcome.lines.push(line);
    }
    let certified = rows.iter().filter(|r| r.verdict == "certified").count();
    outcome.summary = json!({ "parameter": param.name(), "points": rows.len(), "certified": certified });
    outcome.exit_code = exit::OK;
    Ok(())
}

/// Renders `energy.svg` from an energy CSV (columns `t`, `energy` and,
/// when present, `running_max`).
pub fn cmd_plot(csv: &Path, title: Option<&str>, out: &Path, outcome: &mut Outcome) -> Result<()> {
    let cols = read_columns(csv, &["t", "energy"])?;
    let mut series = vec![Series { label: "E(t)".into(), t: cols[0].clone(), y: cols[1].clone(), dashed: false }];
    if let Ok(m) = read_columns(csv, &["running_max"]) {
        series.push(Series { label: "running max".into(), t: cols[0].clone(), y: m[0].clone(), dashed: true });
    }
    let title = title.map_or_else(|| csv.display().to_string(), String::from);
    write_text(&out.join("energy.svg"), &energy_svg(&title, &series))?;
    outcome.file("energy.svg");
    outcome.lines.push(format!("wrote {}", out.join("energy.svg").display()));
    outcome.summary = json!({ "points": cols[0].len() });
    outcome.exit_code = exit::OK;
    Ok(())
}
