//! Command-line front end.
//!
//! Subcommands: `qfi`, `qfim`, `sweep`, `parity`, `analytic`, `verify`.
//! Exit codes: 0 success, 1 check failure, 2 usage error, 3 convergence error.

pub mod config;
pub mod grammar;
mod matching;
mod output;
pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{self, relative_deviation, AnalyticParams, Formula, GongModel, RadicalAudit};
use crate::error::Error;
use crate::fock::GeneratorKind;
use crate::interferometer::InterferometerConfig;
use crate::metrology::{
    default_parity_grid, parity_cfi, parity_cfi_max, qfi_for_config, qfim, Bound, ParityPoint,
    QfiMethod,
};
use crate::verify::{self, VerifySettings, CHECKS};

use config::{parse_config, parse_model, ConfigValues};
use grammar::{format_mode_spec, parse_mode_spec};
pub use matching::{analytic_for_config, parity_reference, qfi_reference, qfim_references};
use output::{fmt_num, CutoffInfo};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Convergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Convergence(_) => EXIT_CONVERGENCE,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Convergence(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Convergence { .. } => CliError::Convergence(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("I/O error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "su11", version, about = "Quantum Fisher information for SU(1,1) interferometers")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// QFI of one phase model, with the matching closed form.
    Qfi(QfiArgs),
    /// Two-parameter (phase sum, phase difference) QFIM and its bounds.
    Qfim(QfimArgs),
    /// CSV table over a parameter grid.
    Sweep(sweep::SweepArgs),
    /// Parity-detection Fisher information over a phase grid.
    Parity(ParityArgs),
    /// Evaluate a closed-form expression.
    Analytic(AnalyticArgs),
    /// Run the verification checks.
    Verify(VerifyArgs),
}

fn mode_arg(s: &str) -> std::result::Result<crate::states::ModeSpec, String> {
    parse_mode_spec(s).map_err(|e| e.to_string())
}

fn model_arg(s: &str) -> std::result::Result<GeneratorKind, String> {
    parse_model(s).ok_or_else(|| format!("unknown model '{s}'; expected u, l, s or d"))
}

/// Interferometer settings shared by the single-configuration commands.
#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// Configuration file (key = value lines or a JSON object).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mode-A input: vacuum | fock:N | coherent:RE[,IM] | sqvac:R[,PHI] | mix:P0,P1,...
    #[arg(long, value_parser = mode_arg)]
    pub a: Option<crate::states::ModeSpec>,
    /// Mode-B input, same grammar as --a.
    #[arg(long, value_parser = mode_arg)]
    pub b: Option<crate::states::ModeSpec>,
    /// OPA gain.
    #[arg(long)]
    pub g: Option<f64>,
    /// Pump phase of the first OPA.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Phase model: u (upper arm), l (lower arm), s (split), d (half difference).
    #[arg(long, value_parser = model_arg)]
    pub model: Option<GeneratorKind>,
    /// Phase-average the input.
    #[arg(long, conflicts_with = "no_average")]
    pub average: bool,
    /// Do not phase-average (overrides a config file).
    #[arg(long)]
    pub no_average: bool,
    /// Gain of the second OPA (default: equal to --g).
    #[arg(long)]
    pub second_g: Option<f64>,
    /// Fixed cutoff on the total photon number (disables escalation).
    #[arg(long)]
    pub max_total: Option<usize>,
    /// Guard levels used inside the squeezer.
    #[arg(long)]
    pub guard: Option<usize>,
    /// Truncation tolerance on the discarded norm.
    #[arg(long)]
    pub tail_tol: Option<f64>,
}

impl ConfigArgs {
    fn flag_values(&self) -> ConfigValues {
        ConfigValues {
            a: self.a.clone(),
            b: self.b.clone(),
            g: self.g,
            theta: self.theta,
            model: self.model,
            average: if self.average {
                Some(true)
            } else if self.no_average {
                Some(false)
            } else {
                None
            },
            second_g: self.second_g,
            max_total: self.max_total,
            guard: self.guard,
            tail_tol: self.tail_tol,
        }
    }

    /// Defaults, then the config file, then flags.
    pub fn load(&self) -> CliResult<InterferometerConfig> {
        let mut values = ConfigValues::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let file = parse_config(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            values = values.merge(file);
        }
        values.merge(self.flag_values()).build().map_err(CliError::Usage)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Variance,
    Sld,
    Fidelity,
    Convexity,
}

impl From<MethodArg> for QfiMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Variance => QfiMethod::Variance,
            MethodArg::Sld => QfiMethod::Sld,
            MethodArg::Fidelity => QfiMethod::FidelityFd,
            MethodArg::Convexity => QfiMethod::Convexity,
        }
    }
}

#[derive(Args, Debug)]
pub struct QfiArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Engine (default: convexity with --average, variance otherwise).
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
}

#[derive(Args, Debug)]
pub struct QfimArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct ParityArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Half-width of the default phase grid around the dark fringe.
    #[arg(long, default_value_t = 0.6)]
    pub span: f64,
    /// Linear grid start (requires --stop and --count).
    #[arg(long, allow_hyphen_values = true, requires_all = ["stop", "count"])]
    pub start: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["start", "count"])]
    pub stop: Option<f64>,
    #[arg(long, requires_all = ["start", "stop"])]
    pub count: Option<usize>,
    /// Also write the scan as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn complex_arg(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.is_empty() || parts.len() > 2 {
        return Err(format!("expected RE[,IM], got '{s}'"));
    }
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    let re = parse(parts[0])?;
    let im = if parts.len() == 2 { parse(parts[1])? } else { 0.0 };
    Ok(Complex64::new(re, im))
}

fn gong_arg(s: &str) -> std::result::Result<GongModel, String> {
    match s {
        "u" => Ok(GongModel::U),
        "l" => Ok(GongModel::L),
        "s" => Ok(GongModel::S),
        _ => Err(format!("unknown model '{s}'; expected u, l or s")),
    }
}

#[derive(Args, Debug)]
pub struct AnalyticArgs {
    /// Formula name (see --list); also bound_mzi_phi_d, bound_phi_s and radical_audit.
    pub formula: Option<String>,
    /// List the formulas and their inputs.
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub g: Option<f64>,
    /// |alpha|^2.
    #[arg(long, alias = "alpha-sq")]
    pub n_alpha: Option<f64>,
    /// |beta|^2, or the coherent photon number for f_gong.
    #[arg(long)]
    pub n_beta: Option<f64>,
    /// Complex amplitude RE[,IM] of mode A.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
    /// Complex amplitude RE[,IM] of mode B.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub beta: Option<Complex64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Mean photon number of the mode-A input.
    #[arg(long)]
    pub n_chi_bar: Option<f64>,
    /// Photon-number variance of the mode-A input.
    #[arg(long)]
    pub v_chi: Option<f64>,
    #[arg(long)]
    pub n_in: Option<f64>,
    /// Model of f_gong: u, l or s.
    #[arg(long, value_parser = gong_arg)]
    pub model: Option<GongModel>,
    #[arg(long)]
    pub f_dd: Option<f64>,
    #[arg(long)]
    pub f_ss: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f_ds: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// List check names without running them.
    #[arg(long)]
    pub list: bool,
    /// Run only this check (repeatable).
    #[arg(long = "check")]
    pub checks: Vec<String>,
    /// Truncation tolerance for every check.
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Override one tolerance, as check.item=value (repeatable).
    #[arg(long = "tol")]
    pub tolerances: Vec<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    match &cli.command {
        Command::Qfi(a) => cmd_qfi(a, cli.json, out),
        Command::Qfim(a) => cmd_qfim(a, cli.json, out),
        Command::Sweep(a) => sweep::cmd_sweep(a, out),
        Command::Parity(a) => cmd_parity(a, cli.json, out),
        Command::Analytic(a) => cmd_analytic(a, cli.json, out),
        Command::Verify(a) => cmd_verify(a, cli.json, out),
    }
}

#[derive(Serialize)]
struct ConfigSummary {
    a: String,
    b: String,
    g: f64,
    theta: f64,
    model: &'static str,
    averaging: bool,
}

impl ConfigSummary {
    fn new(cfg: &InterferometerConfig) -> Self {
        ConfigSummary {
            a: format_mode_spec(&cfg.mode_a),
            b: format_mode_spec(&cfg.mode_b),
            g: cfg.gain,
            theta: cfg.pump_phase,
            model: cfg.model.label(),
            averaging: cfg.averaging,
        }
    }

    fn write_text(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(
            out,
            "input       {} x {}{}",
            self.a,
            self.b,
            if self.averaging { " (phase-averaged)" } else { "" }
        )?;
        writeln!(out, "gain        {}   pump phase {}", self.g, self.theta)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct AnalyticComparison {
    quantity: &'static str,
    numeric: f64,
    analytic_name: &'static str,
    analytic: f64,
    deviation: f64,
}

impl AnalyticComparison {
    fn new(quantity: &'static str, numeric: f64, analytic_name: &'static str, analytic: f64) -> Self {
        AnalyticComparison {
            quantity,
            numeric,
            analytic_name,
            analytic,
            deviation: relative_deviation(numeric, analytic),
        }
    }

    fn write_text(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(
            out,
            "{:<11} numeric {}  {} {}  deviation {:.3e}",
            self.quantity,
            fmt_num(self.numeric),
            self.analytic_name,
            fmt_num(self.analytic),
            self.deviation
        )
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

#[derive(Serialize)]
struct QfiReport {
    config: ConfigSummary,
    method: QfiMethod,
    value: f64,
    residual: f64,
    converged: bool,
    cutoff: CutoffInfo,
    norm_deficit: f64,
    analytic: Option<AnalyticComparison>,
}

fn cmd_qfi(args: &QfiArgs, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = args.config.load()?;
    let method: QfiMethod = args
        .method
        .map(Into::into)
        .unwrap_or(if cfg.averaging { QfiMethod::Convexity } else { QfiMethod::Variance });
    let (result, norm_deficit) = qfi_for_config(&cfg, method)?;
    let report = QfiReport {
        config: ConfigSummary::new(&cfg),
        method,
        value: result.value,
        residual: result.residual,
        converged: result.converged,
        cutoff: CutoffInfo::from(&result.cutoff_used),
        norm_deficit,
        analytic: qfi_reference(&cfg).map(|(name, v)| AnalyticComparison::new("qfi", result.value, name, v)),
    };
    if json {
        emit_json(out, &report)?;
    } else {
        report.config.write_text(out)?;
        writeln!(out, "model       {}", report.config.model)?;
        writeln!(out, "method      {}", serde_json::to_value(method).unwrap().as_str().unwrap_or(""))?;
        writeln!(out, "qfi         {}", fmt_num(report.value))?;
        writeln!(out, "residual    {:.3e}{}", report.residual, if report.converged { "" } else { "  (not converged)" })?;
        report.cutoff.write_text(out, norm_deficit)?;
        match &report.analytic {
            Some(c) => c.write_text(out)?,
            None => writeln!(out, "analytic    no closed form for this configuration")?,
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct QfimReport {
    config: ConfigSummary,
    f_dd: f64,
    f_ds: f64,
    f_sd: f64,
    f_ss: f64,
    bound_phi_s: Bound,
    bound_phi_d: Bound,
    cutoff: CutoffInfo,
    norm_deficit: f64,
    analytic: Vec<AnalyticComparison>,
}

fn fmt_bound(b: &Bound) -> String {
    match b {
        Bound::Finite(v) => fmt_num(*v),
        Bound::Singular => "singular (information matrix not invertible)".into(),
    }
}

fn cmd_qfim(args: &QfimArgs, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = args.config.load()?;
    let (state, cutoff) = cfg.run(|c| cfg.pure_output(c))?;
    let m = qfim(&state)?;
    let analytic = qfim_references(&cfg)
        .into_iter()
        .map(|r| {
            let numeric = match r.quantity {
                "1/bound_phi_s" => m.bound_phi_s.information(),
                "f_ss" => m.f_ss,
                "f_ds" => m.f_ds,
                _ => m.f_dd,
            };
            AnalyticComparison::new(r.quantity, numeric, r.name, r.value)
        })
        .collect();
    let report = QfimReport {
        config: ConfigSummary::new(&cfg),
        f_dd: m.f_dd,
        f_ds: m.f_ds,
        f_sd: m.f_sd,
        f_ss: m.f_ss,
        bound_phi_s: m.bound_phi_s,
        bound_phi_d: m.bound_phi_d,
        cutoff: CutoffInfo::from(&cutoff),
        norm_deficit: state.norm_deficit(),
        analytic,
    };
    if json {
        emit_json(out, &report)?;
    } else {
        report.config.write_text(out)?;
        writeln!(out, "F_dd        {}", fmt_num(report.f_dd))?;
        writeln!(out, "F_ds        {}", fmt_num(report.f_ds))?;
        writeln!(out, "F_sd        {}", fmt_num(report.f_sd))?;
        writeln!(out, "F_ss        {}", fmt_num(report.f_ss))?;
        writeln!(out, "bound_phi_s {}", fmt_bound(&report.bound_phi_s))?;
        writeln!(out, "bound_phi_d {}", fmt_bound(&report.bound_phi_d))?;
        report.cutoff.write_text(out, report.norm_deficit)?;
        for c in &report.analytic {
            c.write_text(out)?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ParityReport {
    config: ConfigSummary,
    points: Vec<ParityPoint>,
    max: Option<ParityPoint>,
    cutoff: CutoffInfo,
    analytic: Option<AnalyticComparison>,
}

fn cmd_parity(args: &ParityArgs, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = args.config.load()?;
    let grid = match (args.start, args.stop, args.count) {
        (Some(a), Some(b), Some(n)) => {
            if n < 2 || !(a < b) {
                return Err(CliError::Usage("the phase grid needs start < stop and count >= 2".into()));
            }
            sweep::linspace(a, b, n)
        }
        _ => {
            if !(args.span > 1e-3) {
                return Err(CliError::Usage("--span must exceed 1e-3".into()));
            }
            default_parity_grid(args.span)
        }
    };
    let (_, cutoff) = cfg.run(|c| cfg.pure_output(c))?;
    let fixed = cfg.clone().with_cutoff(cutoff);
    let points = parity_cfi(&fixed, &grid)?;
    let max = parity_cfi_max(&points);
    let analytic = match (parity_reference(&cfg), max) {
        (Some((name, v)), Some(p)) => Some(AnalyticComparison::new("max cfi", p.cfi.unwrap_or(0.0), name, v)),
        _ => None,
    };
    if let Some(path) = &args.csv {
        let file = fs::File::create(path)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(file);
        w.write_record(["phi_s", "parity", "cfi"]).map_err(|e| CliError::Usage(e.to_string()))?;
        for p in &points {
            w.write_record([
                fmt_num(p.phi),
                fmt_num(p.parity),
                p.cfi.map(fmt_num).unwrap_or_else(|| "indeterminate".into()),
            ])
            .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        w.flush()?;
    }
    let report = ParityReport {
        config: ConfigSummary::new(&cfg),
        points,
        max,
        cutoff: CutoffInfo::from(&cutoff),
        analytic,
    };
    if json {
        emit_json(out, &report)?;
    } else {
        report.config.write_text(out)?;
        writeln!(out, "{} phase points, cutoff {}", report.points.len(), report.cutoff.max_total)?;
        match &report.max {
            Some(p) => writeln!(
                out,
                "max cfi     {} at phi_s = {}  (parity {})",
                fmt_num(p.cfi.unwrap_or(0.0)),
                fmt_num(p.phi),
                fmt_num(p.parity)
            )?,
            None => writeln!(out, "max cfi     indeterminate on the whole grid")?,
        }
        let indeterminate = report.points.iter().filter(|p| p.cfi.is_none()).count();
        if indeterminate > 0 {
            writeln!(out, "{indeterminate} point(s) at a fringe extremum (indeterminate)")?;
        }
        if let Some(c) = &report.analytic {
            c.write_text(out)?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct AnalyticReport {
    formula: String,
    inputs: Vec<(String, f64)>,
    value: f64,
}

fn analytic_params(args: &AnalyticArgs, formula: Formula) -> CliResult<AnalyticParams> {
    let g = args.g.ok_or_else(|| CliError::Usage(format!("{} needs --g", formula.name())))?;
    let mut p = AnalyticParams::new(g);
    if let Some(a) = args.alpha {
        p = p.with_alpha(a);
    }
    if let Some(b) = args.beta {
        p = p.with_beta(b);
    }
    if let Some(n) = args.n_alpha {
        if args.alpha.is_some() && (n - p.n_alpha).abs() > 1e-12 * n.max(1.0) {
            return Err(CliError::Usage("--n-alpha disagrees with |--alpha|^2".into()));
        }
        p.n_alpha = n;
    }
    if let Some(n) = args.n_beta {
        if args.beta.is_some() && (n - p.n_beta).abs() > 1e-12 * n.max(1.0) {
            return Err(CliError::Usage("--n-beta disagrees with |--beta|^2".into()));
        }
        p.n_beta = n;
    }
    p.n_in = args.n_in.unwrap_or(p.n_alpha + p.n_beta);
    if args.n_in.is_some() && (args.n_alpha.is_some() || args.alpha.is_some() || args.n_beta.is_some() || args.beta.is_some()) {
        p.validate().map_err(CliError::from)?;
    } else if args.n_in.is_some() {
        // n_in alone: treat it as the whole input
        p.n_alpha = p.n_in;
    }
    p.r = args.r.unwrap_or(0.0);
    p.n_chi_bar = args.n_chi_bar.unwrap_or(0.0);
    p.v_chi = args.v_chi.unwrap_or(0.0);
    p.model = args.model.unwrap_or(GongModel::U);
    let given = |name: &str| match name {
        "g" => true,
        "n_beta" => args.n_beta.is_some() || args.beta.is_some(),
        "n_alpha" => args.n_alpha.is_some() || args.alpha.is_some(),
        "alpha" => args.alpha.is_some(),
        "beta" => args.beta.is_some(),
        "r" => args.r.is_some(),
        "n_chi_bar" => args.n_chi_bar.is_some(),
        "v_chi" => true,
        "n_in" => args.n_in.is_some() || args.alpha.is_some() || args.beta.is_some() || args.n_alpha.is_some() || args.n_beta.is_some(),
        "model" => true,
        _ => false,
    };
    let missing: Vec<String> = formula
        .inputs()
        .iter()
        .filter(|n| !given(n))
        .map(|n| format!("--{}", n.replace('_', "-")))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Usage(format!("{} needs {}", formula.name(), missing.join(", "))));
    }
    Ok(p)
}

fn cmd_analytic(args: &AnalyticArgs, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    if args.list {
        for f in Formula::ALL {
            writeln!(out, "{:<24} {}", f.name(), f.inputs().join(", "))?;
        }
        writeln!(out, "{:<24} f_dd, f_ss, f_ds", "bound_mzi_phi_d")?;
        writeln!(out, "{:<24} f_dd, f_ss, f_ds", "bound_phi_s")?;
        writeln!(out, "{:<24} g", "radical_audit")?;
        return Ok(EXIT_OK);
    }
    let name = args
        .formula
        .as_deref()
        .ok_or_else(|| CliError::Usage("name a formula or pass --list".into()))?;
    let report = match name {
        "bound_mzi_phi_d" | "bound_phi_s" => {
            let (dd, ss, ds) = match (args.f_dd, args.f_ss, args.f_ds) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => return Err(CliError::Usage(format!("{name} needs --f-dd, --f-ss and --f-ds"))),
            };
            let bound = if name == "bound_mzi_phi_d" {
                analytic::bound_mzi_phi_d(dd, ss, ds)
            } else {
                analytic::bound_phi_s(dd, ss, ds)
            };
            AnalyticReport {
                formula: name.into(),
                inputs: vec![("f_dd".into(), dd), ("f_ss".into(), ss), ("f_ds".into(), ds)],
                value: bound.value(),
            }
        }
        "radical_audit" => {
            let g = args.g.ok_or_else(|| CliError::Usage("radical_audit needs --g".into()))?;
            let audit = RadicalAudit::new(g);
            if json {
                emit_json(out, &audit)?;
            } else {
                writeln!(out, "sinh(4g)                      {}", fmt_num(audit.sinh4g))?;
                writeln!(out, "radical with n = sinh^2 g     {}  deviation {:.3e}", fmt_num(audit.single), audit.single_deviation())?;
                writeln!(out, "radical with n = 2 sinh^2 g   {}  deviation {:.3e}", fmt_num(audit.double), audit.double_deviation())?;
            }
            return Ok(EXIT_OK);
        }
        _ => {
            let formula = Formula::from_name(name)
                .ok_or_else(|| CliError::Usage(format!("unknown formula '{name}' (see --list)")))?;
            let p = analytic_params(args, formula)?;
            let value = formula.evaluate(&p)?;
            let mut inputs = vec![("g".to_string(), p.g)];
            for n in formula.inputs() {
                let v = match *n {
                    "n_beta" => Some(p.n_beta),
                    "n_alpha" => Some(p.n_alpha),
                    "alpha" => Some(p.alpha.norm()),
                    "beta" => Some(p.beta.norm()),
                    "r" => Some(p.r),
                    "n_chi_bar" => Some(p.n_chi_bar),
                    "v_chi" => Some(p.v_chi),
                    "n_in" => Some(p.n_in),
                    _ => None,
                };
                if let Some(v) = v {
                    inputs.push((n.to_string(), v));
                }
            }
            AnalyticReport {
                formula: name.into(),
                inputs,
                value,
            }
        }
    };
    if json {
        emit_json(out, &report)?;
    } else {
        let args: Vec<String> = report.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "{}({}) = {}", report.formula, args.join(", "), fmt_num(report.value))?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    if args.list {
        for c in &CHECKS {
            writeln!(out, "{:>2}  {:<28} {}", c.criterion, c.name, c.summary)?;
        }
        return Ok(EXIT_OK);
    }
    let mut settings = VerifySettings {
        only: args.checks.clone(),
        ..VerifySettings::default()
    };
    if let Some(t) = args.tail_tol {
        settings.tail_tol = t;
    }
    for spec in &args.tolerances {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--tol expects check.item=value, got '{spec}'")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--tol value '{value}' is not a number")))?;
        settings.tolerance_overrides.insert(key.trim().to_string(), value);
    }
    let report = verify::run(&settings)?;
    if json {
        emit_json(out, &report)?;
    } else {
        for check in &report.checks {
            writeln!(out, "{}", check.line())?;
            for item in &check.items {
                let cmp = match item.comparison {
                    verify::Comparison::AtMost => "<=",
                    verify::Comparison::AtLeast => ">=",
                };
                writeln!(
                    out,
                    "    {:<4} {:<48} {:.3e} {cmp} {:.1e}  ({} samples)",
                    if item.passed { "ok" } else { "FAIL" },
                    item.key,
                    item.value,
                    item.tolerance,
                    item.samples
                )?;
            }
            for note in &check.notes {
                writeln!(out, "    # {note}")?;
            }
        }
        let failed = report.checks.iter().filter(|c| !c.passed()).count();
        writeln!(out, "{} of {} checks passed", report.checks.len() - failed, report.checks.len())?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}
