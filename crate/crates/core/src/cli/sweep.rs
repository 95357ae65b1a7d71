//! `sweep`: numeric and closed-form columns over a one-parameter grid, as CSV.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use super::matching::analytic_for_config;
use super::output::fmt_num;
use super::{CliError, CliResult, ConfigArgs, EXIT_OK};
use crate::analytic::{n_kappa, relative_deviation, Formula};
use crate::error::Result;
use crate::interferometer::InterferometerConfig;
use crate::metrology::{default_parity_grid, parity_cfi, parity_cfi_max, qfi_for_config, qfim, QfiMethod};
use crate::states::ModeSpec;

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SweepParam {
    /// OPA gain.
    G,
    /// Pump phase.
    Theta,
    /// Gain of the second OPA.
    SecondG,
    /// Modulus of the mode-A coherent amplitude (its phase is kept).
    Alpha,
    /// Modulus of the mode-B coherent amplitude (its phase is kept).
    Beta,
    /// Strength of the squeezed-vacuum input (mode B first, then mode A).
    R,
}

impl SweepParam {
    fn label(self) -> &'static str {
        match self {
            SweepParam::G => "g",
            SweepParam::Theta => "theta",
            SweepParam::SecondG => "second_g",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
            SweepParam::R => "r",
        }
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Parameter to sweep (not used with --total-resource).
    #[arg(long, value_enum, required_unless_present = "total_resource")]
    pub param: Option<SweepParam>,
    /// Split a fixed photon budget N between the OPA and two balanced coherent
    /// inputs; the swept value is the OPA fraction x in [0, 1].
    #[arg(long, conflicts_with = "param")]
    pub total_resource: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub start: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: f64,
    #[arg(long, default_value_t = 11)]
    pub count: usize,
    /// Comma-separated columns: qfi, info_phi_s, parity_max and formula names
    /// (see `analytic --list`).
    #[arg(long, value_delimiter = ',', default_value = "qfi")]
    pub columns: Vec<String>,
    /// Half-width of the phase grid for parity_max.
    #[arg(long, default_value_t = 0.6)]
    pub parity_span: f64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Numeric {
    Qfi,
    InfoPhiS,
    ParityMax,
}

impl Numeric {
    fn parse(name: &str) -> Option<Numeric> {
        match name {
            "qfi" => Some(Numeric::Qfi),
            "info_phi_s" => Some(Numeric::InfoPhiS),
            "parity_max" => Some(Numeric::ParityMax),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Numeric::Qfi => "qfi",
            Numeric::InfoPhiS => "info_phi_s",
            Numeric::ParityMax => "parity_max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Numeric(Numeric),
    Analytic(Formula),
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn with_modulus(spec: &ModeSpec, modulus: f64, which: &str) -> CliResult<ModeSpec> {
    let phase = match spec {
        ModeSpec::Vacuum => 0.0,
        ModeSpec::Coherent { re, im } => im.atan2(*re),
        _ => return Err(CliError::Usage(format!("sweeping {which} needs a coherent or vacuum input in that mode"))),
    };
    Ok(ModeSpec::coherent(Complex64::from_polar(modulus, phase)))
}

fn apply_param(base: &InterferometerConfig, param: SweepParam, v: f64) -> CliResult<InterferometerConfig> {
    let mut cfg = base.clone();
    match param {
        SweepParam::G => cfg.gain = v,
        SweepParam::Theta => cfg.pump_phase = v,
        SweepParam::SecondG => cfg.second_gain = Some(v),
        SweepParam::Alpha => cfg.mode_a = with_modulus(&cfg.mode_a, v, "alpha")?,
        SweepParam::Beta => cfg.mode_b = with_modulus(&cfg.mode_b, v, "beta")?,
        SweepParam::R => {
            match (&mut cfg.mode_b, &mut cfg.mode_a) {
                (ModeSpec::SqueezedVacuum { r, .. }, _) | (_, ModeSpec::SqueezedVacuum { r, .. }) => *r = v,
                _ => return Err(CliError::Usage("sweeping r needs a sqvac input".into())),
            }
        }
    }
    if !(cfg.gain >= 0.0) || cfg.second_gain.is_some_and(|g| !(g >= 0.0)) || v.is_nan() {
        return Err(CliError::Usage(format!("{} = {v} is out of range", param.label())));
    }
    if matches!(param, SweepParam::Alpha | SweepParam::Beta | SweepParam::R) && v < 0.0 {
        return Err(CliError::Usage(format!("{} must be non-negative", param.label())));
    }
    Ok(cfg)
}

/// Configuration for OPA fraction `x` of a total photon budget `total`.
fn apply_total_resource(base: &InterferometerConfig, total: f64, x: f64) -> CliResult<InterferometerConfig> {
    let nk = x * total;
    let modulus = ((1.0 - x) * total / 2.0).max(0.0).sqrt();
    let mut cfg = base.clone();
    cfg.gain = (nk / 2.0).sqrt().asinh();
    cfg.mode_a = with_modulus(&base.mode_a, modulus, "alpha")?;
    cfg.mode_b = with_modulus(&base.mode_b, modulus, "beta")?;
    Ok(cfg)
}

struct Row {
    keys: Vec<f64>,
    numeric: Vec<(Numeric, f64)>,
    analytic: Vec<(Formula, Option<f64>)>,
    cutoff: usize,
    norm_deficit: f64,
}

fn evaluate_row(cfg: &InterferometerConfig, keys: Vec<f64>, columns: &[Column], parity_grid: &[f64]) -> Result<Row> {
    let mut row = Row {
        keys,
        numeric: Vec::new(),
        analytic: Vec::new(),
        cutoff: 0,
        norm_deficit: 0.0,
    };
    for col in columns {
        match *col {
            Column::Numeric(Numeric::Qfi) => {
                let method = if cfg.averaging { QfiMethod::Convexity } else { QfiMethod::Variance };
                let (r, deficit) = qfi_for_config(cfg, method)?;
                row.cutoff = row.cutoff.max(r.cutoff_used.max_total());
                row.norm_deficit = row.norm_deficit.max(deficit);
                row.numeric.push((Numeric::Qfi, r.value));
            }
            Column::Numeric(Numeric::InfoPhiS) => {
                let (st, c) = cfg.run(|c| cfg.pure_output(c))?;
                row.cutoff = row.cutoff.max(c.max_total());
                row.norm_deficit = row.norm_deficit.max(st.norm_deficit());
                row.numeric.push((Numeric::InfoPhiS, qfim(&st)?.bound_phi_s.information()));
            }
            Column::Numeric(Numeric::ParityMax) => {
                let (st, c) = cfg.run(|c| cfg.pure_output(c))?;
                row.cutoff = row.cutoff.max(c.max_total());
                row.norm_deficit = row.norm_deficit.max(st.norm_deficit());
                let points = parity_cfi(&cfg.clone().with_cutoff(c), parity_grid)?;
                let best = parity_cfi_max(&points).and_then(|p| p.cfi).unwrap_or(f64::NAN);
                row.numeric.push((Numeric::ParityMax, best));
            }
            Column::Analytic(f) => row.analytic.push((f, analytic_for_config(cfg, f))),
        }
    }
    Ok(row)
}

fn parse_columns(names: &[String]) -> CliResult<Vec<Column>> {
    let mut cols = Vec::new();
    for raw in names {
        let name = raw.trim();
        let col = match (Numeric::parse(name), Formula::from_name(name)) {
            (Some(n), _) => Column::Numeric(n),
            (None, Some(f)) => Column::Analytic(f),
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown column '{name}'; expected qfi, info_phi_s, parity_max or a formula name"
                )))
            }
        };
        if !cols.contains(&col) {
            cols.push(col);
        }
    }
    if cols.is_empty() {
        return Err(CliError::Usage("no columns requested".into()));
    }
    Ok(cols)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Usage(format!("CSV output failed: {e}"))
}

pub(super) fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult<i32> {
    let mut base_args = args.config.clone();
    if base_args.g.is_none() && (args.total_resource.is_some() || args.param == Some(SweepParam::G)) {
        // the gain is set per row
        base_args.g = Some(0.0);
    }
    let base = base_args.load()?;
    if args.count < 2 || !(args.start < args.stop) {
        return Err(CliError::Usage("the sweep needs start < stop and count >= 2".into()));
    }
    let columns = parse_columns(&args.columns)?;
    if columns.contains(&Column::Numeric(Numeric::ParityMax)) && !(args.parity_span > 1e-3) {
        return Err(CliError::Usage("--parity-span must exceed 1e-3".into()));
    }
    let values = linspace(args.start, args.stop, args.count);
    let mut key_names: Vec<&str> = Vec::new();
    let mut configs = Vec::with_capacity(values.len());
    match (args.total_resource, args.param) {
        (Some(total), _) => {
            if !(total > 0.0 && total.is_finite()) {
                return Err(CliError::Usage("--total-resource must be positive".into()));
            }
            if args.start < 0.0 || args.stop > 1.0 {
                return Err(CliError::Usage("the OPA fraction must lie in [0, 1]".into()));
            }
            key_names.extend(["fraction", "g", "n_kappa", "n_in"]);
            for &x in &values {
                let cfg = apply_total_resource(&base, total, x)?;
                let n_in = cfg.mode_a.mean_photons() + cfg.mode_b.mean_photons();
                configs.push((cfg.clone(), vec![x, cfg.gain, n_kappa(cfg.gain), n_in]));
            }
        }
        (None, Some(param)) => {
            key_names.push(param.label());
            for &v in &values {
                configs.push((apply_param(&base, param, v)?, vec![v]));
            }
        }
        (None, None) => return Err(CliError::Usage("pass --param or --total-resource".into())),
    }

    let parity_grid = default_parity_grid(args.parity_span);
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let rows: Vec<Result<Row>> = pool.install(|| {
        configs
            .into_par_iter()
            .map(|(cfg, keys)| evaluate_row(&cfg, keys, &columns, &parity_grid))
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<Row>>>()?;

    let numerics: Vec<Numeric> = columns
        .iter()
        .filter_map(|c| match c {
            Column::Numeric(n) => Some(*n),
            _ => None,
        })
        .collect();
    let formulas: Vec<Formula> = columns
        .iter()
        .filter_map(|c| match c {
            Column::Analytic(f) => Some(*f),
            _ => None,
        })
        .collect();

    let mut header: Vec<String> = key_names.iter().map(|s| s.to_string()).collect();
    header.extend(numerics.iter().map(|n| n.name().to_string()));
    header.extend(formulas.iter().map(|f| f.name().to_string()));
    for n in &numerics {
        for f in &formulas {
            header.push(format!("dev_{}_vs_{}", n.name(), f.name()));
        }
    }
    if !numerics.is_empty() {
        header.push("cutoff".into());
        header.push("norm_deficit".into());
    }

    let mut sink: Box<dyn Write + '_> = match &args.output {
        Some(path) => Box::new(
            fs::File::create(path).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        ),
        None => Box::new(&mut *out),
    };
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut sink);
        w.write_record(&header).map_err(csv_err)?;
        for row in &rows {
            let mut rec: Vec<String> = row.keys.iter().map(|v| fmt_num(*v)).collect();
            rec.extend(row.numeric.iter().map(|(_, v)| fmt_num(*v)));
            rec.extend(row.analytic.iter().map(|(_, v)| v.map(fmt_num).unwrap_or_default()));
            for (_, num) in &row.numeric {
                for (_, ana) in &row.analytic {
                    rec.push(ana.map(|a| fmt_num(relative_deviation(*num, a))).unwrap_or_default());
                }
            }
            if !row.numeric.is_empty() {
                rec.push(row.cutoff.to_string());
                rec.push(fmt_num(row.norm_deficit));
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
    }
    Ok(EXIT_OK)
}
