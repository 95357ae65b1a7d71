//! Interferometer configuration from files and flags.
//!
//! Files are either flat `key = value` text (with `#` comments) or a JSON
//! object with the same keys. Recognised keys:
//!
//! | key        | value                              | default      |
//! |------------|------------------------------------|--------------|
//! | `a`, `b`   | mode grammar, e.g. `coherent:1`    | `vacuum`     |
//! | `g`        | OPA gain                           | required     |
//! | `theta`    | pump phase                         | `0`          |
//! | `model`    | `u`, `l`, `s` or `d`               | `u`          |
//! | `average`  | `true` / `false`                   | `false`      |
//! | `second_g` | gain of the second OPA             | equal to `g` |
//! | `max_total`| fixed cutoff (disables escalation) | escalate     |
//! | `guard`    | guard levels                       | `12`         |
//! | `tail_tol` | truncation tolerance               | `1e-10`      |
//!
//! Command-line flags override file values, which override the defaults.

use std::fmt;

use serde::Deserialize;

use super::grammar::parse_mode_spec;
use crate::fock::{FockCutoff, GeneratorKind};
use crate::interferometer::InterferometerConfig;
use crate::states::ModeSpec;

/// Configuration file error with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Partially specified configuration; `None` means "not given at this level".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigValues {
    pub a: Option<ModeSpec>,
    pub b: Option<ModeSpec>,
    pub g: Option<f64>,
    pub theta: Option<f64>,
    pub model: Option<GeneratorKind>,
    pub average: Option<bool>,
    pub second_g: Option<f64>,
    pub max_total: Option<usize>,
    pub guard: Option<usize>,
    pub tail_tol: Option<f64>,
}

pub fn parse_model(text: &str) -> Option<GeneratorKind> {
    match text.trim().to_ascii_lowercase().as_str() {
        "u" | "upper" => Some(GeneratorKind::Upper),
        "l" | "lower" => Some(GeneratorKind::Lower),
        "s" | "sum" | "split" => Some(GeneratorKind::Sum),
        "d" | "diff" | "difference" => Some(GeneratorKind::Difference),
        _ => None,
    }
}

impl ConfigValues {
    /// Values from `over` replace those in `self`.
    pub fn merge(self, over: ConfigValues) -> ConfigValues {
        ConfigValues {
            a: over.a.or(self.a),
            b: over.b.or(self.b),
            g: over.g.or(self.g),
            theta: over.theta.or(self.theta),
            model: over.model.or(self.model),
            average: over.average.or(self.average),
            second_g: over.second_g.or(self.second_g),
            max_total: over.max_total.or(self.max_total),
            guard: over.guard.or(self.guard),
            tail_tol: over.tail_tol.or(self.tail_tol),
        }
    }

    /// Fills the defaults and validates.
    pub fn build(&self) -> Result<InterferometerConfig, String> {
        let g = self.g.ok_or("the OPA gain g is required (flag --g or key g)")?;
        if !(g >= 0.0 && g.is_finite()) {
            return Err(format!("gain must be finite and non-negative, got {g}"));
        }
        let a = self.a.clone().unwrap_or(ModeSpec::Vacuum);
        let b = self.b.clone().unwrap_or(ModeSpec::Vacuum);
        let mut cfg = InterferometerConfig::new(a, b, g);
        cfg.pump_phase = self.theta.unwrap_or(0.0);
        cfg.model = self.model.unwrap_or(GeneratorKind::Upper);
        cfg.averaging = self.average.unwrap_or(false);
        cfg.second_gain = self.second_g;
        if let Some(guard) = self.guard {
            cfg.guard = guard;
        }
        if let Some(tol) = self.tail_tol {
            cfg.tail_tol = tol;
        }
        if let Some(k) = self.max_total {
            let cutoff = FockCutoff::new(k, cfg.guard, cfg.tail_tol).map_err(|e| e.to_string())?;
            cfg.cutoff = Some(cutoff);
        } else {
            FockCutoff::new(1, cfg.guard, cfg.tail_tol).map_err(|e| e.to_string())?;
        }
        cfg.mode_a.validate().map_err(|e| e.to_string())?;
        cfg.mode_b.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

/// Parses a configuration file, choosing JSON when the first non-blank character is `{`.
pub fn parse_config(text: &str) -> Result<ConfigValues, ConfigError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_key_values(text)
    }
}

fn set_value(values: &mut ConfigValues, key: &str, raw: &str) -> Result<(), (usize, String)> {
    let num = |s: &str| -> Result<f64, (usize, String)> {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or((0, format!("'{s}' is not a finite number")))
    };
    let int = |s: &str| -> Result<usize, (usize, String)> {
        s.parse::<usize>().map_err(|_| (0, format!("'{s}' is not a non-negative integer")))
    };
    match key {
        "a" | "b" => {
            let spec = parse_mode_spec(raw).map_err(|e| (e.column - 1, e.message))?;
            if key == "a" {
                values.a = Some(spec);
            } else {
                values.b = Some(spec);
            }
        }
        "g" => values.g = Some(num(raw)?),
        "theta" => values.theta = Some(num(raw)?),
        "second_g" => values.second_g = Some(num(raw)?),
        "tail_tol" => values.tail_tol = Some(num(raw)?),
        "max_total" => values.max_total = Some(int(raw)?),
        "guard" => values.guard = Some(int(raw)?),
        "model" => {
            values.model = Some(parse_model(raw).ok_or((0, format!("unknown model '{raw}'; expected u, l, s or d")))?)
        }
        "average" => {
            values.average = Some(match raw.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => true,
                "false" | "no" | "off" | "0" => false,
                _ => return Err((0, format!("'{raw}' is not a boolean"))),
            })
        }
        _ => return Err((usize::MAX, format!("unknown key '{key}'"))),
    }
    Ok(())
}

fn parse_key_values(text: &str) -> Result<ConfigValues, ConfigError> {
    let mut values = ConfigValues::default();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let key_col = line.len() - line.trim_start().len() + 1;
        let eq = line.find('=').ok_or(ConfigError {
            line: line_no,
            column: key_col,
            message: "expected 'key = value'".into(),
        })?;
        let key = line[..eq].trim();
        if key.is_empty() {
            return Err(ConfigError {
                line: line_no,
                column: key_col,
                message: "missing key before '='".into(),
            });
        }
        let after = &line[eq + 1..];
        let value_col = eq + 2 + (after.len() - after.trim_start().len());
        let value = after.trim();
        if value.is_empty() {
            return Err(ConfigError {
                line: line_no,
                column: value_col,
                message: format!("missing value for '{key}'"),
            });
        }
        set_value(&mut values, key, value).map_err(|(offset, message)| ConfigError {
            line: line_no,
            column: if offset == usize::MAX { key_col } else { value_col + offset },
            message,
        })?;
    }
    Ok(values)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonConfig {
    a: Option<String>,
    b: Option<String>,
    g: Option<f64>,
    theta: Option<f64>,
    model: Option<String>,
    average: Option<bool>,
    second_g: Option<f64>,
    max_total: Option<usize>,
    guard: Option<usize>,
    tail_tol: Option<f64>,
}

/// Line and column of the first occurrence of `"key"` in `text`, for error reporting.
fn locate_key(text: &str, key: &str) -> (usize, usize) {
    let needle = format!("\"{key}\"");
    for (i, line) in text.lines().enumerate() {
        if let Some(p) = line.find(&needle) {
            return (i + 1, p + 1);
        }
    }
    (1, 1)
}

fn parse_json(text: &str) -> Result<ConfigValues, ConfigError> {
    let raw: JsonConfig = serde_json::from_str(text).map_err(|e| ConfigError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut values = ConfigValues {
        g: raw.g,
        theta: raw.theta,
        average: raw.average,
        second_g: raw.second_g,
        max_total: raw.max_total,
        guard: raw.guard,
        tail_tol: raw.tail_tol,
        ..ConfigValues::default()
    };
    for (key, field) in [("a", &raw.a), ("b", &raw.b)] {
        if let Some(s) = field {
            let spec = parse_mode_spec(s).map_err(|e| {
                let (line, col) = locate_key(text, key);
                ConfigError {
                    line,
                    column: col,
                    message: format!("'{key}': {e}"),
                }
            })?;
            if key == "a" {
                values.a = Some(spec);
            } else {
                values.b = Some(spec);
            }
        }
    }
    if let Some(m) = &raw.model {
        values.model = Some(parse_model(m).ok_or_else(|| {
            let (line, column) = locate_key(text, "model");
            ConfigError {
                line,
                column,
                message: format!("unknown model '{m}'; expected u, l, s or d"),
            }
        })?);
    }
    Ok(values)
}
