//! Text grammar for single-mode inputs:
//!
//! ```text
//! vacuum | fock:N | coherent:RE[,IM] | sqvac:R[,PHI] | mix:P0,P1,...
//! ```

use std::fmt;

use crate::states::ModeSpec;

/// Parse failure with the 1-based column of the offending character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        column,
        message: message.into(),
    }
}

/// Splits `text` (starting at `offset`) on commas, keeping each field's column.
fn fields(text: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        if ch == ',' {
            out.push((offset + start, &text[start..i]));
            start = i + 1;
        }
    }
    out.push((offset + start, &text[start..]));
    out
}

fn number(column: usize, field: &str) -> Result<f64, ParseError> {
    let trimmed = field.trim();
    if trimmed.is_empty() {
        return Err(err(column + 1, "expected a number"));
    }
    let lead = field.len() - field.trim_start().len();
    let value: f64 = trimmed
        .parse()
        .map_err(|_| err(column + lead + 1, format!("'{trimmed}' is not a number")))?;
    if !value.is_finite() {
        return Err(err(column + lead + 1, format!("'{trimmed}' is not finite")));
    }
    Ok(value)
}

fn arity(
    kind: &str,
    items: &[(usize, &str)],
    min: usize,
    max: usize,
    end: usize,
) -> Result<(), ParseError> {
    if items.len() < min {
        return Err(err(end + 1, format!("{kind} needs at least {min} value(s)")));
    }
    if items.len() > max {
        let (col, _) = items[max];
        return Err(err(col + 1, format!("{kind} takes at most {max} value(s)")));
    }
    Ok(())
}

/// Parses one mode specification.
pub fn parse_mode_spec(text: &str) -> Result<ModeSpec, ParseError> {
    let lead = text.len() - text.trim_start().len();
    let body = text.trim();
    if body.is_empty() {
        return Err(err(1, "empty mode specification"));
    }
    let (kind, rest, rest_offset) = match body.find(':') {
        Some(i) => (&body[..i], Some(&body[i + 1..]), lead + i + 1),
        None => (body, None, lead + body.len()),
    };
    let kind_lc = kind.to_ascii_lowercase();
    let spec = match (kind_lc.as_str(), rest) {
        ("vacuum", None) => ModeSpec::Vacuum,
        ("vacuum", Some(_)) => return Err(err(rest_offset, "vacuum takes no arguments")),
        ("fock", Some(r)) => {
            let items = fields(r, rest_offset);
            arity("fock", &items, 1, 1, rest_offset)?;
            let (col, f) = items[0];
            let t = f.trim();
            let n: usize = t
                .parse()
                .map_err(|_| err(col + 1, format!("'{t}' is not a non-negative integer")))?;
            ModeSpec::Fock(n)
        }
        ("coherent", Some(r)) => {
            let items = fields(r, rest_offset);
            arity("coherent", &items, 1, 2, rest_offset)?;
            let re = number(items[0].0, items[0].1)?;
            let im = match items.get(1) {
                Some(&(c, f)) => number(c, f)?,
                None => 0.0,
            };
            ModeSpec::Coherent { re, im }
        }
        ("sqvac", Some(r)) => {
            let items = fields(r, rest_offset);
            arity("sqvac", &items, 1, 2, rest_offset)?;
            let strength = number(items[0].0, items[0].1)?;
            if strength < 0.0 {
                return Err(err(items[0].0 + 1, "squeezing strength must be non-negative"));
            }
            let phase = match items.get(1) {
                Some(&(c, f)) => number(c, f)?,
                None => 0.0,
            };
            ModeSpec::SqueezedVacuum { r: strength, phase }
        }
        ("mix", Some(r)) => {
            let items = fields(r, rest_offset);
            let mut probs = Vec::with_capacity(items.len());
            for &(c, f) in &items {
                let p = number(c, f)?;
                if p < 0.0 {
                    return Err(err(c + 1, "probabilities must be non-negative"));
                }
                probs.push(p);
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(err(rest_offset + 1, format!("probabilities sum to {total}, not 1")));
            }
            ModeSpec::NumberMixture(probs)
        }
        ("fock" | "coherent" | "sqvac" | "mix", None) => {
            return Err(err(rest_offset + 1, format!("{kind} needs ':' followed by values")))
        }
        _ => {
            return Err(err(
                lead + 1,
                format!("unknown mode '{kind}'; expected vacuum, fock, coherent, sqvac or mix"),
            ))
        }
    };
    Ok(spec)
}

/// Inverse of [`parse_mode_spec`].
pub fn format_mode_spec(spec: &ModeSpec) -> String {
    match spec {
        ModeSpec::Vacuum => "vacuum".into(),
        ModeSpec::Fock(n) => format!("fock:{n}"),
        ModeSpec::Coherent { re, im } if *im == 0.0 => format!("coherent:{re}"),
        ModeSpec::Coherent { re, im } => format!("coherent:{re},{im}"),
        ModeSpec::SqueezedVacuum { r, phase } if *phase == 0.0 => format!("sqvac:{r}"),
        ModeSpec::SqueezedVacuum { r, phase } => format!("sqvac:{r},{phase}"),
        ModeSpec::NumberMixture(p) => {
            let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            format!("mix:{}", parts.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        assert_eq!(parse_mode_spec("vacuum").unwrap(), ModeSpec::Vacuum);
        assert_eq!(parse_mode_spec(" fock:3 ").unwrap(), ModeSpec::Fock(3));
        assert_eq!(parse_mode_spec("coherent:1").unwrap(), ModeSpec::Coherent { re: 1.0, im: 0.0 });
        assert_eq!(
            parse_mode_spec("coherent:0.5,-0.25").unwrap(),
            ModeSpec::Coherent { re: 0.5, im: -0.25 }
        );
        assert_eq!(parse_mode_spec("sqvac:0.5").unwrap(), ModeSpec::squeezed(0.5));
        assert_eq!(
            parse_mode_spec("sqvac:0.5,1.2").unwrap(),
            ModeSpec::SqueezedVacuum { r: 0.5, phase: 1.2 }
        );
        assert_eq!(parse_mode_spec("mix:0.5,0.5").unwrap(), ModeSpec::NumberMixture(vec![0.5, 0.5]));
    }

    #[test]
    fn round_trips_through_format() {
        for text in ["vacuum", "fock:2", "coherent:1", "coherent:1,0.5", "sqvac:0.3", "sqvac:0.3,1", "mix:0.25,0.75"] {
            assert_eq!(format_mode_spec(&parse_mode_spec(text).unwrap()), text);
        }
    }

    #[test]
    fn errors_point_at_the_column() {
        let e = parse_mode_spec("coherent:1,x").unwrap_err();
        assert_eq!(e.column, 12);
        let e = parse_mode_spec("squeezed:1").unwrap_err();
        assert_eq!(e.column, 1);
        let e = parse_mode_spec("fock:-1").unwrap_err();
        assert_eq!(e.column, 6);
        let e = parse_mode_spec("mix:0.5,0.4").unwrap_err();
        assert!(e.message.contains("sum"));
        let e = parse_mode_spec("coherent:1,2,3").unwrap_err();
        assert_eq!(e.column, 14);
        assert!(parse_mode_spec("fock").is_err());
        assert!(parse_mode_spec("vacuum:1").is_err());
        assert!(parse_mode_spec("sqvac:-0.1").is_err());
        assert!(parse_mode_spec("").is_err());
    }
}
