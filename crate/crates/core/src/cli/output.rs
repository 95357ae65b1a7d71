//! Shared formatting for command output.

use std::io::Write;

use serde::Serialize;

use crate::fock::FockCutoff;

/// Twelve significant digits in scientific notation; non-finite values as `inf`/`nan`.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Cutoff actually used by a computation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CutoffInfo {
    pub max_total: usize,
    pub guard: usize,
    pub tail_tol: f64,
}

impl From<&FockCutoff> for CutoffInfo {
    fn from(c: &FockCutoff) -> Self {
        CutoffInfo {
            max_total: c.max_total(),
            guard: c.guard(),
            tail_tol: c.tail_tol(),
        }
    }
}

impl CutoffInfo {
    pub fn write_text(&self, out: &mut dyn Write, norm_deficit: f64) -> std::io::Result<()> {
        writeln!(
            out,
            "cutoff      max_total {}  guard {}  tail_tol {:.1e}  norm deficit {:.3e}",
            self.max_total, self.guard, self.tail_tol, norm_deficit
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(13.154116), "1.31541160000e1");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }
}
