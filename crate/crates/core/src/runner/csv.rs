use std::fmt::Write as _;
use std::path::Path;

use super::ScanResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "axis,t,N_ABC,N_A_BC,N_B_AC,N_C_AB,N_AB,N_AC,N_BC";

/// Decimal with 9 significant digits. Fixed notation for decimal exponents
/// in (−5, 9), scientific otherwise.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if exp > -5 && exp < 9 {
        format!("{:.*}", (8 - exp) as usize, x)
    } else {
        sci
    }
}

/// CSV text of `result`, as written by [`emit_csv`].
pub fn csv_string(result: &ScanResult) -> String {
    let mut out = String::with_capacity(96 * (1 + result.axis.len() * result.times.len()));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (a, row) in result.axis.iter().zip(&result.cells) {
        for r in row {
            let fields = [a.value, r.t, r.n_tri, r.n_bipart[0], r.n_bipart[1], r.n_bipart[2], r.n_pair[0], r.n_pair[1], r.n_pair[2]];
            for (k, v) in fields.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", format_sig9(*v));
            }
            out.push('\n');
        }
    }
    out
}

/// Writes one row per grid cell, axis-major and time-minor.
pub fn emit_csv(result: &ScanResult, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(result)).map_err(|e| Error::io(path, e))
}
