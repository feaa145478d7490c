//! Stable text output: significant-digit float formatting and CSV rows.
//!
//! Golden-file regression tests compare command output byte for byte, so
//! every number printed by the command layer goes through [`format_sig`],
//! which renders a fixed number of significant digits the way C's `%g`
//! does (positional where compact, exponential otherwise, trailing zeros
//! trimmed). Rust's float-to-decimal conversion is exact and platform
//! independent, so the result is reproducible everywhere.

use std::io::{self, Write};

/// Number of significant digits used for all CSV and report output.
pub const SIG_DIGITS: usize = 12;

/// Formats `x` with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Round to the requested precision via exponential notation, then lay
    // the digits out positionally when that is the shorter convention.
    let exp_form = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = exp_form
        .split_once('e')
        .expect("exponential format always contains 'e'");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digits_str: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();

    let body = if exp >= digits as i32 || exp < -4 {
        let trimmed = digits_str.trim_end_matches('0');
        let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
        if trimmed.len() == 1 {
            format!("{trimmed}e{exp}")
        } else {
            format!("{}.{}e{exp}", &trimmed[..1], &trimmed[1..])
        }
    } else if exp >= 0 {
        let split = exp as usize + 1;
        let int_part = &digits_str[..split];
        let frac_part = digits_str[split..].trim_end_matches('0');
        if frac_part.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_part}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        let frac = format!("{zeros}{digits_str}");
        let frac = frac.trim_end_matches('0');
        format!("0.{frac}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Writes a CSV header and rows of numeric cells, comma separated, LF line
/// endings, numbers formatted with [`SIG_DIGITS`] significant digits.
pub fn write_csv<W: Write>(
    out: &mut W,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format_sig(*x, SIG_DIGITS)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
