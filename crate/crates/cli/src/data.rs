//! CSV ingest and emission for univariate series.
//!
//! The format is a single column, optionally headed by `value`.  Reading is
//! strict: every row must hold one finite number, and errors carry the
//! physical row number of the offending cell.  Writing uses Rust's default
//! float formatting, which is the shortest string that round-trips, so a
//! written file re-ingests bit-identically.

use std::fmt::Write as _;
use std::path::Path;

use acsel_core::Trajectory;

use crate::error::{CliError, Result};

/// Reads a one-column CSV into a trajectory.
///
/// # Errors
///
/// [`CliError::Data`] when the file cannot be read, a cell is non-numeric
/// or non-finite (with its row number), or no observations remain.
pub fn ingest_csv(path: &Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_csv(&text)
}

/// Parses CSV text into a trajectory; see [`ingest_csv`].
pub fn parse_csv(text: &str) -> Result<Trajectory> {
    let mut lines: Vec<&str> = text.lines().collect();
    // Trailing blank lines are a formatting artifact, not data.
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    let mut values = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let row = i + 1;
        let cell = line.trim();
        if row == 1 && cell == "value" {
            continue;
        }
        if cell.is_empty() {
            return Err(CliError::Data(format!("empty cell at row {row}")));
        }
        let parsed: f64 = cell
            .parse()
            .map_err(|_| CliError::Data(format!("non-numeric cell `{cell}` at row {row}")))?;
        if !parsed.is_finite() {
            return Err(CliError::Data(format!("non-finite value `{cell}` at row {row}")));
        }
        values.push(parsed);
    }
    if values.is_empty() {
        return Err(CliError::Data("the series holds no observations".into()));
    }
    Trajectory::new(values).map_err(|e| CliError::Data(e.to_string()))
}

/// Renders a trajectory as a `value`-headed CSV string.
pub fn render_csv(x: &Trajectory) -> String {
    let mut out = String::with_capacity(8 + 20 * x.len());
    out.push_str("value\n");
    for &v in x.values() {
        writeln!(out, "{v}").expect("writing to a String cannot fail");
    }
    out
}

/// Writes a trajectory to `path` in the format [`ingest_csv`] reads.
///
/// # Errors
///
/// [`CliError::Data`] when the file cannot be written.
pub fn write_csv(path: &Path, x: &Trajectory) -> Result<()> {
    std::fs::write(path, render_csv(x))
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_optional_and_rows_parse_in_order() {
        let with_header = parse_csv("value\n1.5\n-2.25\n0.0\n").unwrap();
        let without = parse_csv("1.5\n-2.25\n0.0").unwrap();
        assert_eq!(with_header.values(), &[1.5, -2.25, 0.0]);
        assert_eq!(with_header.values(), without.values());
    }

    #[test]
    fn non_numeric_cells_report_their_physical_row() {
        let err = parse_csv("value\n1.0\nabc\n2.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3"), "got: {msg}");
        assert!(msg.contains("abc"), "got: {msg}");
        assert_eq!(err.code(), 3);
    }

    #[test]
    fn nan_is_rejected_with_its_row() {
        // `NaN` parses as a float, so it must be caught by the finiteness
        // check rather than the numeric one.
        let err = parse_csv("1.0\nNaN\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("non-finite"), "got: {msg}");
        assert!(msg.contains("row 2"), "got: {msg}");

        let err = parse_csv("1.0\n-inf\n").unwrap_err();
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse_csv("").unwrap_err().to_string().contains("no observations"));
        assert!(parse_csv("value\n").unwrap_err().to_string().contains("no observations"));
        assert!(parse_csv("\n\n").unwrap_err().to_string().contains("no observations"));
    }

    #[test]
    fn interior_blank_lines_are_errors_not_skips() {
        let err = parse_csv("1.0\n\n2.0\n").unwrap_err();
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn written_series_reingest_bit_identically() {
        let x = Trajectory::new(vec![
            0.1,
            -3.0,
            1.0 / 3.0,
            6.02214076e23,
            f64::MIN_POSITIVE,
            -0.0,
        ])
        .unwrap();
        let text = render_csv(&x);
        let back = parse_csv(&text).unwrap();
        assert_eq!(back.values().len(), x.values().len());
        for (a, b) in back.values().iter().zip(x.values()) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a} vs {b}");
        }
    }
}
