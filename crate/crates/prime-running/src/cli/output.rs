//! Output rendering: CSV (UTF-8, LF, header row, comma separator, no
//! quoting needed by construction) and JSON. Floats are rendered with a
//! fixed number of decimals; rationals with round-half-even.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::json;

use crate::bias::{decimal_string, BiasVector};
use crate::cramer::TrialStats;
use crate::error::Result;
use crate::running::{LatticePath, RunningTable};

/// Write atomically: temp file in the same directory, then rename.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp-out");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `x,a0,a1,...,a{d-1}` with exact integer entries.
pub fn running_table_csv(table: &RunningTable) -> String {
    let mut out = String::from("x");
    for a in 0..table.d {
        let _ = write!(out, ",a{a}");
    }
    out.push('\n');
    for (row, &x) in table.checkpoints.iter().enumerate() {
        let _ = write!(out, "{x}");
        for a in 0..table.d {
            let _ = write!(out, ",{}", table.value(row, a));
        }
        out.push('\n');
    }
    out
}

/// Rescaled bias per reduced class: `x,a1,...` with 6-decimal values.
pub fn rescaled_bias_csv(table: &RunningTable) -> Result<String> {
    let reduced: Vec<u64> = (0..table.d)
        .filter(|&a| crate::primes::gcd(a, table.d) == 1)
        .collect();
    let mut out = String::from("x");
    for &a in &reduced {
        let _ = write!(out, ",a{a}");
    }
    out.push('\n');
    for (row, &x) in table.checkpoints.iter().enumerate() {
        let _ = write!(out, "{x}");
        for &a in &reduced {
            let _ = write!(out, ",{:.6}", table.rescaled_bias_at(row, a)?);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn running_table_json(table: &RunningTable) -> String {
    serde_json::to_string_pretty(table).expect("table serializes")
}

/// `n,x,y` rows.
pub fn path_csv(path: &LatticePath) -> String {
    let mut out = String::from("n,x,y\n");
    for &(n, x, y) in &path.samples {
        let _ = writeln!(out, "{n},{x},{y}");
    }
    out
}

/// Bias vector JSON mirroring the table layout: rational and rounded
/// decimal per reduced class.
pub fn bias_vector_json(v: &BiasVector, q_description: &str, places: u32) -> String {
    let entries: Vec<_> = v
        .entries
        .iter()
        .map(|(a, r)| {
            json!({
                "a": a,
                "rational": format!("{}/{}", r.numer(), r.denom()),
                "decimal": decimal_string(r, places),
            })
        })
        .collect();
    let doc = json!({
        "d": v.d,
        "Q_description": q_description,
        "entries": entries,
        "r_bar": format!("{}/{}", v.r_bar.numer(), v.r_bar.denom()),
    });
    serde_json::to_string_pretty(&doc).expect("bias vector serializes")
}

/// CSV variant: one row per reduced class.
pub fn bias_vector_csv(v: &BiasVector, places: u32) -> String {
    let mut out = String::from("a,rational,decimal\n");
    for (a, r) in &v.entries {
        let _ = writeln!(
            out,
            "{a},{}/{},{}",
            r.numer(),
            r.denom(),
            decimal_string(r, places)
        );
    }
    out
}

pub fn trial_stats_json(
    stats: &TrialStats,
    x: u64,
    q: u64,
    d: u64,
    a: u64,
    seed: u64,
    expected_series: f64,
) -> String {
    let doc = json!({
        "x": x,
        "Q": q,
        "d": d,
        "a": a,
        "n_trials": stats.n_trials,
        "mean": stats.mean,
        "variance": stats.variance,
        "seed": seed,
        "expected_series": expected_series,
    });
    serde_json::to_string_pretty(&doc).expect("stats serialize")
}

pub fn trials_csv(stats: &TrialStats) -> String {
    let mut out = String::from("trial,phi_tilde\n");
    for (i, v) in stats.values.iter().enumerate() {
        let _ = writeln!(out, "{i},{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::running::running_table;

    #[test]
    fn table_csv_layout() {
        let t = running_table(10, 3, &[5, 10]).unwrap();
        let csv = running_table_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,a0,a1,a2");
        assert_eq!(lines[1], "5,3,0,2");
        assert_eq!(lines[2], "10,3,4,3");
    }

    #[test]
    fn bias_csv_has_reduced_columns_only() {
        let t = running_table(100, 4, &[100]).unwrap();
        let csv = rescaled_bias_csv(&t).unwrap();
        assert!(csv.starts_with("x,a1,a3\n"));
    }
}
