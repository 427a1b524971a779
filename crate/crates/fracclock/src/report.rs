//! Deterministic emission and re-parsing of solution fields, and the
//! comparison report assembled from the emitted numbers alone.
//!
//! CSV contract: header `method,t,x1[,x2,...],u,err`, floats printed with 17
//! significant digits, `.` decimal separator, `\n` line endings. Identical
//! configs and seeds produce byte-identical files.

use crate::error::{Error, Result};
use crate::spectral::{MethodTag, SolutionField};
use serde::{Deserialize, Serialize};

/// 17 significant digits, locale-independent.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render a solution field as CSV text.
pub fn solution_csv(field: &SolutionField) -> String {
    let dim = field.grid.first().map(|(_, x)| x.len()).unwrap_or(0);
    let mut out = String::from("method,t");
    for i in 1..=dim {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",u,err\n");
    for (((t, x), u), e) in field.grid.iter().zip(&field.values).zip(&field.err) {
        out.push_str(field.method.as_str());
        out.push(',');
        out.push_str(&format_float(*t));
        for c in x {
            out.push(',');
            out.push_str(&format_float(*c));
        }
        out.push(',');
        out.push_str(&format_float(*u));
        out.push(',');
        out.push_str(&format_float(*e));
        out.push('\n');
    }
    out
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub method: MethodTag,
    pub t: f64,
    pub x: Vec<f64>,
    pub u: f64,
    pub err: f64,
}

/// Parse solution CSV text back into rows. Strict: the header must match
/// the contract and every row must carry the same field count with finite
/// numbers.
pub fn parse_solution_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Input("csv: empty input".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 4 || cols[0] != "method" || cols[1] != "t" {
        return Err(Error::Input(format!(
            "csv: header must be `method,t,x1[,x2,...],u,err`, got `{header}`"
        )));
    }
    let dim = cols.len() - 4;
    for (i, c) in cols.iter().enumerate().take(cols.len() - 2).skip(2) {
        if *c != format!("x{}", i - 1) {
            return Err(Error::Input(format!("csv: unexpected column `{c}`")));
        }
    }
    if cols[cols.len() - 2] != "u" || cols[cols.len() - 1] != "err" {
        return Err(Error::Input("csv: last columns must be `u,err`".into()));
    }

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != cols.len() {
            return Err(Error::Input(format!(
                "csv line {}: expected {} fields, got {}",
                lineno + 2,
                cols.len(),
                parts.len()
            )));
        }
        let method: MethodTag = parts[0]
            .parse()
            .map_err(|e| Error::Input(format!("csv line {}: {e}", lineno + 2)))?;
        let mut nums = Vec::with_capacity(parts.len() - 1);
        for p in &parts[1..] {
            let v: f64 = p.parse().map_err(|_| {
                Error::Input(format!("csv line {}: `{p}` is not a float", lineno + 2))
            })?;
            if !v.is_finite() {
                return Err(Error::Input(format!(
                    "csv line {}: non-finite value `{p}`",
                    lineno + 2
                )));
            }
            nums.push(v);
        }
        rows.push(CsvRow {
            method,
            t: nums[0],
            x: nums[1..1 + dim].to_vec(),
            u: nums[1 + dim],
            err: nums[2 + dim],
        });
    }
    Ok(rows)
}

/// Per-point comparison of two methods.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub u_a: f64,
    pub u_b: f64,
    pub delta: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodPairReport {
    pub method_a: MethodTag,
    pub method_b: MethodTag,
    pub max_delta: f64,
    pub pass: bool,
    pub points: Vec<ComparisonPoint>,
}

/// Versioned comparison report; verdicts derive from the emitted CSV
/// numbers only, so the comparison can be re-run offline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema: u32,
    pub pass: bool,
    pub pairs: Vec<MethodPairReport>,
}

/// Error bars are combined additively; Monte Carlo bars enter at three
/// standard errors.
fn budget(method: MethodTag, err: f64) -> f64 {
    match method {
        MethodTag::Mc => 3.0 * err,
        _ => err,
    }
}

/// Compare every pair of methods over their common grid points.
pub fn compare(tables: &[Vec<CsvRow>]) -> Result<ComparisonReport> {
    let mut pairs = Vec::new();
    let mut all_pass = true;
    for i in 0..tables.len() {
        for j in i + 1..tables.len() {
            let a = &tables[i];
            let b = &tables[j];
            if a.is_empty() || b.is_empty() {
                return Err(Error::Input("compare: empty table".into()));
            }
            let mut points = Vec::new();
            let mut max_delta = 0.0f64;
            let mut pair_pass = true;
            for ra in a {
                // Grid points are emitted identically by every method, so
                // bit-equality is the join key.
                let Some(rb) = b
                    .iter()
                    .find(|rb| rb.t == ra.t && rb.x == ra.x)
                else {
                    continue;
                };
                let delta = (ra.u - rb.u).abs();
                let tol = budget(ra.method, ra.err) + budget(rb.method, rb.err);
                let pass = delta <= tol;
                pair_pass &= pass;
                max_delta = max_delta.max(delta);
                points.push(ComparisonPoint {
                    t: ra.t,
                    x: ra.x.clone(),
                    u_a: ra.u,
                    u_b: rb.u,
                    delta,
                    tol,
                    pass,
                });
            }
            if points.is_empty() {
                return Err(Error::Input(
                    "compare: methods share no grid points".into(),
                ));
            }
            all_pass &= pair_pass;
            pairs.push(MethodPairReport {
                method_a: a[0].method,
                method_b: b[0].method,
                max_delta,
                pass: pair_pass,
                points,
            });
        }
    }
    Ok(ComparisonReport { schema: 1, pass: all_pass, pairs })
}

pub fn report_json(report: &ComparisonReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
