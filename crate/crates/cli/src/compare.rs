//! Column-wise differences between two run directories.

use std::collections::HashMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Relative tolerance for deterministic columns.
pub fn relative_tolerance(kind: &str) -> f64 {
    match kind {
        "spectrum" | "kernel_bounds" => 1e-9,
        _ => 1e-8,
    }
}

/// Monte Carlo columns are compared against this many joint 95% half-widths.
pub const CI_MULTIPLE: f64 = 3.0;

#[derive(Debug, Serialize)]
pub struct ColumnDiff {
    pub column: String,
    pub max_abs_diff: f64,
    pub max_rel_diff: f64,
    /// `"relative"` or the name of the confidence column used.
    pub tolerance: String,
    pub exceeded: usize,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub kind: String,
    pub rows: usize,
    pub columns: Vec<ColumnDiff>,
    pub exceeded: usize,
}

struct Run {
    kind: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn load(dir: &Path) -> Result<Run, String> {
    let report = std::fs::read_to_string(dir.join("report.json")).map_err(|e| format!("{}: {e}", dir.display()))?;
    let report: Value = serde_json::from_str(&report).map_err(|e| format!("{}: {e}", dir.display()))?;
    let kind = report["kind"].as_str().ok_or("report.json has no kind")?.to_string();
    let mut rd = csv::Reader::from_path(dir.join("results.csv")).map_err(|e| format!("{}: {e}", dir.display()))?;
    let header = rd.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in rd.records() {
        rows.push(rec.map_err(|e| e.to_string())?.iter().map(String::from).collect());
    }
    Ok(Run { kind, header, rows })
}

fn ci_column(name: &str, index: &HashMap<&str, usize>) -> Option<(String, usize)> {
    let own = format!("{name}_ci95");
    if let Some(i) = index.get(own.as_str()) {
        return Some((own, *i));
    }
    if name == "estimate" {
        if let Some(i) = index.get("ci95") {
            return Some(("ci95".into(), *i));
        }
    }
    None
}

/// `Err` means a schema mismatch.
pub fn compare(a: &Path, b: &Path) -> Result<CompareReport, String> {
    let ra = load(a)?;
    let rb = load(b)?;
    if ra.kind != rb.kind {
        return Err(format!("kinds differ: {} vs {}", ra.kind, rb.kind));
    }
    if ra.header != rb.header {
        return Err(format!("headers differ: {:?} vs {:?}", ra.header, rb.header));
    }
    if ra.rows.len() != rb.rows.len() {
        return Err(format!("row counts differ: {} vs {}", ra.rows.len(), rb.rows.len()));
    }
    let index: HashMap<&str, usize> = ra.header.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect();
    let rel_tol = relative_tolerance(&ra.kind);
    let mut columns = Vec::new();
    for (c, name) in ra.header.iter().enumerate() {
        let ci = ci_column(name, &index);
        let mut d = ColumnDiff {
            column: name.clone(),
            max_abs_diff: 0.0,
            max_rel_diff: 0.0,
            tolerance: ci.as_ref().map_or("relative".into(), |(n, _)| n.clone()),
            exceeded: 0,
        };
        for (x, y) in ra.rows.iter().zip(&rb.rows) {
            match (x[c].parse::<f64>(), y[c].parse::<f64>()) {
                (Ok(u), Ok(v)) => {
                    if u == v || (u.is_nan() && v.is_nan()) {
                        continue;
                    }
                    let abs = (u - v).abs();
                    let rel = abs / u.abs().max(v.abs());
                    d.max_abs_diff = d.max_abs_diff.max(abs);
                    d.max_rel_diff = d.max_rel_diff.max(rel);
                    let ok = match &ci {
                        Some((_, i)) => {
                            let ca: f64 = x[*i].parse().unwrap_or(0.0);
                            let cb: f64 = y[*i].parse().unwrap_or(0.0);
                            abs <= CI_MULTIPLE * (ca * ca + cb * cb).sqrt()
                        }
                        None => rel <= rel_tol,
                    };
                    if !ok {
                        d.exceeded += 1;
                    }
                }
                _ if x[c] == y[c] => {}
                _ => d.exceeded += 1,
            }
        }
        columns.push(d);
    }
    let exceeded = columns.iter().map(|c| c.exceeded).sum();
    Ok(CompareReport {
        kind: ra.kind,
        rows: ra.rows.len(),
        columns,
        exceeded,
    })
}
