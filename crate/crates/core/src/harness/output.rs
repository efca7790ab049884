use serde_json::{json, Value};

use super::{ConvergenceTable, Record};
use crate::error::Result;
use crate::variation::VariationReport;

pub const CSV_HEADER: [&str; 12] = [
    "scenario",
    "mode",
    "grid",
    "h",
    "lhs",
    "rhs_bulk",
    "rhs_boundary",
    "rhs_total",
    "abs_err",
    "rel_err",
    "pass",
    "runtime_ms",
];

fn deterministic() -> bool {
    std::env::var("FWL_DETERMINISTIC").is_ok_and(|v| v == "1")
}

fn runtime(r: &VariationReport) -> String {
    if deterministic() {
        "0".into()
    } else {
        format!("{:.3}", r.runtime_ms)
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn to_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    std::io::Error::other(e.to_string()).into()
}

/// One row per ladder step, then a row with `h = extrapolated` carrying
/// the verdict. Direct values get a single row with empty `h`; failed
/// scenarios get a row with empty numbers and `pass = false`.
pub fn reports_csv(records: &[Record]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for rec in records {
        let r = match &rec.result {
            Ok(r) => r,
            Err(_) => {
                let mut row = vec![rec.scenario.clone()];
                row.extend(std::iter::repeat_n(String::new(), 9));
                row.push("false".into());
                row.push(String::new());
                w.write_record(&row).map_err(csv_err)?;
                continue;
            }
        };
        let row = |h: String, lhs: f64, pass: bool| {
            let abs = (lhs - r.rhs_total).abs();
            let rel = if r.rhs_total != 0.0 {
                abs / r.rhs_total.abs()
            } else {
                abs
            };
            vec![
                r.scenario.clone(),
                r.mode.as_str().to_string(),
                opt(r.grid),
                h,
                lhs.to_string(),
                r.rhs_bulk.to_string(),
                r.rhs_boundary.to_string(),
                r.rhs_total.to_string(),
                abs.to_string(),
                rel.to_string(),
                pass.to_string(),
                runtime(r),
            ]
        };
        for s in &r.ladder.steps {
            let abs = (s.lhs - r.rhs_total).abs();
            let rel = if r.rhs_total != 0.0 {
                abs / r.rhs_total.abs()
            } else {
                abs
            };
            w.write_record(row(s.h.to_string(), s.lhs, r.tol.accepts(abs, rel)))
                .map_err(csv_err)?;
        }
        let h = if r.ladder.steps.is_empty() {
            String::new()
        } else {
            "extrapolated".into()
        };
        w.write_record(row(h, r.lhs, r.pass)).map_err(csv_err)?;
    }
    to_string(w)
}

/// The reports as a JSON array; failed scenarios appear as
/// `{"scenario": …, "error": …}`.
pub fn reports_json(records: &[Record]) -> Result<String> {
    let v: Vec<Value> = records
        .iter()
        .map(|rec| match &rec.result {
            Ok(r) => serde_json::to_value(r),
            Err(e) => Ok(json!({"scenario": rec.scenario, "error": e, "pass": false})),
        })
        .collect::<std::result::Result<_, _>>()?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn convergence_csv(t: &ConvergenceTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scenario",
        "grid",
        "lhs",
        "rhs_total",
        "abs_err",
        "rel_err",
        "pass",
        "fitted_order",
    ])
    .map_err(csv_err)?;
    let order = t.order.map_or_else(|| "n/a".to_string(), |o| o.to_string());
    for r in &t.rows {
        w.write_record([
            t.scenario.clone(),
            opt(r.grid),
            r.lhs.to_string(),
            r.rhs_total.to_string(),
            r.abs_err.to_string(),
            r.rel_err.to_string(),
            r.pass.to_string(),
            order.clone(),
        ])
        .map_err(csv_err)?;
    }
    to_string(w)
}

pub fn convergence_json(t: &ConvergenceTable) -> Result<String> {
    let mut v = serde_json::to_value(t)?;
    if t.order.is_none() {
        v["order"] = json!("n/a");
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}
