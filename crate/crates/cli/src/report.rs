//! Row types and the CSV/JSON writers and readers for the three tables the
//! binary emits: single-run delivery tables, policy comparisons, and
//! aversion sweeps.
//!
//! CSV cells hold floats with exactly six decimal places and empty strings
//! where a column does not apply to a row. JSON output is an array of
//! objects with the same fields in the same order, using `null` and nested
//! arrays for the per-food-type groups. Writers are pure functions of their
//! inputs, so equal inputs produce byte-identical files.

use ladle_core::{AgencyId, PolicyRun, RunMetrics};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed table: {0}")]
    Malformed(String),
}

pub const COMPARE_COLUMNS: [&str; 9] = [
    "policy",
    "mean_overflow_lbs",
    "sd_overflow_lbs",
    "mean_undistributed_lbs",
    "sd_undistributed_lbs",
    "mean_people_served",
    "sd_people_served",
    "n_replications",
    "seed",
];

/// One policy's replication statistics, one table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRow {
    pub policy: String,
    pub mean_overflow_lbs: f64,
    pub sd_overflow_lbs: f64,
    pub mean_undistributed_lbs: f64,
    pub sd_undistributed_lbs: f64,
    pub mean_people_served: f64,
    pub sd_people_served: f64,
    pub n_replications: usize,
    pub seed: u64,
}

/// A [`PolicyRow`] tagged with the aversion value of its sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub policy: String,
    pub mean_overflow_lbs: f64,
    pub sd_overflow_lbs: f64,
    pub mean_undistributed_lbs: f64,
    pub sd_undistributed_lbs: f64,
    pub mean_people_served: f64,
    pub sd_people_served: f64,
    pub n_replications: usize,
    pub seed: u64,
}

/// One line of the single-run delivery table: either one visited agency or
/// the policy's summary. Per-food-type columns are vectors here and
/// `*_ft{id}_*` columns in CSV; fields that do not apply to the row kind
/// stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub policy: String,
    pub row: String,
    pub visit_index: Option<usize>,
    pub agency_id: Option<u32>,
    pub delivered_lbs: Vec<f64>,
    pub delivered_total_lbs: f64,
    pub overflow_lbs: f64,
    pub undistributed_lbs: Option<f64>,
    pub people_served: u64,
    pub welfare: Option<Vec<f64>>,
    pub combined_welfare: Option<f64>,
}

fn float_cell(v: f64) -> String {
    format!("{v:.6}")
}

fn optional<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn optional_float(v: &Option<f64>) -> String {
    v.map(float_cell).unwrap_or_default()
}

pub fn compare_rows(stats: &ladle_core::ComparisonStats) -> Vec<PolicyRow> {
    let row = |name: &str, p: &ladle_core::PolicyStats| PolicyRow {
        policy: name.to_string(),
        mean_overflow_lbs: p.overflow_lbs.mean,
        sd_overflow_lbs: p.overflow_lbs.sd,
        mean_undistributed_lbs: p.undistributed_lbs.mean,
        sd_undistributed_lbs: p.undistributed_lbs.sd,
        mean_people_served: p.people_served.mean,
        sd_people_served: p.people_served.sd,
        n_replications: stats.n_replications,
        seed: stats.seed,
    };
    vec![row("proposed", &stats.proposed), row("baseline", &stats.baseline)]
}

pub fn sweep_rows(points: &[(f64, ladle_core::ComparisonStats)]) -> Vec<SweepRow> {
    points
        .iter()
        .flat_map(|(epsilon, stats)| {
            compare_rows(stats).into_iter().map(|r| SweepRow {
                epsilon: *epsilon,
                policy: r.policy,
                mean_overflow_lbs: r.mean_overflow_lbs,
                sd_overflow_lbs: r.sd_overflow_lbs,
                mean_undistributed_lbs: r.mean_undistributed_lbs,
                sd_undistributed_lbs: r.sd_undistributed_lbs,
                mean_people_served: r.mean_people_served,
                sd_people_served: r.sd_people_served,
                n_replications: r.n_replications,
                seed: r.seed,
            })
        })
        .collect()
}

/// Delivery table rows for one finished policy run: the visited agencies in
/// visit order, then a summary row.
pub fn run_rows(policy: &str, run: &PolicyRun, metrics: &RunMetrics, p: usize) -> Vec<RunRow> {
    let by_id: BTreeMap<AgencyId, &ladle_core::AgencyMetrics> =
        metrics.per_agency.iter().map(|a| (a.agency, a)).collect();
    let mut rows = Vec::with_capacity(run.plan.visit_order.len() + 1);
    let mut delivered_totals = vec![0.0; p];
    for (visit_index, aid) in run.plan.visit_order.iter().enumerate() {
        let a = by_id[aid];
        for (total, lbs) in delivered_totals.iter_mut().zip(&a.delivered) {
            *total += lbs;
        }
        let welfare = metrics.welfare_trace.get(visit_index);
        rows.push(RunRow {
            policy: policy.to_string(),
            row: "agency".to_string(),
            visit_index: Some(visit_index),
            agency_id: Some(aid.0),
            delivered_lbs: a.delivered.clone(),
            delivered_total_lbs: a.delivered.iter().sum(),
            overflow_lbs: a.overflow_lbs,
            undistributed_lbs: None,
            people_served: a.people_served,
            welfare: welfare.map(|w| w.per_type.clone()),
            combined_welfare: welfare.map(|w| w.combined),
        });
    }
    rows.push(RunRow {
        policy: policy.to_string(),
        row: "summary".to_string(),
        visit_index: None,
        agency_id: None,
        delivered_total_lbs: delivered_totals.iter().sum(),
        delivered_lbs: delivered_totals,
        overflow_lbs: metrics.overflow_lbs,
        undistributed_lbs: Some(metrics.undistributed_lbs),
        people_served: metrics.people_served,
        welfare: None,
        combined_welfare: None,
    });
    rows
}

pub fn run_columns(p: usize) -> Vec<String> {
    let mut cols: Vec<String> =
        ["policy", "row", "visit_index", "agency_id"].map(String::from).to_vec();
    cols.extend((0..p).map(|x| format!("delivered_ft{x}_lbs")));
    cols.extend(
        ["delivered_total_lbs", "overflow_lbs", "undistributed_lbs", "people_served"]
            .map(String::from),
    );
    cols.extend((0..p).map(|x| format!("welfare_ft{x}")));
    cols.push("combined_welfare".to_string());
    cols
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn csv_bytes(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("writing to a Vec cannot fail")
}

pub fn write_compare_csv(rows: &[PolicyRow]) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(COMPARE_COLUMNS).expect("writing to a Vec cannot fail");
    for r in rows {
        w.write_record([
            r.policy.clone(),
            float_cell(r.mean_overflow_lbs),
            float_cell(r.sd_overflow_lbs),
            float_cell(r.mean_undistributed_lbs),
            float_cell(r.sd_undistributed_lbs),
            float_cell(r.mean_people_served),
            float_cell(r.sd_people_served),
            r.n_replications.to_string(),
            r.seed.to_string(),
        ])
        .expect("writing to a Vec cannot fail");
    }
    csv_bytes(w)
}

pub fn write_sweep_csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut w = csv_writer();
    let mut header = vec!["epsilon"];
    header.extend(COMPARE_COLUMNS);
    w.write_record(&header).expect("writing to a Vec cannot fail");
    for r in rows {
        w.write_record([
            float_cell(r.epsilon),
            r.policy.clone(),
            float_cell(r.mean_overflow_lbs),
            float_cell(r.sd_overflow_lbs),
            float_cell(r.mean_undistributed_lbs),
            float_cell(r.sd_undistributed_lbs),
            float_cell(r.mean_people_served),
            float_cell(r.sd_people_served),
            r.n_replications.to_string(),
            r.seed.to_string(),
        ])
        .expect("writing to a Vec cannot fail");
    }
    csv_bytes(w)
}

pub fn write_run_csv(rows: &[RunRow], p: usize) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(run_columns(p)).expect("writing to a Vec cannot fail");
    for r in rows {
        let mut record = vec![
            r.policy.clone(),
            r.row.clone(),
            optional(&r.visit_index),
            optional(&r.agency_id),
        ];
        record.extend(r.delivered_lbs.iter().map(|v| float_cell(*v)));
        record.push(float_cell(r.delivered_total_lbs));
        record.push(float_cell(r.overflow_lbs));
        record.push(optional_float(&r.undistributed_lbs));
        record.push(r.people_served.to_string());
        match &r.welfare {
            Some(per_type) => record.extend(per_type.iter().map(|v| float_cell(*v))),
            None => record.extend(std::iter::repeat_n(String::new(), p)),
        }
        record.push(optional_float(&r.combined_welfare));
        w.write_record(&record).expect("writing to a Vec cannot fail");
    }
    csv_bytes(w)
}

fn json_bytes<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(rows).expect("table rows serialize");
    bytes.push(b'\n');
    bytes
}

pub fn write_compare_json(rows: &[PolicyRow]) -> Vec<u8> {
    json_bytes(rows)
}

pub fn write_sweep_json(rows: &[SweepRow]) -> Vec<u8> {
    json_bytes(rows)
}

pub fn write_run_json(rows: &[RunRow]) -> Vec<u8> {
    json_bytes(rows)
}

pub fn read_compare_csv(bytes: &[u8]) -> Result<Vec<PolicyRow>, ReportError> {
    let mut rdr = csv::Reader::from_reader(bytes);
    rdr.deserialize().collect::<Result<_, _>>().map_err(ReportError::from)
}

pub fn read_sweep_csv(bytes: &[u8]) -> Result<Vec<SweepRow>, ReportError> {
    let mut rdr = csv::Reader::from_reader(bytes);
    rdr.deserialize().collect::<Result<_, _>>().map_err(ReportError::from)
}

pub fn read_compare_json(bytes: &[u8]) -> Result<Vec<PolicyRow>, ReportError> {
    serde_json::from_slice(bytes).map_err(ReportError::from)
}

pub fn read_sweep_json(bytes: &[u8]) -> Result<Vec<SweepRow>, ReportError> {
    serde_json::from_slice(bytes).map_err(ReportError::from)
}

pub fn read_run_json(bytes: &[u8]) -> Result<Vec<RunRow>, ReportError> {
    serde_json::from_slice(bytes).map_err(ReportError::from)
}

fn parse_cell<T: std::str::FromStr>(cell: &str, column: &str) -> Result<T, ReportError>
where
    T::Err: std::fmt::Display,
{
    cell.parse().map_err(|e| ReportError::Malformed(format!("{column}: {e}")))
}

fn parse_optional<T: std::str::FromStr>(cell: &str, column: &str) -> Result<Option<T>, ReportError>
where
    T::Err: std::fmt::Display,
{
    if cell.is_empty() { Ok(None) } else { parse_cell(cell, column).map(Some) }
}

pub fn read_run_csv(bytes: &[u8]) -> Result<Vec<RunRow>, ReportError> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let headers = rdr.headers()?.clone();
    let p = headers.iter().filter(|h| h.starts_with("delivered_ft")).count();
    let expected = run_columns(p);
    if !headers.iter().eq(expected.iter().map(String::as_str)) {
        return Err(ReportError::Malformed(format!(
            "expected columns {expected:?}, got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != expected.len() {
            return Err(ReportError::Malformed(format!(
                "row has {} cells, expected {}",
                record.len(),
                expected.len()
            )));
        }
        let cell = |i: usize| record.get(i).unwrap_or("");
        let delivered_lbs = (0..p)
            .map(|x| parse_cell(cell(4 + x), &expected[4 + x]))
            .collect::<Result<Vec<f64>, _>>()?;
        let welfare_cells: Vec<Option<f64>> = (0..p)
            .map(|x| parse_optional(cell(8 + p + x), &expected[8 + p + x]))
            .collect::<Result<_, _>>()?;
        let welfare = if welfare_cells.iter().all(Option::is_none) {
            None
        } else if welfare_cells.iter().all(Option::is_some) {
            Some(welfare_cells.into_iter().flatten().collect())
        } else {
            return Err(ReportError::Malformed(
                "welfare columns must be all present or all empty in a row".into(),
            ));
        };
        rows.push(RunRow {
            policy: cell(0).to_string(),
            row: cell(1).to_string(),
            visit_index: parse_optional(cell(2), "visit_index")?,
            agency_id: parse_optional(cell(3), "agency_id")?,
            delivered_lbs,
            delivered_total_lbs: parse_cell(cell(4 + p), "delivered_total_lbs")?,
            overflow_lbs: parse_cell(cell(5 + p), "overflow_lbs")?,
            undistributed_lbs: parse_optional(cell(6 + p), "undistributed_lbs")?,
            people_served: parse_cell(cell(7 + p), "people_served")?,
            welfare,
            combined_welfare: parse_optional(cell(8 + 2 * p), "combined_welfare")?,
        });
    }
    Ok(rows)
}
