use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::BoundResult;
use crate::criterion::CriterionReport;
use crate::qmath::Ket;
use crate::repeater::{ExpectedLedger, SampledRun};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    pub outcome: usize,
    pub probability: f64,
    pub maximal: bool,
    pub bob_acts: bool,
    pub bob_success: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub theta: f64,
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub p_ms: f64,
    /// `min{2 sin²θ, 2 sin²η}`.
    pub optimal_rate: f64,
    pub direct_success: f64,
    pub outcomes: Vec<OutcomeSummary>,
    pub ledger: ExpectedLedger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisReport {
    pub theta: f64,
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub probabilities: Vec<f64>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub kets: Vec<Ket>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub sampled: SampledRun,
    pub exact_p_ms: f64,
    pub expected_bob_acts: f64,
    /// Deviation of the estimate from the exact rate in standard errors.
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutput {
    pub theta: f64,
    pub eta: f64,
    pub measurement: String,
    #[serde(flatten)]
    pub report: CriterionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundOutput {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(flatten)]
    pub result: BoundResult,
}

/// One grid cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub eta: f64,
    pub p_ms: f64,
    pub p_direct: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
    pub p_max: f64,
    pub bob_acts_optimal: f64,
    pub bob_acts_bell: f64,
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}_{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten_into(&key(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten_into(&key(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// A single-record report as a two-line CSV; nested fields are joined with `_`.
pub(super) fn single_row_csv<T: Serialize>(report: &T) -> Result<String, String> {
    let value = serde_json::to_value(report).map_err(|e| e.to_string())?;
    let mut cells = Vec::new();
    flatten_into("", &value, &mut cells);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(cells.iter().map(|(k, _)| k)).map_err(|e| e.to_string())?;
    w.write_record(cells.iter().map(|(_, v)| v)).map_err(|e| e.to_string())?;
    String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

pub(super) fn rows_csv<T: Serialize>(rows: &[T]) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}
