//! Run reports and their decimal serialization.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Number, Value};
use systole_lab::tolerances;

use crate::constants::{constants_table, ConstantsTable};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl Check {
    pub fn new(name: &str, pass: bool) -> Self {
        Check { name: name.into(), pass, value: None, threshold: None }
    }

    /// Passes when `value ≤ threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), pass: value <= threshold, value: Some(value), threshold: Some(threshold) }
    }

    /// Passes when `value ≥ threshold`.
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), pass: value >= threshold, value: Some(value), threshold: Some(threshold) }
    }

    pub fn count_zero(name: &str, count: usize) -> Self {
        Check { name: name.into(), pass: count == 0, value: Some(count as f64), threshold: Some(0.0) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub suite: String,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub witnesses: Value,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub constants: ConstantsTable,
    pub wall_clock_seconds: Option<f64>,
    #[serde(skip)]
    pub csv: Option<String>,
}

impl RunReport {
    pub fn new(suite: &str, seed: Option<u64>, samples: Option<u64>, checks: Vec<Check>, witnesses: Value) -> Self {
        RunReport {
            suite: suite.into(),
            seed,
            samples,
            pass: checks.iter().all(|c| c.pass),
            checks,
            witnesses,
            tolerances: tolerance_table(),
            constants: constants_table(),
            wall_clock_seconds: None,
            csv: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON with every float rounded to 15 significant digits.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is serializable");
        let mut text = serde_json::to_string_pretty(&round_value(value)).expect("value is serializable");
        text.push('\n');
        text
    }
}

pub fn tolerance_table() -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("bound_rel", tolerances::BOUND_REL),
        ("speyer_abs", tolerances::SPEYER_ABS),
        ("optimizer_rel", tolerances::OPTIMIZER_REL),
        ("identity_abs", tolerances::IDENTITY_ABS),
        ("orthogonality_abs", tolerances::ORTHOGONALITY_ABS),
        ("canonical_abs", tolerances::CANONICAL_ABS),
        ("sandwich_abs", tolerances::SANDWICH_ABS),
        ("john_tol", tolerances::JOHN_TOL),
        ("minima_abs", tolerances::MINIMA_ABS),
        ("singular_det", tolerances::SINGULAR_DET),
        ("enumeration_cap", tolerances::ENUMERATION_CAP as f64),
    ])
}

/// `x` rounded to 15 significant digits (ties to even on the exact binary value).
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round15(n.as_f64().expect("f64 number"));
            Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

/// One CSV field for a float at 15 significant digits.
pub fn csv_float(x: f64) -> String {
    if x.is_finite() {
        format!("{}", round15(x))
    } else {
        String::new()
    }
}
