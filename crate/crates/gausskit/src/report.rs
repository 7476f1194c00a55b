use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Hermite,
    GaussThm3,
    GaussLsq,
    Trig,
    Cosine,
    Stencil,
    Synth,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Coefficient {
    Hermite { index: usize, b: f64, c: f64 },
    /// `log10_magnitude` stays finite when `value` overflows (serialised as null).
    Translate { index: usize, shift: f64, value: f64, sign: i8, log10_magnitude: f64 },
    Trig { index: usize, frequency: f64, re: f64, im: f64 },
    Stencil { node_re: f64, node_im: f64, re: f64, im: f64 },
    Impulse { index: usize, time: f64, weight: f64 },
}

/// Summary of one run, printed as JSON.
///
/// Keys are ordered, so identical runs print identical text. `wall_time_ms` is
/// only serialised on request because it is the one non-deterministic field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub method: Method,
    pub parameters: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_weighted: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_estimate: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, Value>,
    pub coefficients: Vec<Coefficient>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl RunReport {
    pub fn new(method: Method) -> Self {
        RunReport {
            method,
            parameters: BTreeMap::new(),
            error_l2: None,
            error_weighted: None,
            condition_estimate: None,
            diagnostics: BTreeMap::new(),
            coefficients: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn diag(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}
