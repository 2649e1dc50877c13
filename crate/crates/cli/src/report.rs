//! The JSON document every command prints.

use std::collections::BTreeMap;

use lpgpd::linalg::{matrix_to_json, Matrix};
use lpgpd::C;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub seconds: f64,
    pub cached: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub p: Option<f64>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub timing: Timing,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            p: None,
            result: Value::Null,
            witness: None,
            residual: None,
            timing: Timing { seconds: 0.0, cached: false },
            error: None,
        }
    }
}

pub fn complex(z: C<f64>) -> Value {
    json!([z.re, z.im])
}

pub fn vector(v: &[C<f64>]) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

pub fn matrix(m: &Matrix<f64>) -> Value {
    json!(matrix_to_json(m))
}
