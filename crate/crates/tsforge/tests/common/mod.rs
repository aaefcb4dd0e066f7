#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::Value;
use tsforge_core::sim::{ManualAnomaly, ManualSystem};
use tsforge_core::parse_expression;

pub const FIVE_EQUATIONS: [&str; 5] = [
    "cos((t-2)*x1[t-3])",
    "cos(9*(t-4))/sin(9)",
    "(cos((t-2)*x4[t-2]) + 2*x4[t-4] - x3[t-3]/4)/10",
    "sin(t-3) - integral(x2,3,1) + x3[t-3]/2",
    "sin(6*(t-4)) + (3*cos(t-1)-2)^2",
];

pub const X3_ANOMALY: &str = "sin(t-3) - integral(x2,3,1) + x3[t-3]/5";

/// The five-variable system with the x3 anomaly on `[106, 137)` when
/// `anomalous` is set.
pub fn five_system(train_length: usize, test_length: usize, anomalous: bool) -> ManualSystem {
    let equations = FIVE_EQUATIONS
        .iter()
        .map(|s| parse_expression(s, 5).unwrap())
        .collect();
    let anomalies = if anomalous {
        vec![ManualAnomaly {
            var: 3,
            t_start: 106,
            t_end: 137,
            equation: parse_expression(X3_ANOMALY, 5).unwrap(),
        }]
    } else {
        Vec::new()
    };
    ManualSystem {
        equations,
        anomalies,
        train_length,
        test_length,
        propagation: vec![(2, 3, true), (3, 2, false)],
        seed: 7,
        ..Default::default()
    }
}

pub fn five_config_json(train_length: usize, test_length: usize) -> String {
    serde_json::json!({
        "equations": FIVE_EQUATIONS,
        "anomalies": [{"var": 3, "start": 106, "end": 137, "equation": X3_ANOMALY}],
        "train_length": train_length,
        "test_length": test_length,
        "propagation": [
            {"src": 2, "dst": 3, "propagates": true},
            {"src": 3, "dst": 2, "propagates": false}
        ],
        "seed": 7
    })
    .to_string()
}

/// File name to contents for every regular file in `dir`.
pub fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().unwrap().is_file())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect()
}

/// Checks `doc` against the subset of JSON Schema used by the shipped
/// metadata schema: type, const, enum, required, properties,
/// additionalProperties, items, minItems, maxItems, minimum, maximum and
/// exclusiveMaximum.
pub fn schema_errors(schema: &Value, doc: &Value, path: &str, out: &mut Vec<String>) {
    let s = schema.as_object().expect("schema node is an object");
    if let Some(t) = s.get("type").and_then(Value::as_str) {
        let ok = match t {
            "object" => doc.is_object(),
            "array" => doc.is_array(),
            "string" => doc.is_string(),
            "boolean" => doc.is_boolean(),
            "integer" => doc.is_u64() || doc.is_i64(),
            "number" => doc.is_number(),
            other => panic!("unsupported type {other}"),
        };
        if !ok {
            out.push(format!("{path}: expected {t}"));
            return;
        }
    }
    if let Some(c) = s.get("const") {
        if c != doc {
            out.push(format!("{path}: expected {c}"));
        }
    }
    if let Some(options) = s.get("enum").and_then(Value::as_array) {
        if !options.contains(doc) {
            out.push(format!("{path}: {doc} not in enum"));
        }
    }
    if let Some(x) = doc.as_f64() {
        if let Some(m) = s.get("minimum").and_then(Value::as_f64) {
            if x < m {
                out.push(format!("{path}: below minimum"));
            }
        }
        if let Some(m) = s.get("maximum").and_then(Value::as_f64) {
            if x > m {
                out.push(format!("{path}: above maximum"));
            }
        }
        if let Some(m) = s.get("exclusiveMaximum").and_then(Value::as_f64) {
            if x >= m {
                out.push(format!("{path}: not below exclusive maximum"));
            }
        }
    }
    if let Some(obj) = doc.as_object() {
        for r in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(r.as_str().unwrap()) {
                out.push(format!("{path}: missing {r}"));
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, v) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(sub) => schema_errors(sub, v, &format!("{path}.{k}"), out),
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    out.push(format!("{path}: unexpected {k}"))
                }
                None => {}
            }
        }
    }
    if let Some(arr) = doc.as_array() {
        if let Some(n) = s.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < n {
                out.push(format!("{path}: too few items"));
            }
        }
        if let Some(n) = s.get("maxItems").and_then(Value::as_u64) {
            if arr.len() as u64 > n {
                out.push(format!("{path}: too many items"));
            }
        }
        if let Some(items) = s.get("items") {
            for (i, v) in arr.iter().enumerate() {
                schema_errors(items, v, &format!("{path}[{i}]"), out);
            }
        }
    }
}
