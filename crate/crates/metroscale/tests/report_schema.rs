//! Validates emitted JSON reports against the schema file shipped in
//! `schema/report.schema.json`, using a small structural walker covering the
//! subset of JSON Schema the file uses (type, properties, required, items).

use serde_json::Value;

use metroscale::harness::report::json_string;
use metroscale::harness::{run_sweep, GeneratorSpec, SweepConfig};

const SCHEMA: &str = include_str!("../schema/report.schema.json");

fn type_matches(value: &Value, ty: &str) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        "integer" => value.as_i64().is_some() || value.as_u64().is_some(),
        "number" => value.is_number(),
        other => panic!("schema uses unsupported type '{other}'"),
    }
}

fn validate(value: &Value, schema: &Value, path: &str, errors: &mut Vec<String>) {
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<String> = match ty {
            Value::String(s) => vec![s.clone()],
            Value::Array(list) => list
                .iter()
                .map(|v| v.as_str().expect("type names are strings").to_string())
                .collect(),
            _ => panic!("malformed type at {path}"),
        };
        if !allowed.iter().any(|t| type_matches(value, t)) {
            errors.push(format!("{path}: expected {allowed:?}, got {value}"));
            return;
        }
    }
    if let Some(required) = schema.get("required").and_then(Value::as_array) {
        for key in required {
            let key = key.as_str().expect("required names are strings");
            if value.get(key).is_none() {
                errors.push(format!("{path}: missing required key '{key}'"));
            }
        }
    }
    if let (Some(properties), Some(object)) = (
        schema.get("properties").and_then(Value::as_object),
        value.as_object(),
    ) {
        for (key, subschema) in properties {
            if let Some(subvalue) = object.get(key) {
                validate(subvalue, subschema, &format!("{path}.{key}"), errors);
            }
        }
    }
    if let (Some(items), Some(array)) = (schema.get("items"), value.as_array()) {
        for (i, item) in array.iter().enumerate() {
            validate(item, items, &format!("{path}[{i}]"), errors);
        }
    }
}

#[test]
fn emitted_report_conforms_to_the_shipped_schema() {
    let schema: Value = serde_json::from_str(SCHEMA).expect("schema parses");
    let cfg = SweepConfig {
        strategies: vec!["ramsey-cc".into(), "sequential".into()],
        n_values: vec![4, 8, 16],
        nu: 300,
        phi_true: None,
        generator: GeneratorSpec::default(),
        seed: 99,
    };
    let report = run_sweep(&cfg).unwrap();
    let raw = json_string(&report).unwrap();
    let value: Value = serde_json::from_str(&raw).unwrap();
    let mut errors = Vec::new();
    validate(&value, &schema, "$", &mut errors);
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

#[test]
fn schema_catches_missing_fields() {
    let schema: Value = serde_json::from_str(SCHEMA).expect("schema parses");
    let broken: Value = serde_json::json!({
        "config": {"strategies": [], "n_values": [], "nu": 1, "generator": {}, "seed": 0},
        "cells": [{"strategy": "x", "n": 1, "nu": 1, "delta_phi": null, "bound": 0.1}],
        "fits": [],
    });
    let mut errors = Vec::new();
    validate(&broken, &schema, "$", &mut errors);
    assert!(
        errors.iter().any(|e| e.contains("missing required key 'partial'")),
        "{errors:?}"
    );
    assert!(
        errors.iter().any(|e| e.contains("missing required key 'ratio'")),
        "{errors:?}"
    );
}

#[test]
fn custom_generator_round_trips_through_the_schema() {
    let schema: Value = serde_json::from_str(SCHEMA).expect("schema parses");
    let cfg = SweepConfig {
        strategies: vec!["ghz-qc".into()],
        n_values: vec![2, 4, 6],
        nu: 200,
        phi_true: Some(0.2),
        generator: GeneratorSpec::Custom {
            dim: 2,
            re: vec![0.0, 1.0, 1.0, 0.0],
            im: vec![0.0, 0.0, 0.0, 0.0],
        },
        seed: 5,
    };
    let report = run_sweep(&cfg).unwrap();
    let raw = json_string(&report).unwrap();
    let value: Value = serde_json::from_str(&raw).unwrap();
    let mut errors = Vec::new();
    validate(&value, &schema, "$", &mut errors);
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}
