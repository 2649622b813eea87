//! Validation of reports against `schemas/report-v1.json`.

use serde_json::{Map, Value};

use crate::report::{is_float_sanity, FLOAT_KEY};

pub const SCHEMA_JSON: &str = include_str!("../../../schemas/report-v1.json");

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Validation {
    pub valid: bool,
    pub version: Option<String>,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

fn schema() -> Value {
    serde_json::from_str(SCHEMA_JSON).expect("bundled schema is valid JSON")
}

fn is_integer_string(s: &str) -> bool {
    let t = s.strip_prefix('-').unwrap_or(s);
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
}

fn is_rational_string(s: &str) -> bool {
    match s.split_once('/') {
        Some((a, b)) => is_integer_string(a) && is_integer_string(b) && !b.starts_with('-'),
        None => is_integer_string(s),
    }
}

fn check_type(v: &Value, ty: &str) -> bool {
    if let Some(base) = ty.strip_suffix('?') {
        return v.is_null() || check_type(v, base);
    }
    match ty {
        "string" => v.is_string(),
        "integer" => v.as_str().is_some_and(is_integer_string),
        "rational" => v.as_str().is_some_and(is_rational_string),
        "float" => v.as_object().is_some_and(is_float_sanity),
        "bool" => v.is_boolean(),
        "array" => v.is_array(),
        "object" => v.is_object() && !v.as_object().is_some_and(is_float_sanity),
        _ => false,
    }
}

fn bare_numbers(v: &Value, path: &str, errors: &mut Vec<String>) {
    match v {
        Value::Number(_) => errors.push(format!("{path}: bare number")),
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                bare_numbers(x, &format!("{path}[{i}]"), errors);
            }
        }
        Value::Object(o) if is_float_sanity(o) => {}
        Value::Object(o) => {
            for (k, x) in o {
                if k == FLOAT_KEY {
                    errors.push(format!("{path}: {FLOAT_KEY} mixed with other keys"));
                }
                bare_numbers(x, &format!("{path}.{k}"), errors);
            }
        }
        _ => {}
    }
}

fn check_fields(obj: &Map<String, Value>, spec: &Value, path: &str, required: bool, errors: &mut Vec<String>) {
    let Some(spec) = spec.as_object() else { return };
    for (k, ty) in spec {
        let ty = ty.as_str().unwrap_or("");
        match obj.get(k) {
            Some(v) if check_type(v, ty) => {}
            Some(_) => errors.push(format!("{path}.{k}: expected {ty}")),
            None if required => errors.push(format!("{path}.{k}: missing")),
            None => {}
        }
    }
}

pub fn validate(doc: &Value) -> Validation {
    let s = schema();
    let mut out = Validation::default();
    let Some(obj) = doc.as_object() else {
        out.errors.push("report is not a JSON object".into());
        return out;
    };
    let mut obj = obj.clone();
    let version = obj.get("schema").and_then(Value::as_str).map(str::to_string);
    out.version = version.clone();
    let current = s["schema"].as_str().unwrap_or_default();
    match version.as_deref() {
        Some(v) if v == current => {}
        Some(v) => match s["migrations"].get(v) {
            Some(m) => {
                out.warnings.push(format!("{v}: {}", m["note"].as_str().unwrap_or("older schema")));
                if let Some(ren) = m["rename"].as_object() {
                    for (from, to) in ren {
                        if let Some(x) = obj.remove(from) {
                            obj.insert(to.as_str().unwrap_or(from).to_string(), x);
                        }
                    }
                }
                obj.insert("schema".into(), Value::String(current.into()));
            }
            None => out.errors.push(format!("unknown schema version {v}")),
        },
        None => out.errors.push("schema: missing".into()),
    }
    check_fields(&obj, &s["envelope"], "", true, &mut out.errors);
    check_fields(&obj, &s["optional"], "", false, &mut out.errors);
    if let Some(cfg) = obj.get("config").and_then(Value::as_object) {
        check_fields(cfg, &s["config"], "config", true, &mut out.errors);
    }
    let cmd = obj.get("command").and_then(Value::as_str).unwrap_or_default();
    match s["results"].get(cmd) {
        Some(spec) => {
            if let Some(res) = obj.get("result").and_then(Value::as_object) {
                check_fields(res, spec, "result", true, &mut out.errors);
            }
        }
        None => out.errors.push(format!("command: unknown {cmd:?}")),
    }
    bare_numbers(&Value::Object(obj), "", &mut out.errors);
    out.valid = out.errors.is_empty();
    out
}
