//! Report envelope and the number-to-string normalization.

use serde_json::{Map, Value};

pub const SCHEMA_VERSION: &str = "recigal-report/1";
pub const FLOAT_KEY: &str = "float-sanity";

/// Integers become decimal strings; floats become `{"float-sanity": x}`.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                Value::String(n.to_string())
            } else {
                float(n.as_f64().unwrap_or(f64::NAN))
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => {
            if is_float_sanity(&o) {
                return Value::Object(o);
            }
            Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect())
        }
        other => other,
    }
}

pub fn is_float_sanity(o: &Map<String, Value>) -> bool {
    o.len() == 1 && o.get(FLOAT_KEY).is_some_and(|x| x.is_number() || x.is_null())
}

pub fn float(x: f64) -> Value {
    let mut m = Map::new();
    m.insert(
        FLOAT_KEY.to_string(),
        serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null),
    );
    Value::Object(m)
}

pub fn envelope(command: &str, input: Value, config: Value, result: Value, timing_ms: Option<f64>) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), Value::String(SCHEMA_VERSION.into()));
    m.insert("command".into(), Value::String(command.into()));
    m.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    m.insert("input".into(), normalize(input));
    m.insert("config".into(), normalize(config));
    m.insert("result".into(), normalize(result));
    if let Some(t) = timing_ms {
        m.insert("timing_ms".into(), float(t));
    }
    Value::Object(m)
}

/// `path = value` lines.
pub fn table(v: &Value) -> String {
    let mut out = String::new();
    walk(v, String::new(), &mut out);
    out
}

fn walk(v: &Value, path: String, out: &mut String) {
    match v {
        Value::Object(o) if !is_float_sanity(o) => {
            for (k, x) in o {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(x, p, out);
            }
        }
        Value::Object(o) => {
            out.push_str(&format!("{path} = {}\n", o[FLOAT_KEY]));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                walk(x, format!("{path}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{path} = {s}\n")),
        other => out.push_str(&format!("{path} = {other}\n")),
    }
}
