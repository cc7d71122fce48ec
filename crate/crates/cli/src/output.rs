use serde_json::{Map, Number, Value};

pub const SCHEMA_VERSION: u64 = 1;
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds a float to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses")
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64 number"));
            Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect())
        }
        other => other,
    }
}

/// Wraps a command's payload in the versioned envelope and renders it with
/// sorted keys and rounded numbers.
pub fn render(command: &str, payload: Map<String, Value>) -> String {
    let mut doc = payload;
    doc.insert("schema".into(), Value::from(SCHEMA_VERSION));
    doc.insert("command".into(), Value::from(command));
    let mut text = serde_json::to_string_pretty(&normalize(Value::Object(doc)))
        .expect("JSON values serialize");
    text.push('\n');
    text
}
