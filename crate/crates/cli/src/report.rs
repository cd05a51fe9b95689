use bellforge::io::format_sig;
use serde_json::{Map, Value};

/// Ordered key/value output, rendered as `key: value` lines or one JSON object.
#[derive(Debug, Default)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn put_opt(self, key: &str, value: Option<impl Into<Value>>) -> Self {
        match value {
            Some(v) => self.put(key, v),
            None => self.put(key, Value::Null),
        }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            return Value::Object(self.fields.clone()).to_string();
        }
        self.fields
            .iter()
            .map(|(k, v)| format!("{k}: {}", text(v)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Floats get nine significant digits; everything else prints as usual.
pub fn text(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format_sig(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        Value::Null => "-".to_string(),
        Value::Array(items) => items.iter().map(text).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// Non-finite floats have no JSON form; they become null.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn nums(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| num(v)).collect())
}
