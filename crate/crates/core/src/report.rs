//! JSON report conventions: versioned envelope, floats as 15-digit strings,
//! errors as `{code, message}`.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::SymbolError;

pub const SCHEMA_VERSION: u64 = 1;

/// A float as a decimal string with 15 significant digits.
pub fn float_string(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.14e}")
}

/// Replaces every non-integer JSON number by its [`float_string`].
pub fn stringify_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => Value::String(float_string(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(xs) => Value::Array(xs.into_iter().map(stringify_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, stringify_floats(v))).collect()),
        other => other,
    }
}

/// Serializes `x` and applies [`stringify_floats`].
pub fn to_report_value<T: Serialize>(x: &T) -> Value {
    // serde_json maps non-finite floats to null; none of the report types
    // hold them except as explicit sentinels.
    stringify_floats(serde_json::to_value(x).unwrap_or(Value::Null))
}

pub fn error_value(e: &SymbolError) -> Value {
    let mut m = Map::new();
    m.insert("code".into(), Value::String(e.code().into()));
    m.insert("message".into(), Value::String(e.to_string()));
    Value::Object(m)
}

/// Builder for the report envelope.
#[derive(Clone, Debug, Default)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(op: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), Value::from(SCHEMA_VERSION));
        fields.insert("op".into(), Value::String(op.into()));
        Report { fields }
    }

    /// Sets a field; floats inside are stringified.
    pub fn set<T: Serialize>(mut self, key: &str, value: T) -> Self {
        self.fields.insert(key.into(), to_report_value(&value));
        self
    }

    pub fn set_value(mut self, key: &str, value: Value) -> Self {
        self.fields.insert(key.into(), stringify_floats(value));
        self
    }

    pub fn error(self, e: &SymbolError) -> Self {
        self.set_value("error", error_value(e))
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.fields)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_become_strings() {
        let v = stringify_floats(json!({"a": 0.1, "b": [1, 2.5], "c": -3}));
        assert_eq!(v, json!({"a": "1.00000000000000e-1", "b": [1, "2.50000000000000e0"], "c": -3}));
        assert_eq!(float_string(1.0 / 3.0), "3.33333333333333e-1");
        assert_eq!(float_string(f64::INFINITY), "inf");
    }

    #[test]
    fn envelope() {
        let r = Report::new("index").set("index", -1i64).error(&SymbolError::NotInCommutativeAlgebra).into_value();
        assert_eq!(r["schema"], json!(1));
        assert_eq!(r["index"], json!(-1));
        assert_eq!(r["error"]["code"], json!("not_in_commutative_algebra"));
    }
}
