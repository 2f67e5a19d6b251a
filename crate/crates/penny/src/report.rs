//! Deterministic JSON output.
//!
//! All reports serialize floating point values with 17 significant digits
//! (`{:.16e}`), which round-trips every f64 exactly and makes reruns
//! byte-identical. Object keys are emitted in sorted order. Non-finite
//! values must be mapped to `null` before serialization (JSON has no
//! infinities); use [`val_f64`].

use serde::Serialize;
use serde_json::Value;

struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize a JSON value with fixed float formatting.
pub fn to_json_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

/// f64 to JSON, mapping non-finite values to null.
pub fn val_f64(x: f64) -> Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        Value::Null
    }
}

/// Array of f64 to JSON with the non-finite mapping applied elementwise.
pub fn val_f64_slice(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| val_f64(x)).collect())
}
