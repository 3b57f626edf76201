//! Number formatting and document output.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

/// Formats `x` with 17 significant digits, which round-trips every finite
/// `f64`. Plain notation is used for decimal exponents in `[-5, 17)`.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return non_finite(x).to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0" } else { "0.0" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') && !s.ends_with(".0") {
            s.pop();
        }
        if s.ends_with('.') {
            s.push('0');
        }
    }
    s
}

fn non_finite(x: f64) -> &'static str {
    if x.is_nan() {
        "nan"
    } else if x > 0.0 {
        "infinity"
    } else {
        "-infinity"
    }
}

/// JSON value for a float. Infinite values become the string `"infinity"`.
pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String(non_finite(x).to_string()),
    }
}

pub fn nums(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(xs.into_iter().map(num).collect())
}

struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(sig17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Indented `key: value` rendering for terminals.
pub fn to_text(value: &Value) -> String {
    let mut out = String::new();
    render(value, 0, &mut out);
    out
}

fn scalar(value: &Value) -> Option<String> {
    match value {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(x) if n.is_f64() => sig17(x),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|v| matches!(v, Value::Number(_) | Value::String(_))) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn render(value: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                match scalar(v) {
                    Some(s) => out.push_str(&format!("{pad}{key}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        render(v, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render(item, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [
            std::f64::consts::PI,
            0.1,
            1.0,
            -2.5e-300,
            1e17,
            123456789012345678.0,
            f64::MIN_POSITIVE,
            f64::MAX,
            5e-324,
            1e-5,
            9.999999999999999e-6,
        ] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }

    #[test]
    fn uses_seventeen_digits() {
        assert_eq!(sig17(0.1), "0.10000000000000001");
        assert_eq!(sig17(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(sig17(1.0), "1.0");
        assert_eq!(sig17(1e20), "1.0e20");
        assert_eq!(sig17(f64::INFINITY), "infinity");
    }

    #[test]
    fn infinite_values_become_strings() {
        assert_eq!(to_json(&num(f64::INFINITY)), "\"infinity\"");
        assert_eq!(to_json(&nums([0.5, 2.0])), "[0.5,2.0]");
    }
}
