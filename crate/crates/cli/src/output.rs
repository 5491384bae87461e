//! Deterministic JSON and CSV rendering.
//!
//! Floats are written with 17 significant digits in scientific notation and
//! objects keep their insertion order, so identical runs give identical bytes.

use std::io::Write;
use std::path::Path;

use rncurves_core::Cx64;
use serde_json::{Map, Number, Value};

use crate::Failure;

/// A float as a JSON number with 17 significant digits; non-finite values
/// become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let x = if x == 0.0 { 0.0 } else { x };
    Value::Number(fmt_float(x).parse::<Number>().expect("formatted float is a JSON number"))
}

/// The textual form used by [`num`], also used for CSV cells.
pub fn fmt_float(x: f64) -> String {
    let s = format!("{x:.16e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => format!("{mantissa}e{:+}", exp.parse::<i32>().expect("exponent is an integer")),
        None => s,
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// `[re, im]`.
pub fn cx(z: Cx64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn cx_list(zs: &[Cx64]) -> Value {
    Value::Array(zs.iter().map(|&z| cx(z)).collect())
}

/// Object with keys in the given order.
pub fn obj<'a>(pairs: impl IntoIterator<Item = (&'a str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect::<Map<_, _>>())
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes `text` to `path`, or to standard output when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Numeric(e.to_string()))
        }
    }
}
