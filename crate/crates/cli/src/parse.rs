//! Parsers for complex numbers, comma-separated lists and brackets.

use rncurves_core::Cx64;

/// Parses `a`, `bi`, `a+bi` or `a-bi` (with `j` accepted for `i`).
pub fn complex(s: &str) -> Result<Cx64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse {s:?} as a complex number");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|re| Cx64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not an exponent sign or the leading sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |m: &str| match m {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => m.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Cx64::new(re, imag(&body[k..])?))
        }
        None => Ok(Cx64::new(0.0, imag(body)?)),
    }
}

/// Comma-separated complex values.
pub fn complex_list(s: &str) -> Result<Vec<Cx64>, String> {
    s.split(',').map(complex).collect()
}

/// `lo,hi` with `lo < hi`, both finite.
pub fn bracket(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi] = parts.as_slice() else {
        return Err(format!("bracket {s:?} must have the form lo,hi"));
    };
    let lo: f64 = lo.parse().map_err(|_| format!("cannot parse bracket bound {lo:?}"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("cannot parse bracket bound {hi:?}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("bracket {s:?} must satisfy lo < hi"));
    }
    Ok((lo, hi))
}
