//! Output formatting: every number is rounded to 12 significant digits before
//! printing so identical invocations produce byte-identical text.

use serde_json::Value;

/// Round to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0; // collapse -0.0
    }
    if !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - magnitude);
    (x * factor).round() / factor
}

/// Shortest decimal rendering of the 12-significant-digit rounding.
pub fn fmt_sig12(x: f64) -> String {
    format!("{}", round_sig12(x))
}

/// Walk a JSON value and round every float in place.
pub fn round_numbers(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig12(f)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Pretty JSON with rounded numbers and sorted keys.
pub fn render_json(mut value: Value) -> String {
    round_numbers(&mut value);
    let mut text = serde_json::to_string_pretty(&value).expect("serializable value");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_12_significant_digits() {
        assert_eq!(fmt_sig12(2.0 * std::f64::consts::SQRT_2), "2.82842712475");
        assert_eq!(fmt_sig12(0.42677669529663687), "0.426776695297");
        assert_eq!(fmt_sig12(1_000_000.0), "1000000");
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(-1.0 / 3.0), "-0.333333333333");
    }

    #[test]
    fn json_floats_are_rounded_but_integers_kept() {
        let value = serde_json::json!({
            "f": 0.1234567890123456,
            "i": 42,
            "nested": [1.0f64 / 3.0]
        });
        let text = render_json(value);
        assert!(text.contains("0.123456789012"));
        assert!(text.contains("42"));
        assert!(text.contains("0.333333333333"));
    }
}
