use serde::Serialize;
use serde_json::{Number, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to 12 significant digits. Non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Text form used in CSV cells: `inf` for infinity, empty for NaN.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let r = round_sig(x);
        let a = r.abs();
        if a != 0.0 && !(1e-4..1e15).contains(&a) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_value),
        Value::Object(m) => m.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(123456789012345.0), 123456789012000.0);
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(f64::NAN), "");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(5.65658631047123e-14), "5.65658631047e-14");
    }

    #[test]
    fn json_rounds_floats_only() {
        let s = to_json(&serde_json::json!({"a": 2.0f64 / 3.0, "n": 12345678901234567u64}));
        assert!(s.contains("0.666666666667"));
        assert!(s.contains("12345678901234567"));
    }

    proptest! {
        #[test]
        fn round_trip_at_twelve_digits(x in -1e300f64..1e300) {
            let r = round_sig(x);
            let back: f64 = fmt_num(r).parse().unwrap();
            prop_assert_eq!(back, r);
            prop_assert!((r - x).abs() <= 5e-12 * x.abs());
        }
    }
}
