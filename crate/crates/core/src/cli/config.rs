//! Flat `key = value` files: run configs mirroring the flags, and
//! validation grids whose values are comma-separated lists.

use std::collections::BTreeMap;
use std::str::FromStr;

pub type KeyValues = BTreeMap<String, String>;

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; keys may be written with dashes or underscores.
pub fn parse_key_values(text: &str) -> Result<KeyValues, String> {
    let mut out = KeyValues::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value, got {raw:?}", no + 1))?;
        let key = k.trim().trim_start_matches("--").replace('-', "_");
        if key.is_empty() {
            return Err(format!("line {}: empty key", no + 1));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key {key}", no + 1));
        }
    }
    Ok(out)
}

/// Parses `a:b:step` into `a, a + step, ...` up to `b` inclusive.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<_> = text.split(':').map(str::trim).collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(format!("grid {text:?} must look like start:stop:step"));
    };
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("grid {text:?}: {s:?}: {e}"));
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(step > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
        return Err(format!("grid {text:?} needs start <= stop and a positive step"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("grid {text:?} has too many points"));
    }
    Ok((0..count).map(|i| a + i as f64 * step).collect())
}

pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let items: Result<Vec<T>, String> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("{key}: {s:?}: {e}")))
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err(format!("{key}: empty list"));
    }
    Ok(items)
}

pub fn strictly_increasing(key: &str, xs: &[f64]) -> Result<(), String> {
    if xs.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(format!("{key}: grid must be strictly increasing"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_values() {
        let kv = parse_key_values("# run\nd = 4\n--max-events=10\n\n lambda= 2.5 ").unwrap();
        assert_eq!(kv["d"], "4");
        assert_eq!(kv["max_events"], "10");
        assert_eq!(kv["lambda"], "2.5");
        assert!(parse_key_values("d 4").is_err());
        assert!(parse_key_values("d=1\nd=2").is_err());
    }

    #[test]
    fn ranges() {
        let r = parse_range("0.1:0.5:0.1").unwrap();
        assert_eq!(r.len(), 5);
        assert!((r[4] - 0.5).abs() < 1e-15);
        assert!(parse_range("0.5:0.1:0.1").is_err());
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<u32>("d", "2, 3,5").unwrap(), vec![2, 3, 5]);
        assert!(parse_list::<u32>("d", "2,x").is_err());
        assert!(parse_list::<u32>("d", " ").is_err());
        assert!(strictly_increasing("p", &[0.1, 0.1]).is_err());
    }
}
