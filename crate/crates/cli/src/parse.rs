//! Value syntaxes shared by flags and config files.

use serde::Deserialize;

// Aliases keep clap from treating list-valued flags as repeatable.
pub type Counts = Vec<u64>;
pub type Times = Vec<f64>;

/// Nonnegative integer, also accepting float notation such as `1e6`.
pub fn count(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    count_from_f64(x).ok_or_else(|| format!("`{s}` is not a nonnegative whole number"))
}

fn count_from_f64(x: f64) -> Option<u64> {
    // 2^64 itself is not representable as u64
    (x >= 0.0 && x.fract() == 0.0 && x < 18_446_744_073_709_551_616.0).then_some(x as u64)
}

/// Comma-separated counts, e.g. `1e6,1e7`.
pub fn count_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(count)
        .collect()
}

fn real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    s.parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))
}

/// Round away the representation noise of `start + k·step`.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `start:stop:step` (inclusive) or a comma list.
pub fn time_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [single] => single
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(real)
            .collect::<Result<Vec<_>, _>>()?,
        [start, stop, step] => {
            let (start, stop, step) = (real(start)?, real(stop)?, real(step)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("`{s}` is not an increasing range"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as u64;
            (0..=n).map(|k| tidy(start + k as f64 * step)).collect()
        }
        _ => return Err(format!("`{s}`: expected start:stop:step or a comma list")),
    };
    if grid.is_empty() {
        return Err("empty time grid".into());
    }
    if grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(format!("`{s}`: times must be finite and nonnegative"));
    }
    Ok(grid)
}

/// Counts in a config file: a JSON number, an array of numbers, or the
/// flag's text syntax.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CountsValue {
    List(Vec<f64>),
    One(f64),
    Text(String),
}

impl CountsValue {
    pub fn resolve(&self) -> Result<Vec<u64>, String> {
        match self {
            Self::List(xs) => xs
                .iter()
                .map(|&x| count_from_f64(x).ok_or_else(|| format!("{x} is not a whole number")))
                .collect(),
            Self::One(x) => count_from_f64(*x)
                .map(|n| vec![n])
                .ok_or_else(|| format!("{x} is not a whole number")),
            Self::Text(s) => count_list(s),
        }
    }
}

/// Times in a config file: a number, an array, or grid text.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TimesValue {
    List(Vec<f64>),
    One(f64),
    Text(String),
}

impl TimesValue {
    pub fn resolve(&self) -> Result<Vec<f64>, String> {
        match self {
            Self::List(xs) => Ok(xs.clone()),
            Self::One(x) => Ok(vec![*x]),
            Self::Text(s) => time_grid(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(count("1000").unwrap(), 1000);
        assert_eq!(count("1e6").unwrap(), 1_000_000);
        assert_eq!(count(" 2.5e1 ").unwrap(), 25);
        assert!(count("1.5").is_err());
        assert!(count("-3").is_err());
        assert!(count("abc").is_err());
        assert_eq!(count_list("1e6,1e7").unwrap(), vec![1_000_000, 10_000_000]);
    }

    #[test]
    fn grids() {
        let g = time_grid("1.0:5.0:0.5").unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[1], 1.5);
        assert_eq!(g[8], 5.0);
        let g = time_grid("0.1:1:0.1").unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[2], 0.3);
        assert_eq!(time_grid("0.25").unwrap(), vec![0.25]);
        assert_eq!(time_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(time_grid("5:1:1").is_err());
        assert!(time_grid("1:2").is_err());
        assert!(time_grid("-1").is_err());
    }

    #[test]
    fn config_values() {
        let v: CountsValue = serde_json::from_str("[1e6, 1e7]").unwrap();
        assert_eq!(v.resolve().unwrap(), vec![1_000_000, 10_000_000]);
        let v: CountsValue = serde_json::from_str("\"1e2,1e3\"").unwrap();
        assert_eq!(v.resolve().unwrap(), vec![100, 1000]);
        let v: TimesValue = serde_json::from_str("\"1:2:0.5\"").unwrap();
        assert_eq!(v.resolve().unwrap(), vec![1.0, 1.5, 2.0]);
    }
}
