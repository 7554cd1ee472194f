//! Unit-suffixed scalars for the command line. Every physical value must
//! carry a unit; values are converted to SI (or a.u. / cm⁻¹ where noted).

use std::ops::RangeInclusive;

/// Unit name and its power of ten relative to the base unit.
type Units = &'static [(&'static str, i32)];

const LENGTH: Units = &[("nm", -9), ("um", -6), ("µm", -6), ("μm", -6), ("mm", -3), ("m", 0)];
const POWER: Units = &[("uW", -6), ("µW", -6), ("μW", -6), ("mW", -3), ("W", 0)];
const FREQUENCY: Units = &[("Hz", 0), ("kHz", 3), ("MHz", 6), ("GHz", 9)];
const TEMPERATURE: Units = &[("nK", -9), ("uK", -6), ("µK", -6), ("μK", -6), ("mK", -3), ("K", 0)];
const TIME: Units = &[("ns", -9), ("us", -6), ("µs", -6), ("μs", -6), ("ms", -3), ("s", 0)];
const POLARIZABILITY: Units = &[("au", 0), ("a.u.", 0)];
const WAVENUMBER: Units = &[("cm-1", 0), ("cm^-1", 0)];

fn parse(s: &str, units: Units, what: &str) -> Result<f64, String> {
    let s = s.trim();
    let mut sorted: Vec<&(&str, i32)> = units.iter().collect();
    sorted.sort_by_key(|(u, _)| std::cmp::Reverse(u.len()));
    for (unit, exp) in sorted {
        if let Some(num) = s.strip_suffix(unit) {
            let num = num.trim();
            // "1.4MHz" must not match the "Hz" of "1.4M".
            if num.ends_with(|c: char| c.is_alphabetic() || c == 'µ' || c == 'μ') {
                continue;
            }
            let v: f64 = num.parse().map_err(|_| format!("malformed {what} `{s}`"))?;
            if !v.is_finite() {
                return Err(format!("{what} `{s}` is not finite"));
            }
            // Shift the decimal exponent so "9mW" is exactly 0.009.
            let (mantissa, e) = match num.split_once(['e', 'E']) {
                Some((m, e)) => (m, e.parse::<i32>().map_err(|_| format!("malformed {what} `{s}`"))?),
                None => (num, 0),
            };
            return format!("{mantissa}e{}", e + exp)
                .parse()
                .map_err(|_| format!("malformed {what} `{s}`"));
        }
    }
    let names: Vec<&str> = units.iter().map(|(u, _)| *u).collect();
    if s.parse::<f64>().is_ok() {
        Err(format!("{what} `{s}` is missing a unit (one of {})", names.join(", ")))
    } else {
        Err(format!("unknown unit in {what} `{s}` (expected one of {})", names.join(", ")))
    }
}

pub fn length(s: &str) -> Result<f64, String> {
    parse(s, LENGTH, "length")
}

pub fn power(s: &str) -> Result<f64, String> {
    parse(s, POWER, "power")
}

pub fn frequency(s: &str) -> Result<f64, String> {
    parse(s, FREQUENCY, "frequency")
}

pub fn temperature(s: &str) -> Result<f64, String> {
    parse(s, TEMPERATURE, "temperature")
}

pub fn time(s: &str) -> Result<f64, String> {
    parse(s, TIME, "time")
}

pub fn polarizability(s: &str) -> Result<f64, String> {
    parse(s, POLARIZABILITY, "polarizability")
}

pub fn wavenumber(s: &str) -> Result<f64, String> {
    parse(s, WAVENUMBER, "energy")
}

/// `start:stop:step` with time units; a bare `0` start is accepted.
pub fn time_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("time grid `{s}` must be start:stop:step"));
    };
    let start = if start.trim() == "0" { 0.0 } else { time(start)? };
    let grid = crate::coherence::time_grid(start, time(stop)?, time(step)?).map_err(|e| e.to_string())?;
    if grid.len() > 1_000_000 {
        return Err(format!("time grid `{s}` has more than 10^6 points"));
    }
    Ok(grid)
}

/// Inclusive integer range `a:b`.
pub fn int_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("range `{s}` must be a:b"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("malformed range start in `{s}`"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("malformed range end in `{s}`"))?;
    if b < a {
        return Err(format!("empty range `{s}`"));
    }
    Ok(a..=b)
}

pub fn fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("malformed fraction `{s}`"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("fraction `{s}` must be in (0, 1]"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converts_units() {
        assert_eq!(length("650nm").unwrap(), 650e-9);
        assert_eq!(power("9mW").unwrap(), 0.009);
        assert_eq!(frequency("1.4MHz").unwrap(), 1.4e6);
        assert_eq!(frequency("90kHz").unwrap(), 90e3);
        assert_eq!(frequency("12 Hz").unwrap(), 12.0);
        assert_eq!(temperature("13uK").unwrap(), 13e-6);
        assert_eq!(time("108us").unwrap(), 108e-6);
        assert_eq!(power("-2.5e1mW").unwrap(), -0.025);
        assert_eq!(polarizability("107au").unwrap(), 107.0);
        assert_eq!(power("1e-3W").unwrap(), 1e-3);
    }

    #[test]
    fn rejects_missing_and_unknown_units() {
        assert!(length("650").unwrap_err().contains("missing a unit"));
        assert!(length("650furlong").unwrap_err().contains("unknown unit"));
        assert!(frequency("3MW").is_err());
        assert!(power("9 mw").is_err());
        assert!(length("nm").is_err());
    }

    #[test]
    fn grids_and_ranges() {
        let g = time_grid("0:60us:1us").unwrap();
        assert_eq!(g.len(), 61);
        assert!((g[60] - 60e-6).abs() < 1e-18);
        assert!(time_grid("0:60:1us").is_err());
        assert_eq!(int_range("35:80").unwrap(), 35..=80);
        assert!(int_range("80:35").is_err());
        assert!(fraction("1.5").is_err());
    }
}
