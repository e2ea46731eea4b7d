use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sfd_core::{Curve2d, Point2d};

#[derive(Deserialize)]
struct CurveFile {
    vertices: Vec<[f64; 2]>,
}

pub fn read_curve(path: &Path) -> Result<Curve2d> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_curve(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_curve(text: &str) -> Result<Curve2d> {
    let file: CurveFile = serde_json::from_str(text)?;
    if file.vertices.len() < 2 {
        bail!(
            "a curve needs at least 2 vertices, got {}",
            file.vertices.len()
        );
    }
    let pts = file
        .vertices
        .iter()
        .map(|&[x, y]| Point2d::new(x, y))
        .collect();
    Ok(Curve2d::new(pts)?)
}

/// `%.17g`: 17 significant digits, positional for moderate exponents.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (neg, mant) = mant.strip_prefix('-').map_or((false, mant), |m| (true, m));
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    let sign = if neg { "-" } else { "" };
    if (-5..17).contains(&exp) {
        let body = if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        } else {
            let (int, frac) = digits.split_at(exp as usize + 1);
            format!("{int}.{frac}")
        };
        let body = body.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{body}")
    } else {
        let (lead, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        if rest.is_empty() {
            format!("{sign}{lead}e{exp}")
        } else {
            format!("{sign}{lead}.{rest}e{exp}")
        }
    }
}

pub fn curve_json(c: &Curve2d) -> String {
    let rows: Vec<String> = c
        .vertices()
        .iter()
        .map(|p| format!("[{}, {}]", fmt_g17(p.x), fmt_g17(p.y)))
        .collect();
    format!("{{\"vertices\": [{}]}}\n", rows.join(", "))
}

pub fn write_curve(path: &Path, c: &Curve2d) -> Result<()> {
    fs::write(path, curve_json(c)).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_round_trips() {
        for v in [
            0.1,
            1.0,
            -2.5,
            1e-7,
            123456789.123,
            1e300,
            -3.0e-300,
            f64::MIN_POSITIVE,
            1.0 / 3.0,
        ] {
            let s = fmt_g17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(-2.5), "-2.5");
    }
}
