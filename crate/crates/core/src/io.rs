//! Text formats for coefficients, pairs, reports and curves.
//!
//! Coefficient files hold one complex number per line as `re im`, in index
//! order; blank lines and lines starting with `#` are skipped and a lone
//! number is read as a real coefficient. Sectioned files (pairs, reports)
//! start with `key = value` lines followed by `[name]` headers, each opening a
//! coefficient block. Values are written in shortest round-trip scientific
//! notation, CSV values with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::experiments::Curve;
use crate::series::TruncatedSeries;
use crate::spaces::Pair;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position: line,
        message: message.into(),
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| parse_error(line, format!("`{token}` is not a number")))
}

fn parse_coefficient(text: &str, line: usize) -> Result<Complex64> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    match tokens.as_slice() {
        [re] => Ok(Complex64::new(parse_number(re, line)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_number(re, line)?, parse_number(im, line)?)),
        _ => Err(parse_error(line, "expected `re im`")),
    }
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Parses a coefficient file; positions in errors are 1-based line numbers.
pub fn parse_coefficients(text: &str) -> Result<TruncatedSeries> {
    let mut coeffs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if is_skipped(line) {
            continue;
        }
        coeffs.push(parse_coefficient(line, i + 1)?);
    }
    TruncatedSeries::new(coeffs).map_err(|e| match e {
        Error::EmptySeries => parse_error(0, "no coefficients"),
        other => other,
    })
}

pub fn format_coefficients(s: &TruncatedSeries) -> String {
    let mut out = String::with_capacity(48 * (s.degree() + 1));
    for c in s.coeffs() {
        let _ = writeln!(out, "{:e} {:e}", c.re, c.im);
    }
    out
}

/// Scalars and named coefficient blocks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sectioned {
    pub scalars: Vec<(String, String)>,
    pub blocks: Vec<(String, TruncatedSeries)>,
}

impl Sectioned {
    pub fn scalar(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.scalars.push((key.to_string(), value.to_string()));
        self
    }

    /// Shortest round-trip form, in scientific notation outside `[1e-4, 1e6)`.
    pub fn number(&mut self, key: &str, x: f64) -> &mut Self {
        let a = x.abs();
        let text = if a == 0.0 || (1e-4..1e6).contains(&a) || !x.is_finite() {
            x.to_string()
        } else {
            format!("{x:e}")
        };
        self.scalar(key, text)
    }

    pub fn block(&mut self, name: &str, s: &TruncatedSeries) -> &mut Self {
        self.blocks.push((name.to_string(), s.clone()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.scalars
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_block(&self, name: &str) -> Option<&TruncatedSeries> {
        self.blocks.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.scalars {
            let _ = writeln!(out, "{k} = {v}");
        }
        for (name, s) in &self.blocks {
            let _ = writeln!(out, "[{name}]");
            out.push_str(&format_coefficients(s));
        }
        out
    }

    /// Scalars become JSON numbers where they parse as such; blocks become
    /// arrays of `[re, im]`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.scalars {
            let value = match v.parse::<f64>() {
                Ok(x) if x.is_finite() => json!(x),
                _ => json!(v),
            };
            map.insert(k.clone(), value);
        }
        for (name, s) in &self.blocks {
            let arr: Vec<Value> = s.coeffs().iter().map(|c| json!([c.re, c.im])).collect();
            map.insert(name.clone(), Value::Array(arr));
        }
        Value::Object(map)
    }

    pub fn parse(text: &str) -> Result<Sectioned> {
        let mut out = Sectioned::default();
        let mut current: Option<(String, Vec<Complex64>)> = None;
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if is_skipped(line) {
                continue;
            }
            let t = line.trim();
            if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                if let Some((prev, coeffs)) = current.take() {
                    out.blocks.push((prev, TruncatedSeries::new(coeffs).map_err(|_| parse_error(n, "empty block"))?));
                }
                current = Some((name.trim().to_string(), Vec::new()));
            } else if let Some((_, coeffs)) = current.as_mut() {
                coeffs.push(parse_coefficient(t, n)?);
            } else if let Some((k, v)) = t.split_once('=') {
                out.scalars.push((k.trim().to_string(), v.trim().to_string()));
            } else {
                return Err(parse_error(n, "expected `key = value` or `[section]`"));
            }
        }
        if let Some((prev, coeffs)) = current.take() {
            out.blocks.push((
                prev,
                TruncatedSeries::new(coeffs).map_err(|_| parse_error(text.lines().count(), "empty block"))?,
            ));
        }
        Ok(out)
    }
}

pub fn pair_to_sectioned(pair: &Pair) -> Sectioned {
    let mut s = Sectioned::default();
    s.scalar("degree", pair.degree())
        .scalar("grid_size", pair.grid_size())
        .number("identity_defect", pair.identity_defect())
        .block("b", pair.b())
        .block("a", pair.a())
        .block("phi", pair.phi());
    s
}

pub fn format_pair(pair: &Pair) -> String {
    pair_to_sectioned(pair).to_text()
}

pub fn parse_pair(text: &str) -> Result<Pair> {
    let s = Sectioned::parse(text)?;
    let scalar = |key: &str| {
        s.get(key)
            .ok_or_else(|| parse_error(0, format!("missing `{key}`")))
    };
    let block = |key: &str| {
        s.get_block(key)
            .cloned()
            .ok_or_else(|| parse_error(0, format!("missing section [{key}]")))
    };
    let degree: usize = scalar("degree")?
        .parse()
        .map_err(|_| parse_error(0, "degree is not an integer"))?;
    let grid_size: usize = scalar("grid_size")?
        .parse()
        .map_err(|_| parse_error(0, "grid_size is not an integer"))?;
    let defect = parse_number(scalar("identity_defect")?, 0)?;
    let (b, a, phi) = (block("b")?, block("a")?, block("phi")?);
    if a.degree() != degree {
        return Err(parse_error(0, "block length does not match degree"));
    }
    Pair::from_parts(b, a, phi, grid_size, defect)
}

/// `x,y,label` rows with 17 significant digits.
pub fn format_csv(curves: &[&Curve]) -> String {
    let mut out = String::from("x,y,label\n");
    for c in curves {
        for (x, y) in c.x.iter().zip(&c.y) {
            let _ = writeln!(out, "{:.16e},{:.16e},{}", x, y, c.label);
        }
    }
    out
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

pub fn read_coefficients(path: &Path) -> Result<TruncatedSeries> {
    parse_coefficients(&fs::read_to_string(path)?)
}
