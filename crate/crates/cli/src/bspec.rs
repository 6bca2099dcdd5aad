//! Symbol expressions: a `*`-separated product of atoms, each with an
//! optional `^k` power.
//!
//! Atoms are `b0`, `rational:num=[..],den=[..]`,
//! `blaschke:geometric:base=B,count=n`, `blaschke:zeros=[..]` and
//! `scalar:c`. Numbers are reals or complex literals `x+yi`. Error positions
//! are 1-based character columns.

use hbspace::blaschke::BlaschkeSpec;
use hbspace::spaces::{Atom, Factor, Symbol};
use hbspace::{Complex64, Error, Result};

/// Sampling density for the unit-ball check on the composed symbol.
const CHECK_POINTS: usize = 4096;
const UNIT_BALL_SLACK: f64 = 1e-10;

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

/// A slice of the input together with its 0-based start offset.
#[derive(Clone, Copy)]
struct Span<'a> {
    text: &'a str,
    start: usize,
}

impl<'a> Span<'a> {
    fn column(&self) -> usize {
        self.start + 1
    }

    fn trim(self) -> Span<'a> {
        let lead = self.text.len() - self.text.trim_start().len();
        Span {
            text: self.text.trim(),
            start: self.start + lead,
        }
    }

    fn sub(&self, from: usize, to: usize) -> Span<'a> {
        Span {
            text: &self.text[from..to],
            start: self.start + from,
        }
    }

    /// Splits on `sep` outside square brackets.
    fn split_top(&self, sep: char) -> Vec<Span<'a>> {
        let mut parts = Vec::new();
        let (mut depth, mut last) = (0i32, 0);
        for (i, c) in self.text.char_indices() {
            match c {
                '[' => depth += 1,
                ']' => depth -= 1,
                c if c == sep && depth == 0 => {
                    parts.push(self.sub(last, i));
                    last = i + c.len_utf8();
                }
                _ => {}
            }
        }
        parts.push(self.sub(last, self.text.len()));
        parts
    }
}

fn parse_real(s: Span) -> Result<f64> {
    let s = s.trim();
    s.text
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| err(s.column(), format!("`{}` is not a finite number", s.text)))
}

/// `x`, `yi` or `x±yi`.
fn parse_complex(s: Span) -> Result<Complex64> {
    let s = s.trim();
    let Some(body) = s.text.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(s)?, 0.0));
    };
    // the imaginary part starts at the last sign not opening an exponent
    let split = body
        .char_indices()
        .filter(|&(i, c)| (c == '+' || c == '-') && i > 0 && !matches!(&body[i - 1..i], "e" | "E"))
        .map(|(i, _)| i)
        .next_back();
    let body = Span { text: body, start: s.start };
    let (re, im) = match split {
        Some(i) => (parse_real(body.sub(0, i))?, body.sub(i, body.text.len())),
        None => (0.0, body),
    };
    let im = match im.text.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => parse_real(im)?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_list(s: Span) -> Result<Vec<Complex64>> {
    let s = s.trim();
    let inner = s
        .text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| err(s.column(), "expected a bracketed list `[..]`"))?;
    let inner = Span {
        text: inner,
        start: s.start + 1,
    };
    if inner.text.trim().is_empty() {
        return Err(err(inner.column(), "empty list"));
    }
    inner.split_top(',').into_iter().map(parse_complex).collect()
}

/// `key=value` pairs separated by top-level commas.
fn parse_keys<'a>(s: Span<'a>, keys: &[&str]) -> Result<Vec<Span<'a>>> {
    let mut found: Vec<Option<Span>> = vec![None; keys.len()];
    for part in s.split_top(',') {
        let part = part.trim();
        let eq = part
            .text
            .find('=')
            .ok_or_else(|| err(part.column(), "expected `key=value`"))?;
        let key = part.text[..eq].trim();
        let slot = keys
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| err(part.column(), format!("unknown key `{key}`")))?;
        if found[slot].is_some() {
            return Err(err(part.column(), format!("duplicate key `{key}`")));
        }
        found[slot] = Some(part.sub(eq + 1, part.text.len()));
    }
    keys.iter()
        .zip(found)
        .map(|(k, v)| v.ok_or_else(|| err(s.column(), format!("missing key `{k}`"))))
        .collect()
}

fn located(e: Error, column: usize) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => err(column, other.to_string()),
    }
}

fn parse_atom(s: Span) -> Result<Atom> {
    let s = s.trim();
    let col = s.column();
    if s.text == "b0" {
        return Ok(Atom::b0());
    }
    if let Some(rest) = s.text.strip_prefix("scalar:") {
        let v = s.sub(s.text.len() - rest.len(), s.text.len());
        return Ok(Atom::Scalar(parse_complex(v)?));
    }
    if let Some(rest) = s.text.strip_prefix("rational:") {
        let body = s.sub(s.text.len() - rest.len(), s.text.len());
        let v = parse_keys(body, &["num", "den"])?;
        return Ok(Atom::Rational {
            num: parse_list(v[0])?,
            den: parse_list(v[1])?,
        });
    }
    if let Some(rest) = s.text.strip_prefix("blaschke:geometric:") {
        let body = s.sub(s.text.len() - rest.len(), s.text.len());
        let v = parse_keys(body, &["base", "count"])?;
        let base = parse_real(v[0])?;
        let count_span = v[1].trim();
        let count: usize = count_span
            .text
            .parse()
            .map_err(|_| err(count_span.column(), "count must be a nonnegative integer"))?;
        let spec = BlaschkeSpec::geometric(base, count, 1).map_err(|e| located(e, col))?;
        return Ok(Atom::Blaschke(spec));
    }
    if let Some(rest) = s.text.strip_prefix("blaschke:") {
        let body = s.sub(s.text.len() - rest.len(), s.text.len());
        let v = parse_keys(body, &["zeros"])?;
        let zeros = parse_list(v[0])?;
        if let Some(i) = zeros.iter().position(|z| z.im != 0.0) {
            return Err(err(v[0].column(), format!("zero {} must be real", i + 1)));
        }
        let zeros: Vec<f64> = zeros.iter().map(|z| z.re).collect();
        let spec = BlaschkeSpec::from_zeros(&zeros, 1).map_err(|e| located(e, col))?;
        return Ok(Atom::Blaschke(spec));
    }
    Err(err(col, format!("unknown atom `{}`", s.text)))
}

fn parse_factor(s: Span) -> Result<Factor> {
    let s = s.trim();
    if s.text.is_empty() {
        return Err(err(s.column(), "empty factor"));
    }
    let parts = s.split_top('^');
    let (atom, power) = match parts.as_slice() {
        [atom] => (*atom, 1),
        [atom, p] => {
            let p = p.trim();
            let power = p
                .text
                .parse::<u32>()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| err(p.column(), "power must be a positive integer"))?;
            (*atom, power)
        }
        [_, _, extra, ..] => return Err(err(extra.column(), "repeated `^`")),
        [] => unreachable!("split yields at least one part"),
    };
    Ok(Factor {
        atom: parse_atom(atom)?,
        power,
    })
}

/// Parses a symbol expression and checks `sup |b| ≤ 1` on the circle.
pub fn parse_bspec(text: &str) -> Result<Symbol> {
    let whole = Span { text, start: 0 };
    if text.trim().is_empty() {
        return Err(err(1, "empty expression"));
    }
    let factors = whole
        .split_top('*')
        .into_iter()
        .map(parse_factor)
        .collect::<Result<Vec<_>>>()?;
    let symbol = Symbol::new(factors).map_err(|e| located(e, 1))?;
    let sup_sq = (0..CHECK_POINTS)
        .map(|m| symbol.boundary_modulus_sq(std::f64::consts::TAU * m as f64 / CHECK_POINTS as f64))
        .fold(0.0, f64::max);
    if sup_sq > (1.0 + UNIT_BALL_SLACK).powi(2) {
        return Err(Error::NotInUnitBall { sup: sup_sq.sqrt() });
    }
    Ok(symbol)
}
