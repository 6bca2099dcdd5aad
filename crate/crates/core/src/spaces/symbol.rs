//! Symbols `b` given as finite products of closed-form atoms.
//!
//! A truncated Taylor series of a Blaschke product with zeros near 1 is far
//! from unimodular on the circle at any practical degree, so boundary moduli
//! are evaluated from the closed forms while Taylor coefficients are exact
//! up to the truncation degree.

use num_complex::Complex64;

use crate::blaschke::{blaschke_series, BlaschkeSpec};
use crate::error::{Error, Result};
use crate::series::{cauchy_product, series_reciprocal, TruncatedSeries};
use crate::TAU;

#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    /// `num(z)/den(z)` with polynomial coefficients in increasing degree.
    Rational {
        num: Vec<Complex64>,
        den: Vec<Complex64>,
    },
    Blaschke(BlaschkeSpec),
    Scalar(Complex64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub atom: Atom,
    pub power: u32,
}

/// A product of atoms raised to positive integer powers.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    factors: Vec<Factor>,
}

fn poly_eval(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * z + x)
}

impl Atom {
    /// `τz/(1 − τ²z)`.
    pub fn b0() -> Atom {
        Atom::Rational {
            num: vec![Complex64::new(0.0, 0.0), Complex64::new(TAU, 0.0)],
            den: vec![Complex64::new(1.0, 0.0), Complex64::new(-TAU * TAU, 0.0)],
        }
    }

    fn validate(&self) -> Result<()> {
        if let Atom::Rational { num, den } = self {
            if num.is_empty() || den.is_empty() {
                return Err(Error::InvalidArgument("rational atom needs coefficients".into()));
            }
            if num.iter().chain(den).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NonFinite("rational atom coefficients"));
            }
            // The denominator must not vanish on the closed disk: its winding
            // number around the circle counts its zeros inside.
            let samples = 4096;
            let mut winding = 0.0;
            let mut prev = poly_eval(den, Complex64::new(1.0, 0.0));
            let mut min_mod = prev.norm();
            for m in 1..=samples {
                let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / samples as f64);
                let v = poly_eval(den, z);
                winding += (v / prev).arg();
                min_mod = min_mod.min(v.norm());
                prev = v;
            }
            let scale = den.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if min_mod <= 1e-12 * scale || winding.abs() > 1.0 {
                return Err(Error::InvalidArgument(
                    "rational denominator vanishes in the closed unit disk".into(),
                ));
            }
        }
        Ok(())
    }

    fn taylor(&self, n: usize) -> Result<TruncatedSeries> {
        match self {
            Atom::Rational { num, den } => {
                let num = TruncatedSeries::new(num.clone())?;
                let den = TruncatedSeries::new(den.clone())?;
                Ok(cauchy_product(&num, &series_reciprocal(&den, n)?, n))
            }
            Atom::Blaschke(spec) => Ok(blaschke_series(spec, n)),
            Atom::Scalar(c) => Ok(TruncatedSeries::constant(*c, n)),
        }
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Atom::Rational { num, den } => poly_eval(num, z) / poly_eval(den, z),
            Atom::Blaschke(spec) => spec.eval(z),
            Atom::Scalar(c) => *c,
        }
    }

    fn boundary_modulus_sq(&self, theta: f64) -> f64 {
        match self {
            // inner: unimodular on the circle
            Atom::Blaschke(_) => 1.0,
            _ => self.eval(Complex64::from_polar(1.0, theta)).norm_sqr(),
        }
    }
}

impl Symbol {
    pub fn new(factors: Vec<Factor>) -> Result<Symbol> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("symbol needs at least one factor".into()));
        }
        for f in &factors {
            if f.power == 0 {
                return Err(Error::InvalidArgument("factor power must be at least 1".into()));
            }
            f.atom.validate()?;
        }
        Ok(Symbol { factors })
    }

    pub fn atom(atom: Atom) -> Result<Symbol> {
        Symbol::new(vec![Factor { atom, power: 1 }])
    }

    /// `τz/(1 − τ²z)`.
    pub fn b0() -> Symbol {
        Symbol {
            factors: vec![Factor {
                atom: Atom::b0(),
                power: 1,
            }],
        }
    }

    /// `b₀ B²` with `B` the Blaschke product of the given zeros.
    pub fn b0_times_blaschke_sq(spec: &BlaschkeSpec) -> Symbol {
        Symbol {
            factors: vec![
                Factor {
                    atom: Atom::b0(),
                    power: 1,
                },
                Factor {
                    atom: Atom::Blaschke(spec.clone()),
                    power: 2,
                },
            ],
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn taylor(&self, n: usize) -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::constant(Complex64::new(1.0, 0.0), n);
        for f in &self.factors {
            let s = f.atom.taylor(n)?;
            for _ in 0..f.power {
                acc = cauchy_product(&acc, &s, n);
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.factors
            .iter()
            .map(|f| f.atom.eval(z).powu(f.power))
            .product()
    }

    /// `|b(e^{iθ})|²` from the closed forms.
    pub fn boundary_modulus_sq(&self, theta: f64) -> f64 {
        self.factors
            .iter()
            .map(|f| f.atom.boundary_modulus_sq(theta).powi(f.power as i32))
            .product()
    }
}
