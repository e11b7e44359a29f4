use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::{int, short_literal, to_f64, Exponent, Rational};
use crate::{Error, Result};

/// Sparse Laurent polynomial in `u1..un` with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by exponent, so iteration (and
/// printing) runs in ascending lex order of exponents. Zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(c, Exponent::zero(nvars))
    }

    pub fn monomial(c: Rational, e: Exponent) -> Self {
        let mut p = Polynomial::zero(e.dim());
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// The variable `u{i+1}`.
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Rational::one(), Exponent::unit(nvars, i))
    }

    /// Builds a polynomial from `(coefficient, exponent)` pairs, combining
    /// repeated exponents.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Exponent)>,
    {
        let mut p = Polynomial::zero(nvars);
        for (c, e) in terms {
            e.check_dim(nvars)?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn exponents(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.keys()
    }

    pub fn coeff(&self, e: &Exponent) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// `Some(e)` when the polynomial is `c * u^e` for a single term.
    pub fn as_monomial(&self) -> Option<(&Exponent, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn check_same(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a * c))
                .collect(),
        }
    }

    /// Multiplies by the monomial `u^e`.
    pub fn shift(&self, e: &Exponent) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a + e, c.clone()))
                .collect(),
        }
    }

    /// `self - c * other`, the elimination step used by triangularization.
    pub(crate) fn sub_scaled(&self, c: &Rational, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, b) in &other.terms {
            out.add_term(e.clone(), -(c * b));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..k {
            acc = acc.try_mul(self).expect("same dimension");
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.entries()[var];
            if k != 0 {
                let mut ne = e.entries().to_vec();
                ne[var] -= 1;
                out.add_term(Exponent::new(ne), c * int(k));
            }
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e.entries()) {
                if k < 0 && x.is_zero() {
                    return Err(Error::Pole(format!("negative power of zero coordinate in term {e}")));
                }
                term *= pow_rational(x, k);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Floating-point evaluation; only meaningful away from poles.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = to_f64(c);
                for (x, &k) in point.iter().zip(e.entries()) {
                    t *= x.powi(k as i32);
                }
                t
            })
            .sum()
    }
}

fn pow_rational(x: &Rational, k: i64) -> Rational {
    let base = if k < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, k.unsigned_abs() as usize)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let mut factors = Vec::new();
            if !mag.is_one() || e.is_zero() {
                factors.push(short_literal(&mag));
            }
            for (v, &k) in e.entries().iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(format!("u{}", v + 1)),
                    _ => factors.push(format!("u{}^{}", v + 1, k)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.nvars, self)
    }
}

impl Polynomial {
    /// Parses the text syntax `3/2*u1^2*u2^-1 - u1 + 4`. For a single
    /// variable `u` is accepted as an alias of `u1`.
    pub fn parse(nvars: usize, text: &str) -> Result<Polynomial> {
        super::parse::parse_polynomial(nvars, text)
    }
}

/// Parses with the dimension inferred from the largest variable index.
impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = super::parse::max_variable(s).max(1);
        Polynomial::parse(n, s)
    }
}
