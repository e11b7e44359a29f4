use std::fmt;

use crate::exact::Polynomial;
use crate::{Error, Result};

/// A strictly convex function on the moment polytope.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexPotential {
    /// `|u|^2 / 2`.
    Quadratic,
    Polynomial(PolynomialPotential),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    f: Polynomial,
    gradient: Vec<Polynomial>,
    hessian: Vec<Vec<Polynomial>>,
}

impl ConvexPotential {
    /// Accepts `quadratic` or a polynomial in `u1..un` with nonnegative
    /// exponents. Convexity is checked later, on a quadrature grid.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "quadratic" {
            return Ok(ConvexPotential::Quadratic);
        }
        ConvexPotential::polynomial(Polynomial::parse(n, text)?)
    }

    pub fn polynomial(f: Polynomial) -> Result<Self> {
        if f.exponents().flat_map(|e| e.entries()).any(|&a| a < 0) {
            return Err(Error::Config("a potential must not have negative exponents".into()));
        }
        let n = f.nvars();
        let gradient: Vec<Polynomial> = (0..n).map(|i| f.derivative(i)).collect();
        let hessian = gradient
            .iter()
            .map(|g| (0..n).map(|j| g.derivative(j)).collect())
            .collect();
        Ok(ConvexPotential::Polynomial(PolynomialPotential { f, gradient, hessian }))
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        match self {
            ConvexPotential::Quadratic => 0.5 * u.iter().map(|x| x * x).sum::<f64>(),
            ConvexPotential::Polynomial(p) => p.f.eval_f64(u),
        }
    }

    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        match self {
            ConvexPotential::Quadratic => u.to_vec(),
            ConvexPotential::Polynomial(p) => p.gradient.iter().map(|g| g.eval_f64(u)).collect(),
        }
    }

    pub fn hessian(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let n = u.len();
        match self {
            ConvexPotential::Quadratic => (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            ConvexPotential::Polynomial(p) => p
                .hessian
                .iter()
                .map(|row| row.iter().map(|h| h.eval_f64(u)).collect())
                .collect(),
        }
    }

    /// Positive-definite Hessian by Sylvester's criterion.
    pub fn strictly_convex_at(&self, u: &[f64]) -> bool {
        let h = self.hessian(u);
        (1..=h.len()).all(|k| leading_minor(&h, k) > 0.0)
    }

    /// `B(u, m) = f(u) - f(m) - <grad f(m), u - m>`, clamped at zero.
    pub fn bregman_unchecked(&self, u: &[f64], m: &[f64]) -> f64 {
        if let ConvexPotential::Quadratic = self {
            return 0.5 * u.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        let g = self.gradient(m);
        let lin: f64 = g.iter().zip(u.iter().zip(m)).map(|(gi, (a, b))| gi * (a - b)).sum();
        (self.value(u) - self.value(m) - lin).max(0.0)
    }
}

impl fmt::Display for ConvexPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvexPotential::Quadratic => f.write_str("quadratic"),
            ConvexPotential::Polynomial(p) => write!(f, "{}", p.f),
        }
    }
}

fn leading_minor(h: &[Vec<f64>], k: usize) -> f64 {
    match k {
        1 => h[0][0],
        2 => h[0][0] * h[1][1] - h[0][1] * h[1][0],
        _ => {
            h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
                + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_divergence() {
        let q = ConvexPotential::Quadratic;
        assert_eq!(q.bregman_unchecked(&[1.0], &[1.0]), 0.0);
        assert_eq!(q.bregman_unchecked(&[1.0], &[0.0]), 0.5);
        assert_eq!(q.bregman_unchecked(&[1.0, 1.0], &[0.0, 0.0]), 1.0);
    }

    #[test]
    fn polynomial_matches_quadratic() {
        let p = ConvexPotential::parse(2, "1/2*u1^2 + 1/2*u2^2").unwrap();
        let q = ConvexPotential::Quadratic;
        for (u, m) in [([0.3, 1.2], [1.0, 0.5]), ([2.0, 0.0], [0.0, 2.0])] {
            assert!((p.bregman_unchecked(&u, &m) - q.bregman_unchecked(&u, &m)).abs() < 1e-14);
        }
        assert!(p.strictly_convex_at(&[0.4, 0.1]));
    }

    #[test]
    fn convexity() {
        let c = ConvexPotential::parse(1, "1/2*u1^2 + 1/6*u1^3").unwrap();
        assert!(c.strictly_convex_at(&[0.0]));
        assert!(!c.strictly_convex_at(&[-1.0]));
        let saddle = ConvexPotential::parse(2, "u1^2 - u2^2").unwrap();
        assert!(!saddle.strictly_convex_at(&[0.0, 0.0]));
        assert!(ConvexPotential::parse(1, "u1^-1").is_err());
        assert_eq!(ConvexPotential::parse(1, " quadratic ").unwrap(), ConvexPotential::Quadratic);
    }
}
