//! Lowest-term valuations on Laurent polynomials and their graded version.
//!
//! `value(f)` is the order-minimal exponent among the terms of `f`. This
//! satisfies the valuation axioms for any translation-invariant total order
//! and has one-dimensional leaves: two elements with the same value can be
//! cancelled against each other using the ratio of their leading
//! coefficients.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::exact::{Exponent, GroupOrder, Polynomial, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Valuation {
    order: GroupOrder,
    n: usize,
    reference: Polynomial,
    reference_value: Exponent,
}

/// The pair `(k, v)` recording a degree-`k` element and its shifted value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GradedValue {
    pub level: u32,
    pub value: Exponent,
}

impl GradedValue {
    pub fn new(level: u32, value: Exponent) -> Self {
        GradedValue { level, value }
    }
}

impl std::ops::Add for &GradedValue {
    type Output = GradedValue;
    fn add(self, rhs: &GradedValue) -> GradedValue {
        GradedValue::new(self.level + rhs.level, &self.value + &rhs.value)
    }
}

impl std::fmt::Display for GradedValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.level, self.value)
    }
}

impl Valuation {
    /// `reference` is the section `h` used to identify `f` of degree `k`
    /// with the rational function `f / h^k`.
    pub fn new(order: GroupOrder, n: usize, reference: Polynomial) -> Result<Self> {
        order.check_dim(n)?;
        if reference.nvars() != n {
            return Err(Error::Dimension {
                expected: n,
                found: reference.nvars(),
            });
        }
        if reference.is_zero() {
            return Err(Error::Input("the reference section h must be nonzero".into()));
        }
        let reference_value = lowest(&order, &reference).expect("nonzero");
        Ok(Valuation {
            order,
            n,
            reference,
            reference_value,
        })
    }

    /// Lex order with `h = 1`.
    pub fn lex(n: usize) -> Self {
        Self::new(GroupOrder::Lex, n, Polynomial::one(n)).expect("valid")
    }

    pub fn order(&self) -> &GroupOrder {
        &self.order
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn reference(&self) -> &Polynomial {
        &self.reference
    }

    pub fn reference_value(&self) -> &Exponent {
        &self.reference_value
    }

    fn check(&self, f: &Polynomial) -> Result<()> {
        if f.nvars() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: f.nvars(),
            });
        }
        Ok(())
    }

    pub fn value(&self, f: &Polynomial) -> Result<Exponent> {
        self.check(f)?;
        lowest(&self.order, f).ok_or(Error::ZeroValue)
    }

    /// Value of `f / h^k`, computed as `value(f) - k * value(h)`.
    pub fn graded_value(&self, f: &Polynomial, k: u32) -> Result<GradedValue> {
        let v = self.value(f)?;
        Ok(GradedValue::new(k, &v - &self.reference_value.scaled(k as i64)))
    }

    /// Leading term under the valuation: `(value, coefficient)`.
    pub fn leading(&self, f: &Polynomial) -> Result<(Exponent, Rational)> {
        let v = self.value(f)?;
        let c = f.coeff(&v);
        Ok((v, c))
    }

    /// The set `{value(f) : f in span(V), f != 0}`; its size is `dim span(V)`.
    pub fn value_image(&self, polys: &[Polynomial]) -> Result<BTreeSet<Exponent>> {
        let mut reducer = Triangular::new(self.order.clone());
        for f in polys {
            self.check(f)?;
            reducer.insert(f.clone());
        }
        Ok(reducer.values().cloned().collect())
    }

    /// Confirms the one-dimensional-leaves property on a finite family.
    pub fn check_one_dim_leaves(&self, family: &[Polynomial]) -> Result<LeavesReport> {
        let mut leading = Vec::with_capacity(family.len());
        for (i, f) in family.iter().enumerate() {
            self.check(f)?;
            if f.is_zero() {
                return Err(Error::Input(format!("element {i} of the family is zero")));
            }
            leading.push(self.leading(f)?);
        }
        let mut scalars = Vec::new();
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                if leading[i].0 != leading[j].0 {
                    continue;
                }
                let c = &leading[i].1 / &leading[j].1;
                let rest = family[i].sub_scaled(&c, &family[j]);
                let raised = rest.is_zero()
                    || self.order.cmp_unchecked(&self.value(&rest)?, &leading[i].0).is_gt();
                if !raised {
                    return Ok(LeavesReport {
                        holds: false,
                        witness: Some((i, j)),
                        scalars,
                    });
                }
                scalars.push(LeafScalar { first: i, second: j, scalar: c });
            }
        }
        Ok(LeavesReport {
            holds: true,
            witness: None,
            scalars,
        })
    }

    /// Index of the sublattice generated by observed values (surjectivity
    /// diagnostic): `None` when the values do not span `Z^n` rationally.
    pub fn value_lattice_index(&self, values: &BTreeSet<Exponent>) -> Option<num_bigint::BigInt> {
        let vectors: Vec<Vec<num_bigint::BigInt>> = values
            .iter()
            .map(|v| v.entries().iter().map(|&x| x.into()).collect())
            .collect();
        match crate::linalg::lattice_rank_and_index(&vectors) {
            (r, Some(idx)) if r == self.n => Some(idx),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafScalar {
    pub first: usize,
    pub second: usize,
    pub scalar: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeavesReport {
    pub holds: bool,
    /// Indices of the first pair that could not be separated.
    pub witness: Option<(usize, usize)>,
    /// For each equal-value pair, the scalar `c` with
    /// `value(first - c * second) > value(first)` (or the difference vanishes).
    pub scalars: Vec<LeafScalar>,
}

fn lowest(order: &GroupOrder, f: &Polynomial) -> Option<Exponent> {
    order.min(f.exponents()).cloned()
}

/// Incremental valuation-triangular basis: pivots are keyed by their
/// distinct values, and each inserted element is reduced by the pivots
/// until it vanishes or reaches a fresh value.
#[derive(Debug, Clone)]
pub(crate) struct Triangular {
    order: GroupOrder,
    pivots: HashMap<Exponent, Polynomial>,
}

impl Triangular {
    pub(crate) fn new(order: GroupOrder) -> Self {
        Triangular {
            order,
            pivots: HashMap::new(),
        }
    }

    pub(crate) fn reduce(&self, mut f: Polynomial) -> Polynomial {
        while let Some(v) = lowest(&self.order, &f) {
            let Some(p) = self.pivots.get(&v) else { break };
            let c = f.coeff(&v) / p.coeff(&v);
            f = f.sub_scaled(&c, p);
        }
        f
    }

    /// Returns the new value when `f` is independent of the current span.
    pub(crate) fn insert(&mut self, f: Polynomial) -> Option<Exponent> {
        let r = self.reduce(f);
        let v = lowest(&self.order, &r)?;
        self.pivots.insert(v.clone(), r);
        Some(v)
    }

    pub(crate) fn contains(&self, f: &Polynomial) -> bool {
        self.reduce(f.clone()).is_zero()
    }

    pub(crate) fn values(&self) -> impl Iterator<Item = &Exponent> {
        self.pivots.keys()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn p1(s: &str) -> Polynomial {
        Polynomial::parse(1, s).unwrap()
    }

    fn set(vals: &[i64]) -> BTreeSet<Exponent> {
        vals.iter().map(|&v| Exponent::new(vec![v])).collect()
    }

    #[test]
    fn value_examples() {
        let val = Valuation::lex(1);
        assert_eq!(val.value(&p1("u^2 + 3*u")).unwrap(), Exponent::new(vec![1]));
        assert_eq!(val.value(&p1("5")).unwrap(), Exponent::new(vec![0]));
        let val2 = Valuation::lex(2);
        let f = Polynomial::parse(2, "u1*u2 + u2^3").unwrap();
        assert_eq!(val2.value(&f).unwrap(), Exponent::new(vec![0, 3]));
        assert_eq!(val.value(&Polynomial::zero(1)), Err(Error::ZeroValue));
    }

    #[test]
    fn graded_value_examples() {
        let val = Valuation::lex(1);
        assert_eq!(
            val.graded_value(&p1("u^2"), 1).unwrap(),
            GradedValue::new(1, Exponent::new(vec![2]))
        );
        assert_eq!(
            val.graded_value(&p1("u").try_mul(&p1("u")).unwrap(), 2).unwrap(),
            GradedValue::new(2, Exponent::new(vec![2]))
        );
        let h = p1("u + u^3");
        let valh = Valuation::new(GroupOrder::Lex, 1, h.clone()).unwrap();
        for k in 0..4 {
            assert_eq!(
                valh.graded_value(&h.pow(k), k).unwrap(),
                GradedValue::new(k, Exponent::new(vec![0]))
            );
        }
        assert!(valh.graded_value(&Polynomial::zero(1), 2).is_err());
    }

    #[test]
    fn value_image_examples() {
        let val = Valuation::lex(1);
        assert_eq!(val.value_image(&[p1("1 + u"), p1("1 - u")]).unwrap(), set(&[0, 1]));
        assert_eq!(val.value_image(&[p1("u")]).unwrap(), set(&[1]));
        assert_eq!(val.value_image(&[p1("1 + u"), p1("2 + 2*u")]).unwrap(), set(&[0]));
        assert!(val.value_image(&[]).unwrap().is_empty());
    }

    #[test]
    fn leaves_examples() {
        let val = Valuation::lex(1);
        let r = val.check_one_dim_leaves(&[p1("u + u^2"), p1("2*u")]).unwrap();
        assert!(r.holds);
        assert_eq!(r.scalars[0].scalar, rat(1, 2));
        let r = val.check_one_dim_leaves(&[p1("2*u"), p1("u + u^2")]).unwrap();
        assert_eq!(r.scalars[0].scalar, int(2));
        let r = val.check_one_dim_leaves(&[p1("u"), p1("u^2")]).unwrap();
        assert!(r.holds && r.scalars.is_empty());
        let r = val.check_one_dim_leaves(&[p1("1 + u"), p1("3 + u")]).unwrap();
        assert!(r.holds);
        assert_eq!(r.scalars[0].scalar, rat(1, 3));
        // direct check: (1+u) - 1/3 (3+u) = 2/3 u has value 1 > 0
        let rest = p1("1 + u").sub_scaled(&rat(1, 3), &p1("3 + u"));
        assert_eq!(rest, p1("2/3*u"));
        assert!(val.check_one_dim_leaves(&[p1("u"), Polynomial::zero(1)]).is_err());
    }

    #[test]
    fn lattice_index_diagnostic() {
        let val = Valuation::lex(1);
        assert_eq!(val.value_lattice_index(&set(&[0, 2, 3])), Some(1.into()));
        assert_eq!(val.value_lattice_index(&set(&[0, 2, 4])), Some(2.into()));
        assert_eq!(val.value_lattice_index(&set(&[0])), None);
    }

    fn poly2() -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec((-9i64..10, 0i64..3, 0i64..3), 1..4).prop_map(|ts| {
            Polynomial::from_terms(2, ts.into_iter().map(|(c, a, b)| (int(c), Exponent::new(vec![a, b])))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn valuation_axioms(f in poly2(), g in poly2(), c in 1i64..7) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            let val = Valuation::lex(2);
            let (vf, vg) = (val.value(&f).unwrap(), val.value(&g).unwrap());
            prop_assert_eq!(val.value(&f.try_mul(&g).unwrap()).unwrap(), &vf + &vg);
            let sum = f.try_add(&g).unwrap();
            if !sum.is_zero() {
                let vs = val.value(&sum).unwrap();
                let m = if val.order().cmp_unchecked(&vf, &vg).is_le() { &vf } else { &vg };
                prop_assert!(val.order().cmp_unchecked(&vs, m).is_ge());
            }
            prop_assert_eq!(val.value(&f.scale(&rat(-c, 3))).unwrap(), vf);
        }

        #[test]
        fn graded_additivity(f in poly2(), g in poly2(), k in 0u32..4, l in 0u32..4) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            let h = Polynomial::parse(2, "u1 + u2^2").unwrap();
            let val = Valuation::new(GroupOrder::GradedLex, 2, h).unwrap();
            let lhs = val.graded_value(&f.try_mul(&g).unwrap(), k + l).unwrap();
            let rhs = &val.graded_value(&f, k).unwrap() + &val.graded_value(&g, l).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
