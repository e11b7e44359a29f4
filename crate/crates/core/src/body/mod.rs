//! The cone over the value semigroup, its level-1 slice (the
//! Newton-Okounkov body), exact hulls and lattice-point enumeration.

mod hull;
mod polytope;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::exact::{int, primitive_integer, Exponent, Rational};
use crate::{Error, Result};

pub use hull::hull;
pub use polytope::{Halfspace, RationalPolytope};

pub type Point = Vec<Rational>;

/// Closed convex cone in `R x R^n` given by its extreme rays `(level, v)`,
/// each a primitive integer vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCone {
    rays: Vec<Vec<BigInt>>,
}

impl RationalCone {
    pub fn new(rays: Vec<Vec<BigInt>>) -> Result<Self> {
        if rays.is_empty() {
            return Err(Error::DegenerateCone);
        }
        let width = rays[0].len();
        for r in &rays {
            if r.len() != width {
                return Err(Error::Dimension {
                    expected: width,
                    found: r.len(),
                });
            }
            if r.iter().all(Zero::is_zero) {
                return Err(Error::Input("cone rays must be nonzero".into()));
            }
        }
        Ok(RationalCone { rays })
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    /// Ambient dimension `n + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.rays[0].len()
    }
}

/// The cone generated by `{(d, v) : v in S_d}`.
pub fn build_cone(levels: &BTreeMap<u32, BTreeSet<Exponent>>) -> Result<RationalCone> {
    let slices: Vec<Point> = levels
        .iter()
        .filter(|(d, _)| **d > 0)
        .flat_map(|(&d, vals)| {
            vals.iter()
                .map(move |v| v.entries().iter().map(|&x| Rational::new(x.into(), d.into())).collect())
        })
        .collect();
    if slices.is_empty() {
        return Err(Error::DegenerateCone);
    }
    let slice = hull(&slices)?;
    let rays = slice
        .vertices()
        .iter()
        .map(|v| {
            let mut lifted = vec![int(1)];
            lifted.extend(v.iter().cloned());
            primitive_integer(&lifted)
        })
        .collect();
    RationalCone::new(rays)
}

/// The level-1 slice `conv{v / d : (d, v) a ray with d > 0}`.
pub fn okounkov_body(cone: &RationalCone) -> Result<RationalPolytope> {
    let points: Vec<Point> = cone
        .rays()
        .iter()
        .filter(|r| r[0].is_positive())
        .map(|r| {
            r[1..]
                .iter()
                .map(|x| Rational::new(x.clone(), r[0].clone()))
                .collect()
        })
        .collect();
    if points.is_empty() {
        return Err(Error::EmptySlice);
    }
    let body = hull(&points)?;
    body.cross_validate()?;
    Ok(body)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Interior,
    Boundary,
}

/// Lattice points of a polytope with their interior/boundary class.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LatticePointSet {
    pub points: BTreeMap<Exponent, PointClass>,
}

impl LatticePointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, e: &Exponent) -> bool {
        self.points.contains_key(e)
    }

    pub fn interior(&self) -> BTreeSet<Exponent> {
        self.with_class(PointClass::Interior)
    }

    pub fn boundary(&self) -> BTreeSet<Exponent> {
        self.with_class(PointClass::Boundary)
    }

    fn with_class(&self, c: PointClass) -> BTreeSet<Exponent> {
        self.points
            .iter()
            .filter(|(_, k)| **k == c)
            .map(|(e, _)| e.clone())
            .collect()
    }

    pub fn keys(&self) -> BTreeSet<Exponent> {
        self.points.keys().cloned().collect()
    }
}

/// Classifies a lattice point: interior when every facet inequality is
/// strict (relative to the affine hull for lower-dimensional polytopes).
pub fn classify(p: &RationalPolytope, e: &Exponent) -> Option<PointClass> {
    let x = e.to_rational();
    if !p.contains(&x) {
        return None;
    }
    Some(if p.in_relative_interior(&x) {
        PointClass::Interior
    } else {
        PointClass::Boundary
    })
}

/// `(d P) ∩ Z^n` by bounding-box scan and exact H-representation filtering.
pub fn lattice_points(p: &RationalPolytope, d: u32) -> Result<LatticePointSet> {
    if d == 0 {
        return Err(Error::Input("lattice_points needs a positive scale".into()));
    }
    let q = p.scaled(&int(d as i64));
    let bbox = q.bounding_box()?;
    let mut out = LatticePointSet::default();
    let mut cur = vec![0i64; bbox.len()];
    scan(&q, &bbox, 0, &mut cur, &mut out);
    Ok(out)
}

fn scan(q: &RationalPolytope, bbox: &[(i64, i64)], axis: usize, cur: &mut Vec<i64>, out: &mut LatticePointSet) {
    if axis == bbox.len() {
        let e = Exponent::new(cur.clone());
        if let Some(c) = classify(q, &e) {
            out.points.insert(e, c);
        }
        return;
    }
    for x in bbox[axis].0..=bbox[axis].1 {
        cur[axis] = x;
        scan(q, bbox, axis + 1, cur, out);
    }
}

/// The body from levels `<= d_max`, plus a monotonicity certificate
/// comparing it against the body from levels `<= d_max / 2`.
#[derive(Debug, Clone)]
pub struct BodyApproximation {
    pub body: RationalPolytope,
    pub cone: RationalCone,
    pub d_max: u32,
    /// Whether the half-range body equals the full one.
    pub stable: bool,
    /// Whether every smaller-range body is contained in the next.
    pub monotone: bool,
}

pub fn approximate_body(levels: &BTreeMap<u32, BTreeSet<Exponent>>) -> Result<BodyApproximation> {
    let d_max = levels.keys().next_back().copied().ok_or(Error::DegenerateCone)?;
    let mut previous: Option<RationalPolytope> = None;
    let mut monotone = true;
    let mut half = None;
    for cut in 1..=d_max {
        let sub: BTreeMap<u32, BTreeSet<Exponent>> =
            levels.range(..=cut).map(|(k, v)| (*k, v.clone())).collect();
        let Ok(cone) = build_cone(&sub) else { continue };
        let body = okounkov_body(&cone)?;
        if let Some(prev) = &previous {
            monotone &= body.contains_polytope(prev);
        }
        if cut == (d_max / 2).max(1) {
            half = Some(body.clone());
        }
        previous = Some(body);
    }
    let cone = build_cone(levels)?;
    let body = okounkov_body(&cone)?;
    Ok(BodyApproximation {
        stable: half.as_ref() == Some(&body),
        body,
        cone,
        d_max,
        monotone,
    })
}
