//! Explicit toric degeneration data from a Khovanskii basis: one monomial
//! lift per value of `S_d`, integer weights, the coordinates of the family
//! embedding, the special fiber's lattice data, and checks of the
//! hypotheses the quantization statement needs.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::body::{self, LatticePointSet, PointClass, RationalPolytope};
use crate::exact::{Exponent, GroupOrder, Polynomial, Rational};
use crate::linalg;
use crate::semigroup::{khovanskii_check, level_space, level_values, KhovanskiiBasis, SectionSpace};
use crate::valuation::{GradedValue, Valuation};
use crate::{Error, Result};

/// A monomial `prod f_ij^{alpha_ij}` of degree `d` whose value is `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialLift {
    pub target: Exponent,
    /// One exponent per basis element, in basis order.
    pub exponents: Vec<u32>,
}

impl MonomialLift {
    pub fn degree(&self, basis: &KhovanskiiBasis) -> u32 {
        self.exponents
            .iter()
            .zip(basis.elements())
            .map(|(a, (i, _))| a * i)
            .sum()
    }

    /// The section `prod f_ij^{alpha_ij}`.
    pub fn section(&self, basis: &KhovanskiiBasis) -> Polynomial {
        let n = basis.elements()[0].1.nvars();
        self.exponents
            .iter()
            .zip(basis.elements())
            .fold(Polynomial::one(n), |acc, (&a, (_, f))| {
                acc.try_mul(&f.pow(a)).expect("same dimension")
            })
    }
}

/// For every `s` in `S_d`, the lexicographically smallest exponent vector
/// `alpha` (over the basis order) with degree `d` and value `s`.
pub fn choose_monomial_lifts(
    basis: &KhovanskiiBasis,
    val: &Valuation,
    e: &SectionSpace,
    d: u32,
) -> Result<Vec<MonomialLift>> {
    let targets = level_values(val, &level_space(e, d)?)?;
    let values = basis.values();
    let mut dead: HashSet<(usize, u32, Exponent)> = HashSet::new();
    targets
        .into_iter()
        .map(|s| {
            let mut alpha = vec![0u32; values.len()];
            if search(values, 0, d, &s, &mut alpha, &mut dead) {
                Ok(MonomialLift { target: s, exponents: alpha })
            } else {
                Err(Error::KhovanskiiViolation { level: d, value: s })
            }
        })
        .collect()
}

fn search(
    values: &[GradedValue],
    j: usize,
    degree_left: u32,
    value_left: &Exponent,
    alpha: &mut [u32],
    dead: &mut HashSet<(usize, u32, Exponent)>,
) -> bool {
    if j == values.len() {
        return degree_left == 0 && value_left.is_zero();
    }
    let key = (j, degree_left, value_left.clone());
    if dead.contains(&key) {
        return false;
    }
    let level = values[j].level;
    let max = degree_left / level;
    for a in 0..=max {
        let rest = value_left - &values[j].value.scaled(a as i64);
        alpha[j] = a;
        if search(values, j + 1, degree_left - a * level, &rest, alpha, dead) {
            return true;
        }
    }
    alpha[j] = 0;
    dead.insert(key);
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Weights {
    pub covector: Vec<i64>,
    /// `w_ij = <covector, value(f_ij / h^i)>`, in basis order.
    pub weights: Vec<i64>,
}

/// Integer covector compatible with the valuation order on a box of the
/// given coordinate spread: `M^(n-1), ..., M, 1` for lex, with a leading
/// degree block for graded and weighted orders.
pub fn default_covector(order: &GroupOrder, n: usize, spread: i64) -> Vec<i64> {
    let m = spread.max(0) + 1;
    let lex: Vec<i64> = (0..n).map(|k| m.pow((n - 1 - k) as u32)).collect();
    let top = m.pow(n as u32);
    match order {
        GroupOrder::Lex => lex,
        GroupOrder::GradedLex => lex.iter().map(|x| top + x).collect(),
        GroupOrder::Weighted(w) => lex.iter().zip(w).map(|(x, wi)| wi * top + x).collect(),
    }
}

fn coordinate_spread<'a>(values: impl Iterator<Item = &'a Exponent> + Clone, n: usize) -> i64 {
    (0..n)
        .map(|k| {
            let coords = values.clone().map(|v| v.entries()[k]);
            coords.clone().max().unwrap_or(0) - coords.min().unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

pub fn assign_weights(basis: &KhovanskiiBasis, val: &Valuation, covector: Option<&[i64]>) -> Result<Weights> {
    let n = val.dim();
    let covector = match covector {
        Some(c) if c.len() != n => {
            return Err(Error::Dimension {
                expected: n,
                found: c.len(),
            })
        }
        Some(c) => c.to_vec(),
        None => {
            let spread = coordinate_spread(basis.values().iter().map(|g| &g.value), n);
            default_covector(val.order(), n, spread)
        }
    };
    let weights = basis.values().iter().map(|g| g.value.dot(&covector)).collect();
    Ok(Weights { covector, weights })
}

/// Everything needed to write down the family embedding at degree `d`.
#[derive(Debug, Clone)]
pub struct DegenerationSpec {
    pub d: u32,
    pub valuation: Valuation,
    pub basis: KhovanskiiBasis,
    pub lifts: Vec<MonomialLift>,
    pub weights: Weights,
    pub dim_ed: usize,
    /// `S_1..S_d` of the presented section ring.
    pub levels: BTreeMap<u32, BTreeSet<Exponent>>,
}

impl DegenerationSpec {
    /// Verifies the Khovanskii property through level `d`, then chooses
    /// lifts and weights.
    pub fn build(
        val: &Valuation,
        e: &SectionSpace,
        basis: KhovanskiiBasis,
        d: u32,
        covector: Option<&[i64]>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::Input("degeneration degree must be positive".into()));
        }
        let report = khovanskii_check(&basis, val, e, d)?;
        if let Some(level) = report.first_failing_level {
            let value = report.missing.iter().next().cloned().expect("missing value");
            return Err(Error::KhovanskiiViolation { level, value });
        }
        if let Some(&i) = report.outside_ring.first() {
            return Err(Error::Input(format!(
                "basis element {i} does not lie in the section space of its degree"
            )));
        }
        let lifts = choose_monomial_lifts(&basis, val, e, d)?;
        let spaces = crate::semigroup::level_spaces(e, d)?;
        let levels: BTreeMap<u32, BTreeSet<Exponent>> = spaces
            .iter()
            .map(|s| Ok((s.level(), level_values(val, s)?)))
            .collect::<Result<_>>()?;
        let default;
        let covector = match covector {
            Some(c) => Some(c),
            None => {
                let spread = coordinate_spread(lifts.iter().map(|l| &l.target), val.dim());
                default = default_covector(val.order(), val.dim(), spread);
                Some(default.as_slice())
            }
        };
        let weights = assign_weights(&basis, val, covector)?;
        Ok(DegenerationSpec {
            d,
            valuation: val.clone(),
            dim_ed: spaces[d as usize - 1].dim(),
            basis,
            lifts,
            weights,
            levels,
        })
    }

    pub fn s_d(&self) -> BTreeSet<Exponent> {
        self.lifts.iter().map(|l| l.target.clone()).collect()
    }

    /// t-weight of coordinate `s`: `sum w_ij alpha_ij`.
    pub fn coordinate_weight(&self, lift: &MonomialLift) -> i64 {
        lift.exponents
            .iter()
            .zip(&self.weights.weights)
            .map(|(&a, w)| a as i64 * w)
            .sum()
    }

    /// Recomputes each lift's graded value through the valuation; returns
    /// the lifts whose value is not `(d, s)`.
    pub fn value_mismatches(&self) -> Result<Vec<Exponent>> {
        let mut bad = Vec::new();
        for lift in &self.lifts {
            if lift.degree(&self.basis) != self.d {
                bad.push(lift.target.clone());
                continue;
            }
            let g = self.valuation.graded_value(&lift.section(&self.basis), self.d)?;
            if g != GradedValue::new(self.d, lift.target.clone()) {
                bad.push(lift.target.clone());
            }
        }
        Ok(bad)
    }

    /// Labels sharing a t-weight with another coordinate.
    pub fn weight_collisions(&self) -> Vec<Exponent> {
        let mut seen: BTreeMap<i64, usize> = BTreeMap::new();
        for l in &self.lifts {
            *seen.entry(self.coordinate_weight(l)).or_default() += 1;
        }
        self.lifts
            .iter()
            .filter(|l| seen[&self.coordinate_weight(l)] > 1)
            .map(|l| l.target.clone())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyCoordinate {
    pub label: Exponent,
    pub weight: i64,
    pub formula: String,
    #[serde(skip)]
    pub section: Polynomial,
}

/// The coordinates `t^{sum w alpha} prod f_ij^{alpha_ij}` of the map
/// `X x C* -> P((E^d)^*) x C*`, one per `s` in `S_d`, ordered by `s`.
pub fn family_coordinates(spec: &DegenerationSpec) -> Vec<FamilyCoordinate> {
    spec.lifts
        .iter()
        .map(|lift| {
            let weight = spec.coordinate_weight(lift);
            let mut factors = Vec::new();
            if weight != 0 {
                factors.push(format!("t^{weight}"));
            }
            for (&a, (_, f)) in lift.exponents.iter().zip(spec.basis.elements()) {
                match a {
                    0 => {}
                    1 => factors.push(format!("({f})")),
                    _ => factors.push(format!("({f})^{a}")),
                }
            }
            if factors.is_empty() {
                factors.push("1".into());
            }
            FamilyCoordinate {
                label: lift.target.clone(),
                weight,
                formula: factors.join("*"),
                section: lift.section(&spec.basis),
            }
        })
        .collect()
}

fn t_power(t: &Rational, w: i64) -> Result<Rational> {
    if t.is_zero() {
        return match w {
            0 => Ok(Rational::one()),
            w if w > 0 => Ok(Rational::zero()),
            _ => Err(Error::Pole("negative t-weight at t = 0".into())),
        };
    }
    let base = if w < 0 { t.recip() } else { t.clone() };
    Ok(num_traits::pow(base, w.unsigned_abs() as usize))
}

/// Exact projective coordinates of the family at `(x, t)`.
pub fn evaluate_family(spec: &DegenerationSpec, x: &[Rational], t: &Rational) -> Result<Vec<Rational>> {
    let coords = family_coordinates(spec)
        .iter()
        .map(|c| Ok(c.section.eval(x)? * t_power(t, c.weight)?))
        .collect::<Result<Vec<_>>>()?;
    if coords.iter().all(Zero::is_zero) {
        return Err(Error::BaseLocus);
    }
    Ok(coords)
}

/// Limit of the family point over a fixed `x` as `t -> 0`: the coordinates
/// of minimal weight among those not vanishing at `x`, the others zero.
pub fn limit_coordinates(spec: &DegenerationSpec, x: &[Rational]) -> Result<Vec<Rational>> {
    let coords = family_coordinates(spec);
    let values = coords
        .iter()
        .map(|c| c.section.eval(x))
        .collect::<Result<Vec<_>>>()?;
    let min = coords
        .iter()
        .zip(&values)
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, _)| c.weight)
        .min()
        .ok_or(Error::BaseLocus)?;
    Ok(coords
        .iter()
        .zip(values)
        .map(|(c, v)| if c.weight == min { v } else { Rational::zero() })
        .collect())
}

/// Labels of the coordinates surviving the `t -> 0` limit at a generic point.
pub fn initial_coordinates(spec: &DegenerationSpec) -> Vec<Exponent> {
    let coords = family_coordinates(spec);
    let min = coords.iter().map(|c| c.weight).min().unwrap_or(0);
    coords
        .into_iter()
        .filter(|c| c.weight == min)
        .map(|c| c.label)
        .collect()
}

/// Lattice data of the toric special fiber.
#[derive(Debug, Clone)]
pub struct BohrSommerfeldSet {
    /// `W_0 = S_d` with interior/boundary classes relative to `Delta_0`.
    pub w0: LatticePointSet,
    /// `Delta_0 = conv(S_d)`, the moment polytope of the orbit closure.
    pub delta0: RationalPolytope,
    pub delta0_lattice: LatticePointSet,
    /// `W_0` is a proper subset of `Delta_0 ∩ Z^n`.
    pub strict_inclusion: bool,
    /// Whether `Delta_0` coincides with `d` times the body of levels `<= d`.
    pub matches_scaled_body: bool,
    pub torus_weights: Vec<TorusWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusWeight {
    pub label: Exponent,
    /// Character of `T_0` on this coordinate.
    pub torus: Exponent,
    pub t_weight: i64,
}

pub fn special_fiber(spec: &DegenerationSpec) -> Result<BohrSommerfeldSet> {
    let s_d = spec.s_d();
    let points: Vec<Vec<Rational>> = s_d.iter().map(Exponent::to_rational).collect();
    let delta0 = body::hull(&points)?;
    let mut w0 = LatticePointSet::default();
    for s in &s_d {
        let class = body::classify(&delta0, s).unwrap_or(PointClass::Boundary);
        w0.points.insert(s.clone(), class);
    }
    let delta0_lattice = body::lattice_points(&delta0, 1)?;
    let strict_inclusion = s_d.len() < delta0_lattice.len();
    let body = body::okounkov_body(&body::build_cone(&spec.levels)?)?;
    let matches_scaled_body = body.scaled(&Rational::from_integer(spec.d.into())) == delta0;
    let torus_weights = spec
        .lifts
        .iter()
        .map(|l| TorusWeight {
            label: l.target.clone(),
            torus: l.target.clone(),
            t_weight: spec.coordinate_weight(l),
        })
        .collect();
    Ok(BohrSommerfeldSet {
        w0,
        delta0,
        delta0_lattice,
        strict_inclusion,
        matches_scaled_body,
        torus_weights,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Assumed,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Assumed => "assumed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisEntry {
    pub status: Status,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub e: HypothesisEntry,
    pub f: HypothesisEntry,
    pub g: HypothesisEntry,
    pub h: HypothesisEntry,
}

impl HypothesisReport {
    pub fn entries(&self) -> [(&'static str, &HypothesisEntry); 4] {
        [("e", &self.e), ("f", &self.f), ("g", &self.g), ("h", &self.h)]
    }
}

/// Laurent polynomial in one variable `t` as a map exponent -> coefficient.
fn substitute_one_parameter(f: &Polynomial, covector: &[i64]) -> BTreeMap<i64, Rational> {
    let mut out: BTreeMap<i64, Rational> = BTreeMap::new();
    for (e, c) in f.terms() {
        *out.entry(e.dot(covector)).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Hypothesis (e): along the one-parameter subgroup `u = t^covector`, each
/// coordinate section normalized to unit leading coefficient satisfies
/// `t^{-<covector, value>} f(t^covector) -> 1`, so the torus-normalized
/// image converges to `[1 : ... : 1]`; and the characters `S_d` span an
/// `n`-dimensional orbit.
fn check_orbit(spec: &DegenerationSpec) -> Result<HypothesisEntry> {
    let covector = &spec.weights.covector;
    let mut failures = Vec::new();
    for c in family_coordinates(spec) {
        let (v, lc) = spec.valuation.leading(&c.section)?;
        let series = substitute_one_parameter(&c.section.scale(&lc.recip()), covector);
        let lead = v.dot(covector);
        let ok = series.iter().next().is_some_and(|(k, coeff)| *k == lead && coeff.is_one());
        if !ok {
            failures.push(c.label.to_string());
        }
    }
    let diffs = linalg::differences(&spec.s_d());
    let (rank, _) = linalg::lattice_rank_and_index(&diffs);
    let n = spec.valuation.dim();
    let status = if failures.is_empty() && rank == n { Status::Pass } else { Status::Fail };
    let witness = if !failures.is_empty() {
        format!(
            "covector {:?} does not isolate the leading term of coordinates {}",
            covector,
            failures.join(", ")
        )
    } else if rank != n {
        format!("torus characters span rank {rank} < {n}")
    } else {
        format!(
            "{} distinct torus characters, orbit of dimension {n}; normalized limit along t^{:?} is [1:...:1]",
            spec.lifts.len(),
            covector
        )
    };
    Ok(HypothesisEntry { status, witness })
}

pub fn verify_hypotheses(spec: &DegenerationSpec, dim_h0: Option<usize>) -> Result<HypothesisReport> {
    let e = check_orbit(spec)?;
    let s_d = spec.s_d();
    let n = spec.valuation.dim();

    let f = match dim_h0 {
        None => HypothesisEntry {
            status: Status::Assumed,
            witness: "no dim H0 supplied; surjectivity of the restriction is assumed".into(),
        },
        Some(k) if k == spec.dim_ed => HypothesisEntry {
            status: Status::Pass,
            witness: format!("dim E^d = {k} = dim H0, so the coordinate sections restrict onto H0"),
        },
        Some(k) => HypothesisEntry {
            status: Status::Fail,
            witness: format!("dim E^d = {} but dim H0 = {k}", spec.dim_ed),
        },
    };

    let diffs = linalg::differences(&s_d);
    let g = if linalg::generates_full_lattice(&diffs, n) {
        HypothesisEntry {
            status: Status::Pass,
            witness: "differences of S_d generate Z^n".into(),
        }
    } else {
        let witness = match linalg::lattice_rank_and_index(&diffs) {
            (r, Some(idx)) if r == n => format!("differences of S_d generate a sublattice of index {idx}"),
            (r, _) => format!("differences of S_d span rank {r} < {n}"),
        };
        HypothesisEntry {
            status: Status::Fail,
            witness,
        }
    };

    let w0 = s_d.len();
    let h_ok = spec.dim_ed == w0 && dim_h0.is_none_or(|k| k == w0);
    let h = HypothesisEntry {
        status: if h_ok { Status::Pass } else { Status::Fail },
        witness: match dim_h0 {
            Some(k) => format!("dim E^d = {}, dim H0 = {k}, |W0| = {w0}", spec.dim_ed),
            None => format!("dim E^d = {}, |W0| = {w0}", spec.dim_ed),
        },
    };
    Ok(HypothesisReport { e, f, g, h })
}

/// Whether the lift sections have pairwise distinct graded values, which
/// makes them linearly independent.
pub fn distinct_coordinate_values(spec: &DegenerationSpec) -> Result<bool> {
    let mut seen = BTreeSet::new();
    for c in family_coordinates(spec) {
        if !seen.insert(spec.valuation.graded_value(&c.section, spec.d)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
