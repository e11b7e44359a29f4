//! Levels of the value semigroup, Khovanskii-basis verification and a
//! finite-generation probe.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::exact::{Exponent, GroupOrder, Polynomial};
use crate::linalg;
use crate::valuation::{GradedValue, Triangular, Valuation};
use crate::{Error, Result};

/// A basis of the degree-`level` piece `E^level` of the section ring.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSpace {
    level: u32,
    nvars: usize,
    basis: Vec<Polynomial>,
}

impl SectionSpace {
    /// Checks that the basis is nonzero, of one dimension, and linearly
    /// independent.
    pub fn new(level: u32, basis: Vec<Polynomial>) -> Result<Self> {
        let nvars = basis
            .first()
            .map(Polynomial::nvars)
            .ok_or_else(|| Error::Input("a section space needs at least one element".into()))?;
        for (i, f) in basis.iter().enumerate() {
            if f.nvars() != nvars {
                return Err(Error::Dimension {
                    expected: nvars,
                    found: f.nvars(),
                });
            }
            if f.is_zero() {
                return Err(Error::Input(format!("basis element {i} is zero")));
            }
        }
        if linalg::polynomial_rank(&basis) != basis.len() {
            return Err(Error::DependentBasis { degree: level });
        }
        Ok(SectionSpace { level, nvars, basis })
    }

    /// The degree-0 space spanned by the constant 1.
    pub fn constants(nvars: usize) -> Self {
        SectionSpace {
            level: 0,
            nvars,
            basis: vec![Polynomial::one(nvars)],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis of the product space `self * other`, chosen among the pairwise
    /// products in enumeration order.
    fn times(&self, other: &SectionSpace) -> SectionSpace {
        let mut tri = Triangular::new(GroupOrder::Lex);
        let mut basis = Vec::new();
        for f in &self.basis {
            for g in &other.basis {
                let fg = f.try_mul(g).expect("same dimension");
                if tri.insert(fg.clone()).is_some() {
                    basis.push(fg);
                }
            }
        }
        SectionSpace {
            level: self.level + other.level,
            nvars: self.nvars,
            basis,
        }
    }

    fn span(&self) -> Triangular {
        let mut tri = Triangular::new(GroupOrder::Lex);
        for f in &self.basis {
            tri.insert(f.clone());
        }
        tri
    }

    pub fn contains(&self, f: &Polynomial) -> bool {
        f.nvars() == self.nvars && self.span().contains(f)
    }
}

/// Basis of `E^d` built from `d`-fold products of the level-1 basis.
pub fn level_space(e: &SectionSpace, d: u32) -> Result<SectionSpace> {
    if e.level != 1 {
        return Err(Error::Input(format!(
            "level_space expects a level-1 space, got level {}",
            e.level
        )));
    }
    if d == 0 {
        return Ok(SectionSpace::constants(e.nvars));
    }
    let mut acc = e.clone();
    for _ in 1..d {
        acc = acc.times(e);
    }
    Ok(acc)
}

/// All spaces `E^1..=E^d_max`, built incrementally.
pub fn level_spaces(e: &SectionSpace, d_max: u32) -> Result<Vec<SectionSpace>> {
    let mut out: Vec<SectionSpace> = Vec::with_capacity(d_max as usize);
    for _ in 1..=d_max {
        let next = match out.last() {
            None => level_space(e, 1)?,
            Some(prev) => prev.times(e),
        };
        out.push(next);
    }
    Ok(out)
}

/// `S_d`: the values of `E^d`, shifted by `-d * value(h)`.
pub fn level_values(val: &Valuation, space: &SectionSpace) -> Result<BTreeSet<Exponent>> {
    let shift = val.reference_value().scaled(space.level as i64);
    Ok(val
        .value_image(space.basis())?
        .into_iter()
        .map(|v| &v - &shift)
        .collect())
}

/// Values `v` such that `(d, v)` is a finite sum of the generators.
pub fn semigroup_generated(gens: &[GradedValue], d: u32) -> BTreeSet<Exponent> {
    let Some(n) = gens.first().map(|g| g.value.dim()) else {
        return BTreeSet::new();
    };
    let mut reach: Vec<BTreeSet<Exponent>> = vec![BTreeSet::new(); d as usize + 1];
    reach[0].insert(Exponent::zero(n));
    for k in 1..=d as usize {
        let mut here = BTreeSet::new();
        for g in gens {
            let l = g.level as usize;
            if l == 0 || l > k {
                continue;
            }
            for v in &reach[k - l] {
                here.insert(v + &g.value);
            }
        }
        reach[k] = here;
    }
    reach.swap_remove(d as usize)
}

/// Levels `S_1..S_{d_max}` of the value semigroup.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueSemigroup {
    pub n: usize,
    pub levels: BTreeMap<u32, BTreeSet<Exponent>>,
    /// Values at each level not reachable as sums from lower levels.
    pub generators: Vec<GradedValue>,
    /// `dim E^d` per level.
    pub dims: BTreeMap<u32, usize>,
}

impl ValueSemigroup {
    pub fn compute(val: &Valuation, e: &SectionSpace, d_max: u32) -> Result<Self> {
        let spaces = level_spaces(e, d_max)?;
        let values: Vec<BTreeSet<Exponent>> = spaces
            .par_iter()
            .map(|s| level_values(val, s))
            .collect::<Result<_>>()?;
        let levels: BTreeMap<u32, BTreeSet<Exponent>> =
            (1..=d_max).zip(values).collect();
        let dims = spaces.iter().map(|s| (s.level, s.dim())).collect();
        let generators = minimal_generators(&levels);
        Ok(ValueSemigroup {
            n: e.nvars(),
            levels,
            generators,
            dims,
        })
    }

    pub fn level(&self, d: u32) -> Option<&BTreeSet<Exponent>> {
        self.levels.get(&d)
    }

    pub fn d_max(&self) -> u32 {
        self.levels.keys().next_back().copied().unwrap_or(0)
    }

    /// Pairs `(d, e)` with `S_d + S_e` not contained in `S_{d+e}`.
    pub fn additivity_violations(&self) -> Vec<(u32, u32)> {
        let mut bad = Vec::new();
        for (&d, sd) in &self.levels {
            for (&e, se) in self.levels.range(d..) {
                let Some(sde) = self.levels.get(&(d + e)) else { continue };
                let ok = sd.iter().all(|a| se.iter().all(|b| sde.contains(&(a + b))));
                if !ok {
                    bad.push((d, e));
                }
            }
        }
        bad
    }

    /// CSV rows `d,v1,...,vn`, one per value, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d");
        for i in 1..=self.n {
            let _ = write!(out, ",v{i}");
        }
        out.push('\n');
        for (d, vals) in &self.levels {
            for v in vals {
                let _ = write!(out, "{d}");
                for x in v.entries() {
                    let _ = write!(out, ",{x}");
                }
                out.push('\n');
            }
        }
        out
    }
}

fn minimal_generators(levels: &BTreeMap<u32, BTreeSet<Exponent>>) -> Vec<GradedValue> {
    let mut gens: Vec<GradedValue> = Vec::new();
    for (&d, vals) in levels {
        let reachable = semigroup_generated(&gens, d);
        for v in vals {
            if !reachable.contains(v) {
                gens.push(GradedValue::new(d, v.clone()));
            }
        }
    }
    gens
}

/// A candidate Khovanskii basis: homogeneous elements with their degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct KhovanskiiBasis {
    elements: Vec<(u32, Polynomial)>,
    values: Vec<GradedValue>,
}

impl KhovanskiiBasis {
    /// Elements of each degree must be nonzero and linearly independent.
    pub fn new(val: &Valuation, elements: Vec<(u32, Polynomial)>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Input("empty Khovanskii basis".into()));
        }
        let mut by_degree: BTreeMap<u32, Vec<Polynomial>> = BTreeMap::new();
        for (i, (deg, f)) in elements.iter().enumerate() {
            if *deg == 0 {
                return Err(Error::Input(format!("element {i} has degree 0")));
            }
            if f.is_zero() {
                return Err(Error::Input(format!("element {i} is zero")));
            }
            by_degree.entry(*deg).or_default().push(f.clone());
        }
        for (deg, fs) in &by_degree {
            if linalg::polynomial_rank(fs) != fs.len() {
                return Err(Error::DependentBasis { degree: *deg });
            }
        }
        let values = elements
            .iter()
            .map(|(deg, f)| val.graded_value(f, *deg))
            .collect::<Result<_>>()?;
        Ok(KhovanskiiBasis { elements, values })
    }

    /// The level-1 basis of `E`, all in degree 1.
    pub fn from_space(val: &Valuation, e: &SectionSpace) -> Result<Self> {
        Self::new(val, e.basis().iter().map(|f| (e.level(), f.clone())).collect())
    }

    pub fn elements(&self) -> &[(u32, Polynomial)] {
        &self.elements
    }

    pub fn values(&self) -> &[GradedValue] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.elements.iter().map(|e| e.0).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelCoverage {
    pub level: u32,
    pub expected: usize,
    pub generated: usize,
    pub missing: BTreeSet<Exponent>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KhovanskiiReport {
    pub pass: bool,
    pub d_max: u32,
    pub first_failing_level: Option<u32>,
    /// Values of `S_d` missed at the first failing level.
    pub missing: BTreeSet<Exponent>,
    pub levels: Vec<LevelCoverage>,
    /// Indices of elements that do not lie in `E^degree`.
    pub outside_ring: Vec<usize>,
    /// Degrees whose elements do not span the whole of `E^degree`.
    pub partial_degrees: Vec<u32>,
}

/// Checks that the values of `basis` generate `S_d` for every `d <= d_max`.
pub fn khovanskii_check(
    basis: &KhovanskiiBasis,
    val: &Valuation,
    e: &SectionSpace,
    d_max: u32,
) -> Result<KhovanskiiReport> {
    let top = d_max.max(basis.max_degree());
    let spaces = level_spaces(e, top)?;
    let mut outside_ring = Vec::new();
    let mut per_degree: BTreeMap<u32, usize> = BTreeMap::new();
    for (i, (deg, f)) in basis.elements().iter().enumerate() {
        *per_degree.entry(*deg).or_default() += 1;
        if !spaces[*deg as usize - 1].contains(f) {
            outside_ring.push(i);
        }
    }
    let partial_degrees = per_degree
        .iter()
        .filter(|(deg, count)| spaces[**deg as usize - 1].dim() != **count)
        .map(|(deg, _)| *deg)
        .collect();

    let levels: Vec<LevelCoverage> = (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let expected = level_values(val, &spaces[d as usize - 1])?;
            let generated = semigroup_generated(basis.values(), d);
            let missing: BTreeSet<Exponent> = expected.difference(&generated).cloned().collect();
            Ok(LevelCoverage {
                level: d,
                expected: expected.len(),
                generated: generated.len(),
                missing,
            })
        })
        .collect::<Result<_>>()?;
    let first = levels.iter().find(|l| !l.missing.is_empty());
    Ok(KhovanskiiReport {
        pass: first.is_none() && outside_ring.is_empty(),
        d_max,
        first_failing_level: first.map(|l| l.level),
        missing: first.map(|l| l.missing.clone()).unwrap_or_default(),
        levels,
        outside_ring,
        partial_degrees,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationProbe {
    /// Smallest `d*` whose generators reproduce every level up to `d_max`.
    pub stabilized_at: Option<u32>,
    pub d_max: u32,
    pub level_sizes: BTreeMap<u32, usize>,
    pub generators: Vec<GradedValue>,
    /// Always false: finitely many levels cannot certify finite generation.
    pub conclusive: bool,
    pub note: String,
}

/// Heuristic finite-generation check: looks for the smallest `d*` such that
/// the values at levels `<= d*` generate every level up to `d_max`.
pub fn finite_generation_probe(val: &Valuation, e: &SectionSpace, d_max: u32) -> Result<GenerationProbe> {
    if d_max < 2 {
        return Err(Error::Input("the generation probe needs d_max >= 2".into()));
    }
    let sg = ValueSemigroup::compute(val, e, d_max)?;
    let mut stabilized_at = None;
    for d_star in 1..d_max {
        let gens: Vec<GradedValue> = sg
            .levels
            .range(..=d_star)
            .flat_map(|(&k, vals)| vals.iter().map(move |v| GradedValue::new(k, v.clone())))
            .collect();
        let ok = (d_star + 1..=d_max).all(|d| semigroup_generated(&gens, d) == sg.levels[&d]);
        if ok {
            stabilized_at = Some(d_star);
            break;
        }
    }
    let note = match stabilized_at {
        Some(d) => format!(
            "heuristic: generators up to level {d} reproduce all levels up to {d_max}; not a proof of finite generation"
        ),
        None => format!("heuristic: no stabilization observed up to level {d_max}"),
    };
    Ok(GenerationProbe {
        stabilized_at,
        d_max,
        level_sizes: sg.levels.iter().map(|(d, v)| (*d, v.len())).collect(),
        generators: sg.generators,
        conclusive: false,
        note,
    })
}
