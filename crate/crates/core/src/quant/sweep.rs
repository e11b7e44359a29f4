use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::body::{LatticePointSet, PointClass};
use crate::exact::{to_f64, Exponent, Polynomial};
use crate::quant::{
    affinity_matrix, density, mass_outside, max_off_diagonal, weak_pairing, ConvexPotential, QuadratureGrid,
    Schedule,
};
use crate::{Error, Result};

/// Settings of a concentration sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantConfig {
    pub potential: ConvexPotential,
    pub s_start: f64,
    pub s_factor: f64,
    pub s_count: usize,
    pub eta: f64,
    pub epsilon: Vec<f64>,
    pub resolution: u32,
    pub t0: f64,
    pub test_sections: Vec<Polynomial>,
    /// Largest `s` tried by the threshold search.
    pub cap: f64,
}

impl QuantConfig {
    /// Quadratic potential, `s = 1, 2, ..., 1024`, `eta = 1/2`,
    /// `epsilon = 1e-3`, the coordinate functions as test sections.
    pub fn defaults(n: usize) -> Self {
        QuantConfig {
            potential: ConvexPotential::Quadratic,
            s_start: 1.0,
            s_factor: 2.0,
            s_count: 11,
            eta: 0.5,
            epsilon: vec![1e-3],
            resolution: 100,
            t0: 0.5,
            test_sections: (0..n).map(|i| Polynomial::var(n, i)).collect(),
            cap: (1u64 << 20) as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.s_start > 0.0 && self.s_start.is_finite()) {
            return bad(format!("s_start must be positive, got {}", self.s_start));
        }
        if !(self.s_factor > 1.0 && self.s_factor.is_finite()) {
            return bad(format!("s_factor must exceed 1, got {}", self.s_factor));
        }
        if self.s_count == 0 {
            return bad("s_count must be positive".into());
        }
        if self.eta.is_nan() || self.eta <= 0.0 {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if let Some(e) = self.epsilon.iter().find(|e| e.is_nan() || **e <= 0.0) {
            return bad(format!("epsilon must be positive, got {e}"));
        }
        if self.cap.is_nan() || self.cap < 1.0 {
            return bad(format!("cap must be at least 1, got {}", self.cap));
        }
        if self.resolution == 0 {
            return bad("resolution must be positive".into());
        }
        Schedule::new(self.t0)?;
        Ok(())
    }

    pub fn s_values(&self) -> Vec<f64> {
        (0..self.s_count)
            .map(|k| self.s_start * self.s_factor.powi(k as i32))
            .collect()
    }
}

/// Outcome of the threshold search for one `(epsilon, eta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub epsilon: f64,
    pub eta: f64,
    /// First sweep point meeting the bound, if any below the cap.
    pub s0: Option<f64>,
    /// Last `s` examined.
    pub last_s: f64,
    /// Mass outside the `eta`-ball per interior label at `last_s`.
    pub masses: Vec<(Exponent, f64)>,
}

fn interior_labels(w0: &LatticePointSet) -> Vec<Exponent> {
    w0.points
        .iter()
        .filter(|(_, c)| **c == PointClass::Interior)
        .map(|(e, _)| e.clone())
        .collect()
}

/// Smallest `s` in `1, 2, 4, ... <= cap` with `mass_outside < epsilon` for
/// every interior label.
pub fn find_s0(
    grid: &Arc<QuadratureGrid>,
    potential: &ConvexPotential,
    w0: &LatticePointSet,
    epsilon: f64,
    eta: f64,
    cap: f64,
) -> Result<ThresholdReport> {
    if !(epsilon > 0.0 && eta > 0.0) {
        return Err(Error::Config("epsilon and eta must be positive".into()));
    }
    let labels = interior_labels(w0);
    if labels.is_empty() {
        return Err(Error::Domain("no interior Bohr-Sommerfeld points".into()));
    }
    let mut s = 1.0;
    let mut masses = Vec::new();
    let mut last_s = s;
    while s <= cap {
        masses = labels
            .par_iter()
            .map(|m| Ok((m.clone(), mass_outside(&density(grid, potential, m, s)?, eta))))
            .collect::<Result<Vec<_>>>()?;
        last_s = s;
        if masses.iter().all(|(_, x)| *x < epsilon) {
            return Ok(ThresholdReport {
                epsilon,
                eta,
                s0: Some(s),
                last_s,
                masses,
            });
        }
        s *= 2.0;
    }
    Ok(ThresholdReport {
        epsilon,
        eta,
        s0: None,
        last_s,
        masses,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub s: f64,
    pub t: f64,
    pub m: Exponent,
    pub class: PointClass,
    pub mass_outside: f64,
    /// One entry per test section; absent at boundary labels.
    pub pairings: Option<Vec<f64>>,
    pub max_affinity: f64,
}

/// Log-log fit of `|pairing - tau(m)|` against `s` over the last decade.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub m: Exponent,
    pub tau: usize,
    /// Largest error over the fitted range.
    pub max_error: f64,
    /// `None` when every error is at rounding level.
    pub slope: Option<f64>,
    /// `C` in `|error| ~ C s^slope`.
    pub constant: Option<f64>,
}

const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<TraceRow>,
    pub test_sections: Vec<String>,
    /// Whether `mass_outside` is nonincreasing in `s`, per label.
    pub monotone: BTreeMap<Exponent, bool>,
    pub rates: Vec<RateFit>,
    pub thresholds: Vec<ThresholdReport>,
    pub notes: Vec<String>,
}

pub fn convergence_run(
    grid: &Arc<QuadratureGrid>,
    w0: &LatticePointSet,
    config: &QuantConfig,
) -> Result<ConvergenceReport> {
    config.validate()?;
    let n = grid.dim();
    for tau in &config.test_sections {
        if tau.nvars() != n {
            return Err(Error::Config(format!(
                "test section {tau} has {} variables, expected {n}",
                tau.nvars()
            )));
        }
    }
    if let Some(u) = grid.nodes().iter().find(|node| !config.potential.strictly_convex_at(&node.point)) {
        return Err(Error::Domain(format!(
            "potential {} is not strictly convex at {:?}",
            config.potential, u.point
        )));
    }
    let schedule = Schedule::new(config.t0)?;
    let labels: Vec<(Exponent, PointClass)> = w0.points.iter().map(|(e, c)| (e.clone(), *c)).collect();
    let s_values = config.s_values();

    let blocks: Vec<Vec<TraceRow>> = s_values
        .par_iter()
        .map(|&s| {
            let densities = labels
                .par_iter()
                .map(|(m, _)| density(grid, &config.potential, m, s))
                .collect::<Result<Vec<_>>>()?;
            let max_affinity = max_off_diagonal(&affinity_matrix(&densities)?);
            let t = schedule.t(s)?;
            labels
                .iter()
                .zip(&densities)
                .map(|((m, class), rho)| {
                    let pairings = match class {
                        PointClass::Interior => Some(
                            config
                                .test_sections
                                .iter()
                                .map(|tau| weak_pairing(rho, tau))
                                .collect::<Result<Vec<_>>>()?,
                        ),
                        PointClass::Boundary => None,
                    };
                    Ok(TraceRow {
                        s,
                        t,
                        m: m.clone(),
                        class: *class,
                        mass_outside: mass_outside(rho, config.eta),
                        pairings,
                        max_affinity,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<TraceRow> = blocks.into_iter().flatten().collect();

    let mut monotone = BTreeMap::new();
    for (m, _) in &labels {
        let masses: Vec<f64> = rows.iter().filter(|r| &r.m == m).map(|r| r.mass_outside).collect();
        monotone.insert(m.clone(), masses.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    let mut notes = Vec::new();
    let interior = interior_labels(w0);
    let mut rates = Vec::new();
    let mut thresholds = Vec::new();
    if interior.is_empty() {
        notes.push(
            "no interior Bohr-Sommerfeld points; boundary support diagnostics only, no pairing limits".to_string(),
        );
    } else {
        let s_last = *s_values.last().expect("nonempty sweep");
        for m in &interior {
            let mp: Vec<f64> = m.to_rational().iter().map(to_f64).collect();
            for (k, tau) in config.test_sections.iter().enumerate() {
                let target = tau.eval_f64(&mp);
                let errors: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| &r.m == m && r.s >= s_last / 10.0)
                    .filter_map(|r| Some((r.s, (r.pairings.as_ref()?[k] - target).abs())))
                    .collect();
                let max_error = errors.iter().map(|e| e.1).fold(0.0, f64::max);
                let fit = if errors.iter().all(|e| e.1 > NOISE_FLOOR) {
                    let logs: Vec<(f64, f64)> = errors.iter().map(|(s, e)| (s.ln(), e.ln())).collect();
                    least_squares(&logs)
                } else {
                    None
                };
                rates.push(RateFit {
                    m: m.clone(),
                    tau: k,
                    max_error,
                    slope: fit.map(|f| f.0),
                    constant: fit.map(|f| f.1.exp()),
                });
            }
        }
        for &eps in &config.epsilon {
            let report = find_s0(grid, &config.potential, w0, eps, config.eta, config.cap)?;
            if report.s0.is_none() {
                notes.push(format!(
                    "epsilon = {eps}: no threshold found up to s = {}",
                    report.last_s
                ));
            }
            thresholds.push(report);
        }
    }
    Ok(ConvergenceReport {
        rows,
        test_sections: config.test_sections.iter().map(ToString::to_string).collect(),
        monotone,
        rates,
        thresholds,
        notes,
    })
}

fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

impl ConvergenceReport {
    /// Columns `s, t_of_s, m1..mn, mass_outside, pairing_tau_1.., max_affinity`.
    /// Pairing cells are empty at boundary labels.
    pub fn to_csv(&self) -> String {
        let n = self.rows.first().map_or(0, |r| r.m.dim());
        let mut out = String::from("s,t_of_s");
        for i in 1..=n {
            let _ = write!(out, ",m{i}");
        }
        out.push_str(",mass_outside");
        for k in 1..=self.test_sections.len() {
            let _ = write!(out, ",pairing_tau_{k}");
        }
        out.push_str(",max_affinity\n");
        for r in &self.rows {
            let _ = write!(out, "{},{}", r.s, r.t);
            for x in r.m.entries() {
                let _ = write!(out, ",{x}");
            }
            let _ = write!(out, ",{}", r.mass_outside);
            for k in 0..self.test_sections.len() {
                match &r.pairings {
                    Some(p) => {
                        let _ = write!(out, ",{}", p[k]);
                    }
                    None => out.push(','),
                }
            }
            let _ = writeln!(out, ",{}", r.max_affinity);
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for t in &self.thresholds {
            match t.s0 {
                Some(s0) => {
                    let _ = writeln!(out, "epsilon = {}, eta = {}: s0 = {s0}", t.epsilon, t.eta);
                }
                None => {
                    let _ = writeln!(out, "epsilon = {}, eta = {}: s0 not found (last s = {})", t.epsilon, t.eta, t.last_s);
                }
            }
        }
        for (m, ok) in &self.monotone {
            let _ = writeln!(out, "m = {m}: mass_outside {}", if *ok { "nonincreasing" } else { "NOT monotone" });
        }
        for r in &self.rates {
            let tau = &self.test_sections[r.tau];
            let _ = match (r.slope, r.constant) {
                (Some(slope), Some(c)) => writeln!(out, "m = {}, tau = {tau}: slope {slope:.4}, C = {c:.6e}", r.m),
                _ => writeln!(out, "m = {}, tau = {tau}: error below {NOISE_FLOOR:e} (max {:e})", r.m, r.max_error),
            };
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{classify, hull};
    use crate::exact::int;
    use statrs::function::erf::erfc;

    fn setup(a: i64, b: i64, labels: &[i64], r: u32) -> (Arc<QuadratureGrid>, LatticePointSet) {
        let p = hull(&[vec![int(a)], vec![int(b)]]).unwrap();
        let mut w0 = LatticePointSet::default();
        for &m in labels {
            let e = Exponent::new(vec![m]);
            w0.points.insert(e.clone(), classify(&p, &e).unwrap());
        }
        (Arc::new(QuadratureGrid::new(&p, r).unwrap()), w0)
    }

    #[test]
    fn vacuous_threshold() {
        let (g, w0) = setup(0, 3, &[0, 2, 3], 50);
        let r = find_s0(&g, &ConvexPotential::Quadratic, &w0, 1.0, 0.5, 1024.0).unwrap();
        assert_eq!(r.s0, Some(1.0));
    }

    #[test]
    fn threshold_against_gaussian_tail() {
        let (g, w0) = setup(0, 3, &[0, 1, 2, 3], 200);
        let r = find_s0(&g, &ConvexPotential::Quadratic, &w0, 1e-3, 0.5, 1024.0).unwrap();
        let oracle = (1..=10)
            .map(|k| (1u32 << k) as f64)
            .find(|&s| erfc((s.sqrt() * 0.5) / std::f64::consts::SQRT_2) < 1e-3)
            .unwrap();
        let s0 = r.s0.unwrap();
        assert!(s0 == oracle || s0 == oracle / 2.0 || s0 == oracle * 2.0, "{s0} vs {oracle}");
        assert_eq!(r.masses.len(), 2);
    }

    #[test]
    fn unreachable_threshold() {
        let (g, w0) = setup(0, 3, &[1, 2], 50);
        let r = find_s0(&g, &ConvexPotential::Quadratic, &w0, 1e-300, 0.5, 1024.0).unwrap();
        assert_eq!(r.s0, None);
        assert_eq!(r.last_s, 1024.0);
        let (g, w0) = setup(0, 1, &[0, 1], 10);
        assert!(matches!(
            find_s0(&g, &ConvexPotential::Quadratic, &w0, 0.1, 0.5, 8.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cusp_trace() {
        let (g, w0) = setup(0, 3, &[0, 2, 3], 100);
        let mut cfg = QuantConfig::defaults(1);
        cfg.resolution = 100;
        let rep = convergence_run(&g, &w0, &cfg).unwrap();
        assert!(rep.monotone[&Exponent::new(vec![2])]);
        let masses: Vec<f64> = rep
            .rows
            .iter()
            .filter(|r| r.m.entries() == [2])
            .map(|r| r.mass_outside)
            .collect();
        assert!(masses.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0));
        assert!(rep.rows.iter().filter(|r| r.class == PointClass::Boundary).all(|r| r.pairings.is_none()));
        let csv = rep.to_csv();
        assert!(csv.starts_with("s,t_of_s,m1,mass_outside,pairing_tau_1,max_affinity\n"));
        assert_eq!(csv.lines().count(), 1 + 3 * 11);
    }

    #[test]
    fn veronese_pairing_limit() {
        let (g, w0) = setup(0, 6, &[0, 1, 2, 3, 4, 5, 6], 100);
        let mut cfg = QuantConfig::defaults(1);
        cfg.s_count = 1;
        cfg.s_start = 1000.0;
        cfg.epsilon.clear();
        let rep = convergence_run(&g, &w0, &cfg).unwrap();
        for r in rep.rows.iter().filter(|r| r.class == PointClass::Interior) {
            assert!((r.pairings.as_ref().unwrap()[0] - r.m.entries()[0] as f64).abs() < 1e-2);
        }
    }

    #[test]
    fn symmetric_domain_is_exact_for_linear_tests() {
        let (g, w0) = setup(0, 4, &[2], 40);
        let mut cfg = QuantConfig::defaults(1);
        cfg.epsilon.clear();
        cfg.test_sections = vec![Polynomial::parse(1, "3 - 2*u1").unwrap()];
        let rep = convergence_run(&g, &w0, &cfg).unwrap();
        for r in &rep.rows {
            assert!((r.pairings.as_ref().unwrap()[0] - (-1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn quadratic_rate_is_one_over_s() {
        let (g, w0) = setup(0, 3, &[1], 200);
        let mut cfg = QuantConfig::defaults(1);
        cfg.epsilon.clear();
        cfg.test_sections = vec![Polynomial::parse(1, "u1^2").unwrap()];
        let rep = convergence_run(&g, &w0, &cfg).unwrap();
        let slope = rep.rates[0].slope.unwrap();
        assert!(slope < -0.9 && slope > -1.1, "{:?}", rep.rates);
    }

    #[test]
    fn empty_interior_is_noted() {
        let (g, w0) = setup(0, 1, &[0, 1], 20);
        let rep = convergence_run(&g, &w0, &QuantConfig::defaults(1)).unwrap();
        assert!(rep.rates.is_empty() && rep.thresholds.is_empty());
        assert!(rep.notes[0].contains("no interior"));
    }

    #[test]
    fn bad_configs() {
        let (g, w0) = setup(0, 3, &[1], 20);
        let mut cfg = QuantConfig::defaults(1);
        cfg.t0 = 2.0;
        assert!(matches!(convergence_run(&g, &w0, &cfg), Err(Error::Config(_))));
        let mut cfg = QuantConfig::defaults(1);
        cfg.potential = ConvexPotential::parse(1, "u1^3").unwrap();
        let (g0, w) = setup(-1, 3, &[1], 20);
        assert!(matches!(convergence_run(&g0, &w, &cfg), Err(Error::Domain(_))));
        let mut cfg = QuantConfig::defaults(1);
        cfg.s_factor = 1.0;
        assert!(convergence_run(&g, &w0, &cfg).is_err());
    }
}
