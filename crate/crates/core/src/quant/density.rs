use std::sync::Arc;

use crate::exact::{to_f64, Exponent};
use crate::quant::{compensated_sum, ConvexPotential, QuadratureGrid};
use crate::{Error, Result};

/// `B(u, m)` with `m` required to lie in the polytope of `grid`.
pub fn bregman(potential: &ConvexPotential, grid: &QuadratureGrid, u: &[f64], m: &Exponent) -> Result<f64> {
    check_label(grid, m)?;
    if u.len() != m.dim() {
        return Err(Error::Dimension {
            expected: m.dim(),
            found: u.len(),
        });
    }
    Ok(potential.bregman_unchecked(u, &label_point(m)))
}

fn check_label(grid: &QuadratureGrid, m: &Exponent) -> Result<()> {
    if m.dim() != grid.dim() {
        return Err(Error::Dimension {
            expected: grid.dim(),
            found: m.dim(),
        });
    }
    if !grid.polytope().contains(&m.to_rational()) {
        return Err(Error::Domain(format!("{m} is not in {}", grid.polytope().summary())));
    }
    Ok(())
}

fn label_point(m: &Exponent) -> Vec<f64> {
    m.to_rational().iter().map(to_f64).collect()
}

/// Normalized density `exp(-s B(u, m)) / Z` on the nodes of a grid,
/// stored as log-values.
#[derive(Debug, Clone)]
pub struct SectionDensity {
    grid: Arc<QuadratureGrid>,
    m: Exponent,
    s: f64,
    log_values: Vec<f64>,
}

impl SectionDensity {
    pub fn m(&self) -> &Exponent {
        &self.m
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_values.iter().map(|l| l.exp()).collect()
    }

    /// Density at the node nearest to `u`.
    pub fn eval_at(&self, u: &[f64]) -> f64 {
        let dist = |p: &[f64]| p.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        self.grid
            .nodes()
            .iter()
            .zip(&self.log_values)
            .min_by(|a, b| dist(&a.0.point).total_cmp(&dist(&b.0.point)))
            .map_or(0.0, |(_, l)| l.exp())
    }

    /// `sum rho * weight` over the nodes, optionally filtered.
    fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        compensated_sum(
            self.grid
                .nodes()
                .iter()
                .zip(&self.log_values)
                .map(|(node, l)| f(&node.point) * l.exp() * node.weight),
        )
    }

    pub fn total_mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }
}

pub fn density(grid: &Arc<QuadratureGrid>, potential: &ConvexPotential, m: &Exponent, s: f64) -> Result<SectionDensity> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::Config(format!("deformation parameter must be finite and nonnegative, got {s}")));
    }
    check_label(grid, m)?;
    let mp = label_point(m);
    let raw: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|node| -s * potential.bregman_unchecked(&node.point, &mp))
        .collect();
    let peak = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = raw.into_iter().map(|l| l - peak).collect();
    let top = shifted
        .iter()
        .zip(grid.nodes())
        .map(|(l, node)| l + node.weight.ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let scaled = compensated_sum(
        shifted
            .iter()
            .zip(grid.nodes())
            .map(|(l, node)| (l + node.weight.ln() - top).exp()),
    );
    let log_z = top + scaled.ln();
    Ok(SectionDensity {
        grid: Arc::clone(grid),
        m: m.clone(),
        s,
        log_values: shifted.into_iter().map(|l| l - log_z).collect(),
    })
}

/// Mass of the density at nodes with `|u - m| >= eta`.
pub fn mass_outside(rho: &SectionDensity, eta: f64) -> f64 {
    let m = label_point(&rho.m);
    let mass = rho.integrate(|u| {
        let r2: f64 = u.iter().zip(&m).map(|(a, b)| (a - b) * (a - b)).sum();
        if r2 >= eta * eta {
            1.0
        } else {
            0.0
        }
    });
    mass.clamp(0.0, 1.0)
}

/// `integral tau * rho`.
pub fn weak_pairing(rho: &SectionDensity, tau: &crate::exact::Polynomial) -> Result<f64> {
    if tau.nvars() != rho.m.dim() {
        return Err(Error::Dimension {
            expected: rho.m.dim(),
            found: tau.nvars(),
        });
    }
    Ok(rho.integrate(|u| tau.eval_f64(u)))
}

/// Bhattacharyya affinities `integral sqrt(rho_i rho_j)`; symmetric with
/// unit diagonal.
pub fn affinity_matrix(densities: &[SectionDensity]) -> Result<Vec<Vec<f64>>> {
    if let Some(first) = densities.first() {
        for d in densities {
            if !Arc::ptr_eq(&d.grid, &first.grid) && d.grid != first.grid {
                return Err(Error::Config("densities live on different grids".into()));
            }
            if d.s != first.s {
                return Err(Error::Config("densities have different deformation parameters".into()));
            }
        }
    }
    let k = densities.len();
    let mut a = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let (p, q) = (&densities[i], &densities[j]);
            let v = compensated_sum(
                p.grid
                    .nodes()
                    .iter()
                    .zip(p.log_values.iter().zip(&q.log_values))
                    .map(|(node, (x, y))| (0.5 * (x + y)).exp() * node.weight),
            )
            .clamp(0.0, 1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    Ok(a)
}

/// Largest off-diagonal entry, or 0 for fewer than two densities.
pub fn max_off_diagonal(a: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if i != j {
                best = best.max(x);
            }
        }
    }
    best
}
