//! A numerical model of section concentration on the toric special fiber.
//!
//! The normalized section labelled by a Bohr-Sommerfeld point `m` is
//! modelled as the density `exp(-s B(u, m)) / Z` on the moment polytope,
//! where `B` is the Bregman divergence of a strictly convex potential.
//! This is a model with the same qualitative behaviour as the deformed
//! sections (L1 concentration, delta-function weak limits at interior
//! points, eventual independence), not a formula for them. Test sections
//! are functions of the action variables only.

mod density;
mod grid;
mod potential;
mod schedule;
mod sweep;

pub use density::{affinity_matrix, bregman, density, mass_outside, max_off_diagonal, weak_pairing, SectionDensity};
pub use grid::{Node, QuadratureGrid};
pub use potential::{ConvexPotential, PolynomialPotential};
pub use schedule::Schedule;
pub use sweep::{convergence_run, find_s0, ConvergenceReport, QuantConfig, RateFit, ThresholdReport, TraceRow};

/// Neumaier-compensated sum, accumulated in iteration order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}
