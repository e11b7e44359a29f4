//! Value semigroups, Newton-Okounkov bodies and explicit toric degeneration
//! data for projective varieties presented by a space of sections, together
//! with a numerical model of Bohr-Sommerfeld concentration on the toric
//! special fiber.

pub mod body;
pub mod commands;
pub mod degeneration;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod linalg;
pub mod problem;
pub mod quant;
pub mod semigroup;
pub mod valuation;

pub use error::{Error, Result};
