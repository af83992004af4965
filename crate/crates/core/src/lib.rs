//! Numerical calculus of volumetric expansion on coordinate charts.
//!
//! The crate evaluates divergences and Lie derivatives of volume elements,
//! the integral identities that follow from the divergence theorem, the
//! Ricci-soliton and Raychaudhuri identities, and hypothesis-plus-consequence
//! diagnostics for the rigidity statements built on them. Scenarios are
//! described in JSON (see `docs/scenario.md`) and driven by the `volex` CLI.

pub mod analysis;
pub mod error;
pub mod exprdsl;
pub mod flow;
pub mod geometry;
pub mod integrate;
pub mod linalg;
pub mod lorentz;
pub mod report;
pub mod scenario;
pub mod soliton;
pub mod sum;
pub mod verdict;

pub use error::{Error, ErrorClass, Result};
