//! Weighted past, residual and paired varentropy for lifetime distributions.
//!
//! The crate evaluates weighted entropy/varentropy measures of the past law
//! `Y | Y <= t` and residual law `Y | Y > t` by adaptive quadrature, and
//! builds estimators, bound checks, coherent-system analysis and simulation
//! harnesses on top of them.

pub mod bounds;
pub mod coherent;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod measures;
pub mod quadrature;
pub mod transforms;

pub use error::{Error, Result};
