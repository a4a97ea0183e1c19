//! Spectral analysis of two-dimensional Dirac operators with critical
//! electrostatic and Lorentz-scalar δ-shell interactions supported on a circle
//! or a straight line.

// negated comparisons are how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod eigenfunction;
pub mod error;
pub mod line;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod reference;
pub mod roots;
pub mod shooting;
pub mod spectrum;
pub mod wide;

pub use error::{Error, Result};
pub use params::{accumulation_point, CircleConfig, CouplingPair, GapPoint};
pub use wide::Wide;
