//! Numerical toolkit for compact quotients of the unit disc.
//!
//! The crate evaluates Poincaré series of weight `m` over a Fuchsian group,
//! weighted Bergman kernels and their relative Poincaré round trip, orbit
//! geometric lower bounds for the Seshadri constant of the canonical bundle,
//! and sampled very-ampleness certificates built from Poincaré series of
//! monomials.
//!
//! All distances use the curvature −1 Poincaré metric, see [`geometry`].

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod embedding;
pub mod error;
pub mod geometry;
pub mod group;
pub mod kernels;
pub mod quadrature;
pub mod series;
pub mod seshadri;
pub mod summation;

pub use error::{Error, Result};
pub use geometry::{DiscPoint, Isometry};
pub use group::{FuchsianGroup, GroupElement, OrbitBall};
pub use num_complex::Complex64;
