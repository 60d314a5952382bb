//! Numerical field theory on Lie algebroids.
//!
//! An algebroid is carried by its structure functions in a single chart and
//! basis. On top of that the crate provides the jet-bundle calculus of a
//! fibred pair `π: E → F`, finite-difference residuals for discretized
//! sections (admissibility, morphism, Euler-Lagrange, Noether), an RK4
//! integrator for the one-dimensional (mechanics) case and builders for the
//! standard, time-dependent, Chern-Simons and Atiyah scenarios.
//!
//! The crate is `no_std` and only needs `alloc`; IO lives in the `liefield`
//! companion crate.
//!
//! Index layouts are row-major throughout. Each type documents the layout of
//! the flat arrays it hands out.
#![no_std]
#![deny(rust_2018_idioms)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebroid;
mod error;
pub mod fields;
pub mod jet;
pub mod linalg;
pub mod scenarios;
pub mod smooth;
pub mod variational;

pub use algebroid::{LieAlgebroidModel, PFormOnE, SectionOfE};
pub use error::{Error, Result};
pub use fields::{Boundary, DiscretizedSection, GridSpec, ResidualField};
pub use jet::{AffineDualSection, FibredAlgebroidPair, JetPoint, ProjectableSection};
pub use smooth::SmoothField;
pub use variational::{Lagrangian, NoetherCurrent};

/// Default central finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
