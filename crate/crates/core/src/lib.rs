//! Determinantal point processes on the sphere `S^d` and the flat torus `T^d`.
//!
//! The crate samples the harmonic ensembles on `S^d` and `T^d` and the
//! spherical ensemble on `S^2`, evaluates Riesz energies, spherical-cap,
//! periodic and ball `L^2` discrepancies and quadratic Wasserstein bounds of
//! point sets, and ships closed-form expectation oracles for all of them so
//! that Monte Carlo estimates can be compared against exact theory.
//!
//! Module map:
//!
//! - [`specfun`]: gamma family, Jacobi/Legendre polynomials, Bessel `J`,
//!   Gauss–Jacobi quadrature.
//! - [`geometry`]: points, metrics, uniform sampling, point-set CSV files.
//! - [`ensembles`]: kernels and exact samplers.
//! - [`energy`]: discrete Riesz energies and expected-energy oracles.
//! - [`discrepancy`]: cap (Stolarsky), periodic and ball discrepancies.
//! - [`transport`]: `W_2` on the circle, smoothing bounds on `S^2`/`T^2`,
//!   spectral variance formulas.
//! - [`mc`]: deterministic parallel Monte Carlo harness.
//! - [`verify`]: the verification grid behind `dppkit verify`.
//! - [`cli`]: command-line surface used by the `dppkit` binary.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod discrepancy;
pub mod energy;
pub mod ensembles;
mod error;
pub mod fmt;
pub mod geometry;
pub mod mc;
pub mod specfun;
pub mod sum;
pub mod theory;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
pub use theory::{TheoryKind, TheoryValue};
