//! Special functions and Gauss–Jacobi quadrature.

mod bessel;
pub(crate) mod gamma;
mod jacobi;
mod quadrature;

pub use bessel::bessel_j;
pub use gamma::{binomial, digamma, gamma, ln_binomial, ln_gamma, EULER_GAMMA};
pub use jacobi::{
    jacobi_eval, jacobi_norm, legendre_all, legendre_eval, legendre_triple_integral, JacobiParams,
};
pub use quadrature::{gauss_jacobi_rule, QuadratureRule};
