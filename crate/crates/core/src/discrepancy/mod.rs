//! `L^2` discrepancies: spherical caps on `S^d`, periodic boxes (diaphony)
//! and balls on `T^d`.

mod ball;
mod cap;
mod periodic;

pub use ball::{
    ball_coefficient, ball_coefficients, ball_l2, ball_l2_corrected, ball_l2_mc,
    ball_single_point_sq, ball_tail_bound,
    expected_ball_l2_asymptotic, expected_ball_l2_exact_sum, iid_expected_ball_l2,
    BallCoefficient,
};
pub(crate) use ball::ball_l2_with_table;
pub use cap::{
    cap_discrepancy_mc, cap_discrepancy_stolarsky, cap_l2_sq, cap_measure,
    expected_cap_discrepancy_harmonic, expected_cap_discrepancy_harmonic_exact,
    expected_cap_discrepancy_spherical, stolarsky_constant,
};
pub use periodic::{
    expected_periodic_l2_1d, expected_periodic_l2_asymptotic,
    expected_periodic_l2_exact, exponential_sum, iid_expected_periodic_l2, periodic_l2,
    periodic_l2_exact,
    torus_variance, zeta2_tail,
};

/// A truncated spectral series together with a bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    /// The truncated sum (a squared discrepancy or squared distance).
    pub sq: f64,
    /// Bound on the omitted terms. Certified or heuristic depending on the
    /// producing function.
    pub tail: f64,
    pub cutoff: usize,
}

impl Truncated {
    /// Square root of the truncated sum.
    pub fn value(&self) -> f64 {
        self.sq.max(0.0).sqrt()
    }
}

/// Frequency of an exponential sum: a lattice vector on the torus, or a
/// spherical-harmonic degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frequency {
    Lattice(Vec<i64>),
    Degree(usize),
}

/// `|Σ_n φ_k(x_n)|²` on the torus, or `Σ_m |Σ_n Y_ℓ^m(x_n)|²` on `S²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSum {
    pub frequency: Frequency,
    pub power: f64,
}
