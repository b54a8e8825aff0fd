//! Quadratic Wasserstein distance to the uniform measure: exact values on
//! the circle, smoothing-inequality upper bounds on `S²` and `T²`, and the
//! spectral variances that feed the bounds.

mod circle;
mod smoothing;
mod variance;

pub use circle::{
    expected_w2_circle_harmonic, expected_w2_circle_harmonic_asymptotic, w2_circle_fourier,
    w2_circle_quantile, w2_circle_sq_exact,
};
pub use smoothing::{
    default_sphere_cutoff, default_torus_cutoff, heat_trace_sphere, minimize_log_t,
    sphere_spectral_power, sphere_spectral_powers, w2_upper_bound_sphere,
    w2_upper_bound_torus2, Preset, SmoothingBound, SphereSpectrum, TorusSpectrum,
};
pub use variance::{
    harmonic_sphere_spectral_variance_bound, harmonic_sphere_spectral_variance_exact,
    spherical_spectral_variance_bound, spherical_spectral_variance_exact,
};
