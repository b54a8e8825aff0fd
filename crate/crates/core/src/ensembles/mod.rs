//! The harmonic ensembles on `S^d` and `T^d`, the spherical ensemble on
//! `S^2`, and their exact samplers.

mod hkpv;
mod kernels;
mod spherical;

use std::fmt;

use rand::Rng;
use serde_json::{json, Value};

pub use hkpv::{sample_projection_dpp, ProjectionKernel};
pub use kernels::{
    dirichlet, kernel_harmonic_sphere, kernel_harmonic_torus, kernel_spherical,
    HarmonicSphereKernel, HarmonicTorusKernel, KernelValue, SphericalKernel,
};
pub use spherical::sample_spherical_matrix;

use crate::error::{Error, Result};
use crate::geometry::{uniform_sphere, uniform_torus, Manifold, PointSet};

/// Which point process to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleSpec {
    /// Harmonic ensemble on `S^d`: spherical harmonics of degree `≤ l`.
    HarmonicSphere { d: usize, l: usize },
    /// Harmonic ensemble on `T^d`: frequencies `‖k‖_∞ ≤ t`.
    HarmonicTorus { d: usize, t: usize },
    /// Spherical ensemble with `n` points on `S^2`.
    Spherical { n: usize },
    /// `n` independent uniform points.
    IidUniform { manifold: Manifold, n: usize },
}

impl EnsembleSpec {
    /// Number of points in every realization.
    pub fn point_count(&self) -> usize {
        point_count(self)
    }

    pub fn manifold(&self) -> Manifold {
        match *self {
            EnsembleSpec::HarmonicSphere { d, .. } => Manifold::Sphere(d),
            EnsembleSpec::HarmonicTorus { d, .. } => Manifold::Torus(d),
            EnsembleSpec::Spherical { .. } => Manifold::Sphere(2),
            EnsembleSpec::IidUniform { manifold, .. } => manifold,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EnsembleSpec::HarmonicSphere { .. } => "harmonic-sphere",
            EnsembleSpec::HarmonicTorus { .. } => "harmonic-torus",
            EnsembleSpec::Spherical { .. } => "spherical",
            EnsembleSpec::IidUniform { .. } => "iid-uniform",
        }
    }

    /// # Errors
    ///
    /// Rejects zero dimensions and empty ensembles.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(m.to_string()));
        match *self {
            EnsembleSpec::HarmonicSphere { d: 0, .. } | EnsembleSpec::HarmonicTorus { d: 0, .. } => {
                bad("dimension d >= 1 required")
            }
            EnsembleSpec::Spherical { n: 0 } | EnsembleSpec::IidUniform { n: 0, .. } => {
                bad("N >= 1 required")
            }
            EnsembleSpec::IidUniform { manifold, .. } if manifold.dim() == 0 => {
                bad("dimension d >= 1 required")
            }
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> Value {
        let n = self.point_count();
        match *self {
            EnsembleSpec::HarmonicSphere { d, l } => {
                json!({"kind": self.kind(), "d": d, "L": l, "N": n})
            }
            EnsembleSpec::HarmonicTorus { d, t } => {
                json!({"kind": self.kind(), "d": d, "T": t, "N": n})
            }
            EnsembleSpec::Spherical { .. } => json!({"kind": self.kind(), "d": 2, "N": n}),
            EnsembleSpec::IidUniform { manifold, .. } => json!({
                "kind": self.kind(),
                "manifold": manifold.name(),
                "d": manifold.dim(),
                "N": n
            }),
        }
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EnsembleSpec::HarmonicSphere { d, l } => write!(f, "harmonic-sphere(d={d},L={l})"),
            EnsembleSpec::HarmonicTorus { d, t } => write!(f, "harmonic-torus(d={d},T={t})"),
            EnsembleSpec::Spherical { n } => write!(f, "spherical(N={n})"),
            EnsembleSpec::IidUniform { manifold, n } => {
                write!(f, "iid-uniform({}, d={}, N={n})", manifold.name(), manifold.dim())
            }
        }
    }
}

fn binom_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// `N` for the ensemble: the dimension of the harmonic space for the harmonic
/// ensembles, the requested count otherwise.
pub fn point_count(spec: &EnsembleSpec) -> usize {
    match *spec {
        // (2L+d)/d · C(L+d−1, d−1) = C(L+d, d) + C(L+d−1, d)
        EnsembleSpec::HarmonicSphere { d, l } => {
            (binom_u128(l + d, d) + binom_u128(l + d - 1, d)) as usize
        }
        EnsembleSpec::HarmonicTorus { d, t } => (2 * t + 1).pow(d as u32),
        EnsembleSpec::Spherical { n } | EnsembleSpec::IidUniform { n, .. } => n,
    }
}

/// Draws one realization. The spherical ensemble uses the random-matrix
/// route; the harmonic ensembles use the sequential projection sampler.
pub fn sample<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<PointSet> {
    spec.validate()?;
    match *spec {
        EnsembleSpec::Spherical { n } => sample_spherical_matrix(n, rng),
        EnsembleSpec::IidUniform { manifold, n } => sample_iid(manifold, n, rng),
        _ => sample_projection_dpp(spec, rng),
    }
}

pub fn sample_iid<R: Rng + ?Sized>(manifold: Manifold, n: usize, rng: &mut R) -> Result<PointSet> {
    let d = manifold.dim();
    let mut coords = Vec::with_capacity(n * manifold.ambient_dim());
    for _ in 0..n {
        match manifold {
            Manifold::Sphere(_) => coords.extend_from_slice(uniform_sphere(d, rng).coords()),
            Manifold::Torus(_) => coords.extend_from_slice(uniform_torus(d, rng).coords()),
        }
    }
    let spec = EnsembleSpec::IidUniform { manifold, n };
    Ok(PointSet::new(manifold, coords)?.with_meta(spec.to_string(), None))
}
