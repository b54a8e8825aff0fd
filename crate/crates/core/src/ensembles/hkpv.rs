//! Sequential exact sampler for projection DPPs (Hough–Krishnapur–Peres–Virág).
//!
//! Candidates are drawn uniformly and accepted with probability
//! `r(x) / K(x,x)`, where `r(x) = K(x,x) − k(x)* G⁻¹ k(x)` is the conditional
//! intensity given the points already accepted. `G` is kept as a growing
//! Cholesky factor.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::kernels::{HarmonicSphereKernel, HarmonicTorusKernel, SphericalKernel};
use super::EnsembleSpec;
use crate::error::{Error, Result};
use crate::geometry::{uniform_sphere, uniform_torus, Manifold, PointSet};

const DEGENERACY_TOL: f64 = 1e-8;

/// A Hermitian projection kernel with constant diagonal.
pub trait ProjectionKernel {
    fn manifold(&self) -> Manifold;

    /// Rank, which is the number of points.
    fn rank(&self) -> usize;

    /// `K(x, x)`, equal to `rank / Vol(M)`.
    fn diagonal(&self) -> f64;

    fn eval(&self, x: &[f64], y: &[f64]) -> Result<Complex64>;

    /// Uniform proposal; kernels with singular points may redraw.
    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self.manifold() {
            Manifold::Sphere(d) => uniform_sphere(d, rng).into_coords(),
            Manifold::Torus(d) => uniform_torus(d, rng).coords().to_vec(),
        }
    }
}

impl ProjectionKernel for HarmonicSphereKernel {
    fn manifold(&self) -> Manifold {
        Manifold::Sphere(self.dim())
    }
    fn rank(&self) -> usize {
        self.point_count()
    }
    fn diagonal(&self) -> f64 {
        self.eval(1.0)
    }
    fn eval(&self, x: &[f64], y: &[f64]) -> Result<Complex64> {
        let t: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        Ok(Complex64::new(HarmonicSphereKernel::eval(self, t), 0.0))
    }
}

impl ProjectionKernel for HarmonicTorusKernel {
    fn manifold(&self) -> Manifold {
        Manifold::Torus(self.d)
    }
    fn rank(&self) -> usize {
        self.point_count()
    }
    fn diagonal(&self) -> f64 {
        self.point_count() as f64
    }
    fn eval(&self, x: &[f64], y: &[f64]) -> Result<Complex64> {
        Ok(Complex64::new(HarmonicTorusKernel::eval(self, x, y), 0.0))
    }
}

impl ProjectionKernel for SphericalKernel {
    fn manifold(&self) -> Manifold {
        Manifold::Sphere(2)
    }
    fn rank(&self) -> usize {
        self.n
    }
    fn diagonal(&self) -> f64 {
        SphericalKernel::diagonal(self)
    }
    fn eval(&self, x: &[f64], y: &[f64]) -> Result<Complex64> {
        Ok(SphericalKernel::eval(self, x, y)?.to_complex())
    }
    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let p = uniform_sphere(2, rng).into_coords();
            if p[2] < 1.0 {
                return p;
            }
        }
    }
}

/// Lower-triangular factor `L` of the Gram matrix `G = L L*`, stored by rows.
struct GramFactor {
    rows: Vec<Vec<Complex64>>,
}

impl GramFactor {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    /// Solves `L v = k` by forward substitution.
    fn solve(&self, k: &[Complex64]) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(k.len());
        for (i, row) in self.rows.iter().enumerate() {
            let mut s = k[i];
            for j in 0..i {
                s -= row[j] * v[j];
            }
            v.push(s / row[i]);
        }
        v
    }

    fn push(&mut self, v: &[Complex64], residual: f64) {
        let mut row: Vec<Complex64> = v.iter().map(|c| c.conj()).collect();
        row.push(Complex64::new(residual.sqrt(), 0.0));
        self.rows.push(row);
    }

    /// Recomputes the factor from scratch.
    fn refresh<K: ProjectionKernel>(&mut self, kernel: &K, pts: &[Vec<f64>]) -> Result<bool> {
        let n = pts.len();
        let mut g = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = if i == j {
                    Complex64::new(kernel.diagonal(), 0.0)
                } else {
                    kernel.eval(&pts[i], &pts[j])?
                };
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        let Some(ch) = g.cholesky() else {
            return Ok(false);
        };
        let l = ch.l();
        self.rows = (0..n).map(|i| (0..=i).map(|j| l[(i, j)]).collect()).collect();
        Ok(true)
    }
}

/// Runs the sequential sampler for an arbitrary projection kernel.
///
/// # Errors
///
/// A conditional intensity below `−1e−8 · K(x,x)`, persisting after the
/// factorization is rebuilt, is reported as [`Error::Degenerate`].
pub fn sample_with_kernel<K: ProjectionKernel, R: Rng + ?Sized>(
    kernel: &K,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    let n = kernel.rank();
    let kxx = kernel.diagonal();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut factor = GramFactor::new();
    let mut kvec = Vec::with_capacity(n);
    while pts.len() < n {
        let x = kernel.propose(rng);
        kvec.clear();
        for p in &pts {
            kvec.push(kernel.eval(p, &x)?);
        }
        let mut v = factor.solve(&kvec);
        let mut residual = kxx - v.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if residual < -DEGENERACY_TOL * kxx {
            if !factor.refresh(kernel, &pts)? {
                return Err(Error::Degenerate {
                    step: pts.len(),
                    residual,
                });
            }
            v = factor.solve(&kvec);
            residual = kxx - v.iter().map(|c| c.norm_sqr()).sum::<f64>();
            if residual < -DEGENERACY_TOL * kxx {
                return Err(Error::Degenerate {
                    step: pts.len(),
                    residual,
                });
            }
        }
        let residual = residual.clamp(0.0, kxx);
        let u: f64 = rng.random();
        if u * kxx < residual {
            factor.push(&v, residual);
            pts.push(x);
        }
    }
    Ok(pts)
}

/// Exact sample of a projection DPP given by `spec`.
///
/// Supports the harmonic ensembles and the kernel route for the spherical
/// ensemble.
pub fn sample_projection_dpp<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<PointSet> {
    spec.validate()?;
    let (manifold, pts) = match *spec {
        EnsembleSpec::HarmonicSphere { d, l } => {
            let k = HarmonicSphereKernel::new(d, l)?;
            (k.manifold(), sample_with_kernel(&k, rng)?)
        }
        EnsembleSpec::HarmonicTorus { d, t } => {
            let k = HarmonicTorusKernel { d, t };
            (k.manifold(), sample_with_kernel(&k, rng)?)
        }
        EnsembleSpec::Spherical { n } => {
            let k = SphericalKernel { n };
            (k.manifold(), sample_with_kernel(&k, rng)?)
        }
        EnsembleSpec::IidUniform { .. } => {
            return Err(Error::Domain(
                "i.i.d. points are not a projection DPP; use ensembles::sample".into(),
            ))
        }
    };
    let coords = pts.into_iter().flatten().collect();
    Ok(PointSet::new(manifold, coords)?.with_meta(spec.to_string(), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    #[test]
    fn returns_exactly_n_points() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for spec in [
            EnsembleSpec::HarmonicSphere { d: 2, l: 0 },
            EnsembleSpec::HarmonicSphere { d: 2, l: 5 },
            EnsembleSpec::HarmonicSphere { d: 3, l: 2 },
            EnsembleSpec::HarmonicSphere { d: 1, l: 3 },
            EnsembleSpec::HarmonicTorus { d: 1, t: 4 },
            EnsembleSpec::HarmonicTorus { d: 2, t: 2 },
            EnsembleSpec::Spherical { n: 12 },
        ] {
            let s = sample_projection_dpp(&spec, &mut rng).unwrap();
            assert_eq!(s.len(), spec.point_count(), "{spec}");
            assert_eq!(s.manifold(), spec.manifold());
        }
    }

    #[test]
    fn gram_matrix_of_sample_is_positive_definite() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let k = HarmonicSphereKernel::new(2, 4).unwrap();
        let pts = sample_with_kernel(&k, &mut rng).unwrap();
        let n = pts.len();
        let g = DMatrix::<f64>::from_fn(n, n, |i, j| ProjectionKernel::eval(&k, &pts[i], &pts[j]).unwrap().re);
        let eig = g.symmetric_eigen();
        let max = k.diagonal() * n as f64;
        for &e in eig.eigenvalues.iter() {
            assert!(e > -1e-8 && e <= max);
        }
    }

    #[test]
    fn circle_harmonic_fourier_variance() {
        // N = 3: E|Σ e^{2πiX}|² = 3 − 2 = 1
        let spec = EnsembleSpec::HarmonicTorus { d: 1, t: 1 };
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let reps = 4000;
        let vals: Vec<f64> = (0..reps)
            .map(|_| {
                let s = sample_projection_dpp(&spec, &mut rng).unwrap();
                let (mut re, mut im) = (0.0, 0.0);
                for p in s.points() {
                    re += (2.0 * PI * p[0]).cos();
                    im += (2.0 * PI * p[0]).sin();
                }
                re * re + im * im
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * se, "mean {mean} se {se}");
    }
}
