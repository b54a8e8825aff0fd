use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{sphere_volume, SpherePoint, TorusPoint};
use crate::specfun::{jacobi_eval, ln_binomial, JacobiParams};

/// Reproducing kernel of the harmonic ensemble on `S^d` as a function of
/// `t = ⟨x, y⟩`: `c · P_L^{(d/2, (d−2)/2)}(t)` with `c` fixed by `K(1) = N / Vol(S^d)`.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicSphereKernel {
    d: usize,
    l: usize,
    n: usize,
    params: JacobiParams,
    scale: f64,
}

impl HarmonicSphereKernel {
    pub fn new(d: usize, l: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension d >= 1 required".into()));
        }
        let df = d as f64;
        let params = JacobiParams::new(df / 2.0, (df - 2.0) / 2.0)?;
        let n = super::point_count(&super::EnsembleSpec::HarmonicSphere { d, l });
        // P_L(1) = C(L + d/2, L)
        let p1 = ln_binomial(l as f64 + df / 2.0, l as f64).exp();
        let scale = n as f64 / (sphere_volume(d) * p1);
        Ok(Self { d, l, n, params, scale })
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.scale * jacobi_eval(self.params, self.l, t.clamp(-1.0, 1.0))
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// `K(x, y)` for the harmonic ensemble on `S^d` with `t = ⟨x, y⟩`.
pub fn kernel_harmonic_sphere(d: usize, l: usize, t: f64) -> Result<f64> {
    Ok(HarmonicSphereKernel::new(d, l)?.eval(t))
}

/// Dirichlet kernel `D_T(u) = Σ_{|k|≤T} e^{2πiku} = sin((2T+1)πu) / sin(πu)`.
pub fn dirichlet(t: usize, u: f64) -> f64 {
    let u = u - u.round();
    let s = (PI * u).sin();
    let m = (2 * t + 1) as f64;
    if s.abs() < 1e-6 {
        // close to an integer the ratio loses digits; sum the cosines instead
        return 1.0 + 2.0 * (1..=t).map(|k| (2.0 * PI * k as f64 * u).cos()).sum::<f64>();
    }
    (m * PI * u).sin() / s
}

/// Harmonic ensemble kernel on `T^d`: `Π_j D_T(δ_j)`.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicTorusKernel {
    pub d: usize,
    pub t: usize,
}

impl HarmonicTorusKernel {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| dirichlet(self.t, a - b)).product()
    }

    pub fn point_count(&self) -> usize {
        (2 * self.t + 1).pow(self.d as u32)
    }
}

/// `K(x, y)` for the harmonic ensemble on `T^d` evaluated at the offset `δ = x − y`.
pub fn kernel_harmonic_torus(d: usize, t: usize, delta: &TorusPoint) -> Result<f64> {
    if delta.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: delta.dim(),
        });
    }
    Ok(delta.coords().iter().map(|&u| dirichlet(t, u)).product())
}

/// A complex kernel value stored as `(ln |K|, arg K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub log_magnitude: f64,
    /// In `(−π, π]`.
    pub phase: f64,
}

impl KernelValue {
    pub fn magnitude(&self) -> f64 {
        self.log_magnitude.exp()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude(), self.phase)
    }
}

fn wrap_phase(p: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = p.rem_euclid(two_pi);
    if r > PI {
        r -= two_pi;
    }
    r
}

/// Kernel of the spherical ensemble with `n` points, in the projection from
/// the north pole:
/// `N/(π 2^{N+1}) · ((1 + ⟨x,y⟩ − x₃ − y₃ + i(x₂y₁ − x₁y₂)) / √((1−x₃)(1−y₃)))^{N−1}`.
#[derive(Debug, Clone, Copy)]
pub struct SphericalKernel {
    pub n: usize,
}

impl SphericalKernel {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<KernelValue> {
        let (ox, oy) = (1.0 - x[2], 1.0 - y[2]);
        if !(ox > 0.0) || !(oy > 0.0) {
            return Err(Error::Singular(
                "spherical-ensemble kernel is undefined at the north pole".into(),
            ));
        }
        let n = self.n as f64;
        let log_c = n.ln() - PI.ln() - (n + 1.0) * LN_2;
        if self.n == 1 {
            return Ok(KernelValue {
                log_magnitude: log_c,
                phase: 0.0,
            });
        }
        let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let w = Complex64::new(1.0 + dot - x[2] - y[2], x[1] * y[0] - x[0] * y[1])
            / (ox * oy).sqrt();
        let m = n - 1.0;
        Ok(KernelValue {
            log_magnitude: log_c + m * w.norm().ln(),
            phase: wrap_phase(m * w.arg()),
        })
    }

    pub fn diagonal(&self) -> f64 {
        self.n as f64 / (4.0 * PI)
    }
}

/// `K(x, y)` of the spherical ensemble with `n` points.
///
/// # Errors
///
/// Points at the north pole are a singularity error.
pub fn kernel_spherical(n: usize, x: &SpherePoint, y: &SpherePoint) -> Result<KernelValue> {
    for p in [x, y] {
        if p.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: p.dim(),
            });
        }
    }
    SphericalKernel { n }.eval(x.coords(), y.coords())
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{stereographic_to_sphere, uniform_sphere};
    use crate::specfun::legendre_eval;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn sphere_kernel_diagonal_is_density() {
        for d in 1..=5 {
            for l in 0..8 {
                let k = HarmonicSphereKernel::new(d, l).unwrap();
                let want = k.point_count() as f64 / sphere_volume(d);
                assert!((k.eval(1.0) - want).abs() < 1e-12 * want, "d={d} l={l}");
            }
        }
        let k = HarmonicSphereKernel::new(2, 3).unwrap();
        assert!((k.eval(1.0) - 16.0 / (4.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn sphere_kernel_is_legendre_sum_on_s2() {
        for l in 0..=20 {
            let k = HarmonicSphereKernel::new(2, l).unwrap();
            for i in 0..1000 {
                let t = -1.0 + 2.0 * i as f64 / 999.0;
                let direct: f64 = (0..=l)
                    .map(|j| (2 * j + 1) as f64 * legendre_eval(j, t))
                    .sum::<f64>()
                    / (4.0 * PI);
                assert!((k.eval(t) - direct).abs() < 1e-10, "l={l} t={t}");
            }
        }
        assert!((kernel_harmonic_sphere(2, 0, 0.3).unwrap() * 4.0 * PI - 1.0).abs() < 1e-14);
    }

    #[test]
    fn circle_kernel_is_dirichlet() {
        // On S¹, K(θ) = D_L(θ / 2π) / 2π.
        for l in 0..6 {
            let k = HarmonicSphereKernel::new(1, l).unwrap();
            for i in 0..50 {
                let th = 0.03 + i as f64 * 0.06;
                let want = dirichlet(l, th / (2.0 * PI)) / (2.0 * PI);
                assert!((k.eval(th.cos()) - want).abs() < 1e-12);
            }
        }
    }

    fn torus_direct(t: usize, delta: &[f64]) -> f64 {
        // Σ_{‖k‖∞ ≤ T} e^{2πi⟨k,δ⟩}, whose imaginary part cancels
        let m = 2 * t + 1;
        let d = delta.len();
        let mut total = 0.0;
        for idx in 0..m.pow(d as u32) {
            let mut r = idx;
            let mut phase = 0.0;
            for &u in delta {
                let k = (r % m) as f64 - t as f64;
                r /= m;
                phase += k * u;
            }
            total += (2.0 * PI * phase).cos();
        }
        total
    }

    #[test]
    fn torus_kernel_examples() {
        let zero = TorusPoint::new(vec![0.0, 0.0]).unwrap();
        assert!((kernel_harmonic_torus(2, 3, &zero).unwrap() - 49.0).abs() < 1e-12);
        let third = TorusPoint::new(vec![1.0 / 3.0]).unwrap();
        assert!(kernel_harmonic_torus(1, 1, &third).unwrap().abs() < 1e-14);
        let half = TorusPoint::new(vec![0.5, 0.0]).unwrap();
        assert!((kernel_harmonic_torus(2, 1, &half).unwrap() + 3.0).abs() < 1e-14);
        assert!((torus_direct(1, &[0.5, 0.0]) + 3.0).abs() < 1e-12);
    }

    #[test]
    fn spherical_kernel_examples() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let x = uniform_sphere(2, &mut rng);
        for n in [1usize, 2, 7, 4096] {
            let v = kernel_spherical(n, &x, &x).unwrap();
            assert!((v.magnitude() - n as f64 / (4.0 * PI)).abs() < 1e-12 * n as f64);
            assert!(v.phase.abs() < 1e-12);
        }
        let anti = SpherePoint::new(x.coords().iter().map(|c| -c).collect()).unwrap();
        assert!(kernel_spherical(5, &x, &anti).unwrap().magnitude() < 1e-50);
        let north = SpherePoint::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(kernel_spherical(3, &north, &x), Err(Error::Singular(_))));
    }

    #[test]
    fn spherical_kernel_matches_planar_form() {
        // In the plane the kernel is N/π (1+|z|²)^{-(N+1)/2} (1+|w|²)^{-(N+1)/2} (z w̄)^{N−1}
        // up to a unimodular gauge factor, so the modulus must agree exactly.
        let n = 6usize;
        let z = Complex64::new(0.3, -1.2);
        let w = Complex64::new(-0.7, 0.4);
        let x = stereographic_to_sphere(z);
        let y = stereographic_to_sphere(w);
        let nf = n as f64;
        let planar = nf / PI
            * (1.0 + z.norm_sqr()).powf(-(nf - 1.0) / 2.0)
            * (1.0 + w.norm_sqr()).powf(-(nf - 1.0) / 2.0)
            * (1.0 + z * w.conj()).norm().powi(n as i32 - 1)
            / 4.0;
        let v = kernel_spherical(n, &x, &y).unwrap();
        assert!((v.magnitude() - planar).abs() < 1e-13, "{} vs {planar}", v.magnitude());
    }

    #[test]
    fn spherical_kernel_modulus_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for i in 0..10_000 {
            let n = 1 + i % 40;
            let x = uniform_sphere(2, &mut rng);
            let y = uniform_sphere(2, &mut rng);
            let dot: f64 = x.coords().iter().zip(y.coords()).map(|(a, b)| a * b).sum();
            let want = (n * n) as f64 / (16.0 * PI * PI) * ((1.0 + dot) / 2.0).powi(n as i32 - 1);
            let v = kernel_spherical(n, &x, &y).unwrap();
            let got = v.to_complex().norm_sqr();
            assert!((got - want).abs() <= 1e-10 * want.max(1e-300), "n={n}");
        }
    }

    #[test]
    fn spherical_kernel_is_hermitian() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..100 {
            let x = uniform_sphere(2, &mut rng);
            let y = uniform_sphere(2, &mut rng);
            let a = kernel_spherical(9, &x, &y).unwrap().to_complex();
            let b = kernel_spherical(9, &y, &x).unwrap().to_complex();
            assert!((a - b.conj()).norm() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn torus_kernel_matches_exponential_sum(
            t in 0usize..4,
            delta in proptest::collection::vec(-2.0f64..2.0, 1..=3),
        ) {
            let p = TorusPoint::new(delta.clone()).unwrap();
            let k = kernel_harmonic_torus(delta.len(), t, &p).unwrap();
            prop_assert!((k - torus_direct(t, &delta)).abs() < 1e-9);
        }

        #[test]
        fn dirichlet_near_integers(t in 0usize..50, eps in -1e-7f64..1e-7, m in -3i32..3) {
            let u = m as f64 + eps;
            let direct = 1.0 + 2.0 * (1..=t).map(|k| (2.0 * PI * k as f64 * u).cos()).sum::<f64>();
            prop_assert!((dirichlet(t, u) - direct).abs() < 1e-8);
        }
    }
}
