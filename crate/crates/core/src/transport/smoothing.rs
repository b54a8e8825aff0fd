use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::discrepancy::{Frequency, SpectralSum};
use crate::error::{domain, Result};
use crate::specfun::legendre_all;
use crate::geometry::PointSet;
use crate::sum::Neumaier;

/// Upper bound on `W₂(A, uniform)` from the smoothing inequality with
/// heat-kernel time `t`:
/// `bound = √(2t) + 2 √(spectral_part + tail_bound)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingBound {
    pub t: f64,
    pub bound: f64,
    pub spectral_part: f64,
    pub tail_bound: f64,
    pub cutoff: usize,
}

impl SmoothingBound {
    fn new(t: f64, spectral_part: f64, tail_bound: f64, cutoff: usize) -> Self {
        Self {
            t,
            bound: (2.0 * t).sqrt() + 2.0 * (spectral_part + tail_bound).sqrt(),
            spectral_part,
            tail_bound,
            cutoff,
        }
    }
}

/// Heat-kernel times that optimize the expected bound for each ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `3^{2/3} / (2^{1/3} π N)`
    HarmonicSphere,
    /// `1 / (2^{7/3} π N)`
    HarmonicTorus,
    /// `1 / (4 π^{1/3} N)`
    Spherical,
}

impl Preset {
    pub fn t(self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Preset::HarmonicSphere => 3f64.powf(2.0 / 3.0) / (2f64.powf(1.0 / 3.0) * PI * nf),
            Preset::HarmonicTorus => 1.0 / (2f64.powf(7.0 / 3.0) * PI * nf),
            Preset::Spherical => 1.0 / (4.0 * PI.powf(1.0 / 3.0) * nf),
        }
    }

    /// The constant `c` in the expected bound `√(E bound²) ≤ c / √N`.
    pub fn constant(self) -> f64 {
        match self {
            Preset::HarmonicSphere => 3.08,
            Preset::HarmonicTorus => 1.75,
            Preset::Spherical => 1.76,
        }
    }
}

/// `Λ = max(2L, ⌈4/√t⌉)`; pass `l = 0` when the degree is unknown.
pub fn default_sphere_cutoff(t: f64, l: usize) -> usize {
    (2 * l).max((4.0 / t.sqrt()).ceil() as usize).max(1)
}

/// `K = 2 ⌈4 / (2π√t)⌉`.
pub fn default_torus_cutoff(t: f64) -> usize {
    2 * ((4.0 / (2.0 * PI * t.sqrt())).ceil() as usize).max(1)
}

/// `Σ_{ℓ≥1} e^{−ℓ(ℓ+1)t}`.
pub fn heat_trace_sphere(t: f64) -> f64 {
    let mut acc = Neumaier::new();
    let mut l = 1usize;
    loop {
        let term = (-((l * (l + 1)) as f64) * t).exp();
        acc.add(term);
        if term < 1e-18 * acc.value() || l > 10_000_000 {
            return acc.value();
        }
        l += 1;
    }
}

/// `Σ_m |Σ_n Y_ℓ^m(a_n)|² = (2ℓ+1)/(4π) Σ_{n,n'} P_ℓ(⟨a_n, a_n'⟩)` on `S²`.
pub fn sphere_spectral_power(points: &PointSet, ell: usize) -> Result<SpectralSum> {
    let powers = sphere_spectral_powers(points, ell)?;
    Ok(SpectralSum {
        frequency: Frequency::Degree(ell),
        power: powers[ell],
    })
}

/// Spectral powers for all degrees `0..=max_ell`, sharing one pass over the
/// pairs.
pub fn sphere_spectral_powers(points: &PointSet, max_ell: usize) -> Result<Vec<f64>> {
    points.expect_sphere(Some(2))?;
    let n = points.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = points.point(i);
            let mut row = vec![0.0; max_ell + 1];
            let mut buf = vec![0.0; max_ell + 1];
            for j in i + 1..n {
                let b = points.point(j);
                let t = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0);
                legendre_all(t, &mut buf);
                for (r, p) in row.iter_mut().zip(&buf) {
                    *r += p;
                }
            }
            row
        })
        .collect();
    let mut acc = vec![Neumaier::new(); max_ell + 1];
    for row in rows {
        for (a, v) in acc.iter_mut().zip(row) {
            a.add(2.0 * v);
        }
    }
    Ok(acc
        .iter()
        .enumerate()
        .map(|(l, a)| {
            let s = a.value() + n as f64;
            ((2 * l + 1) as f64 / (4.0 * PI) * s).max(0.0)
        })
        .collect())
}

/// Normalized spectral powers of a point set on `S²` up to a fixed degree,
/// reusable across heat-kernel times.
#[derive(Debug, Clone)]
pub struct SphereSpectrum {
    /// `power(ℓ) / N²` for `ℓ = 0..=cutoff`.
    normalized: Vec<f64>,
}

impl SphereSpectrum {
    pub fn new(points: &PointSet, cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return domain("cutoff >= 1 required");
        }
        let n = points.len() as f64;
        let normalized = sphere_spectral_powers(points, cutoff)?
            .into_iter()
            .map(|p| p / (n * n))
            .collect();
        Ok(Self { normalized })
    }

    pub fn cutoff(&self) -> usize {
        self.normalized.len() - 1
    }

    /// The bound at time `t`. Degrees above the cutoff are bounded by the
    /// worst case `power/N² ≤ (2ℓ+1)/(4π)` and compared with an integral.
    pub fn bound(&self, t: f64) -> Result<SmoothingBound> {
        if !(t > 0.0) {
            return domain("t > 0 required");
        }
        let cutoff = self.cutoff();
        let mut acc = Neumaier::new();
        for (l, &p) in self.normalized.iter().enumerate().skip(1) {
            let ll = (l * (l + 1)) as f64;
            acc.add((-ll * t).exp() / ll * p);
        }
        // (2ℓ+1) e^{−tℓ(ℓ+1)} ≤ (1 + 1/(2ℓ)) ∫_{ℓ−1}^{ℓ} (2x+1) e^{−tx(x+1)} dx
        let lf = cutoff as f64;
        let tail = (1.0 + 1.0 / (2.0 * lf + 2.0)) * (-t * lf * (lf + 1.0)).exp()
            / (t * 4.0 * PI * (lf + 1.0) * (lf + 2.0));
        Ok(SmoothingBound::new(t, acc.value(), tail, cutoff))
    }
}

/// Smoothing bound for `W₂(A, Vol/4π)` on `S²` with degree cutoff `Λ`.
pub fn w2_upper_bound_sphere(points: &PointSet, t: f64, cutoff: usize) -> Result<SmoothingBound> {
    if !(t > 0.0) {
        return domain("t > 0 required");
    }
    SphereSpectrum::new(points, cutoff)?.bound(t)
}

/// Normalized exponential sums of a point set on `T²` over `0 < |k| ≤ K`.
#[derive(Debug, Clone)]
pub struct TorusSpectrum {
    /// `(|k|², |N^{−1} Σ e^{2πi⟨k,a⟩}|²)`
    terms: Vec<(u64, f64)>,
    cutoff: usize,
}

impl TorusSpectrum {
    pub fn new(points: &PointSet, cutoff: usize) -> Result<Self> {
        points.expect_torus(Some(2))?;
        if cutoff == 0 {
            return domain("cutoff >= 1 required");
        }
        let n = points.len();
        let k = cutoff as i64;
        let width = 2 * cutoff + 1;
        let mut phases = vec![Complex64::new(0.0, 0.0); n * 2 * width];
        for (i, p) in points.points().enumerate() {
            for (j, &x) in p.iter().enumerate() {
                for (m, kk) in (-k..=k).enumerate() {
                    phases[(i * 2 + j) * width + m] =
                        Complex64::from_polar(1.0, 2.0 * PI * (kk as f64 * x).rem_euclid(1.0));
                }
            }
        }
        let mut ks = Vec::new();
        for k1 in -k..=k {
            for k2 in -k..=k {
                let r2 = k1 * k1 + k2 * k2;
                if r2 > 0 && r2 <= k * k {
                    ks.push((k1, k2));
                }
            }
        }
        let nf = n as f64;
        let terms = ks
            .par_iter()
            .map(|&(k1, k2)| {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    s += phases[(i * 2) * width + (k1 + k) as usize]
                        * phases[(i * 2 + 1) * width + (k2 + k) as usize];
                }
                ((k1 * k1 + k2 * k2) as u64, s.norm_sqr() / (nf * nf))
            })
            .collect();
        Ok(Self { terms, cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// The bound at time `t`. Frequencies with `|k| > K` use the worst case
    /// `|·|² ≤ 1` and the lattice-point count
    /// `π(√x − 2^{−1/2})² − 1 ≤ F(x) ≤ πx + (√2π + π/2 − 1)√x`.
    pub fn bound(&self, t: f64) -> Result<SmoothingBound> {
        if !(t > 0.0) {
            return domain("t > 0 required");
        }
        let a = 4.0 * PI * PI * t;
        let mut acc = Neumaier::new();
        for &(r2, p) in &self.terms {
            let x = r2 as f64;
            acc.add((-a * x).exp() / (4.0 * PI * PI * x) * p);
        }
        Ok(SmoothingBound::new(t, acc.value(), torus_tail(t, self.cutoff), self.cutoff))
    }
}

/// Bound on `Σ_{|k|>K} e^{−4π²|k|²t} / (4π²|k|²)` over `k ∈ Z²`.
fn torus_tail(t: f64, cutoff: usize) -> f64 {
    let a = 4.0 * PI * PI * t;
    let c = 2f64.sqrt() * PI + PI / 2.0 - 1.0;
    let kf = cutoff as f64;
    let x = kf * kf;
    let g = (-a * x).exp() / (4.0 * PI * PI * x);
    let lower = (PI * (kf - 0.5f64.sqrt()).powi(2) - 1.0).max(0.0);
    // Σ = ∫_X^∞ F(−g') − g(X)F(X), then integrate by parts against the
    // upper count; E₁(z) ≤ e^{−z} ln(1 + 1/z)
    let e1 = (-a * x).exp() * (1.0 + 1.0 / (a * x)).ln();
    let v = (PI * x + c * kf - lower) * g + e1 / (4.0 * PI) + c * (-a * x).exp() / (4.0 * PI * PI * kf);
    v.max(0.0)
}

/// Smoothing bound for `W₂(A, Vol)` on `T²` with Euclidean frequency cutoff `K`.
pub fn w2_upper_bound_torus2(points: &PointSet, t: f64, cutoff: usize) -> Result<SmoothingBound> {
    if !(t > 0.0) {
        return domain("t > 0 required");
    }
    TorusSpectrum::new(points, cutoff)?.bound(t)
}

/// Golden-section search for the `t ∈ [lo, hi]` minimizing `f(t).bound`,
/// carried out in `log t`.
pub fn minimize_log_t<F>(lo: f64, hi: f64, f: F) -> Result<SmoothingBound>
where
    F: Fn(f64) -> Result<SmoothingBound>,
{
    if !(lo > 0.0 && hi > lo) {
        return domain("0 < lo < hi required");
    }
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c.exp())?;
    let mut fd = f(d.exp())?;
    while b - a > 1e-6 {
        if fc.bound <= fd.bound {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d.exp())?;
        }
    }
    let mut best = if fc.bound <= fd.bound { fc } else { fd };
    for end in [lo, hi] {
        let e = f(end)?;
        if e.bound < best.bound {
            best = e;
        }
    }
    Ok(best)
}
