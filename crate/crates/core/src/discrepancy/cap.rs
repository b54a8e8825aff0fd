use std::f64::consts::PI;

use rand::Rng;

use crate::energy::{discrete_energy, harmonic_sphere_energy_deficit};
use crate::error::{domain, Error, Result};
use crate::geometry::{uniform_sphere, PointSet};
use crate::mc::{McEstimate, Welford};
use crate::specfun::ln_gamma;
use crate::theory::TheoryValue;

/// `Γ((d+1)/2) / (√π d Γ(d/2))`, the constant in the Stolarsky identity
/// `D² = c_d (I_{−1,d} N² − E_{−1}(A)) / N²`.
pub fn stolarsky_constant(d: usize) -> f64 {
    let df = d as f64;
    (ln_gamma((df + 1.0) / 2.0).unwrap() - ln_gamma(df / 2.0).unwrap()).exp() / (PI.sqrt() * df)
}

/// Squared spherical-cap `L²` discrepancy via the Stolarsky invariance
/// principle.
///
/// # Errors
///
/// Fails when the points are not on a sphere, or when roundoff drives the
/// value below `−1e−9`.
pub fn cap_l2_sq(points: &PointSet) -> Result<f64> {
    let d = points.expect_sphere(None)?;
    let n = points.len() as f64;
    let i = crate::energy::continuous_energy_constant(-1.0, d)?.value;
    let e = discrete_energy(points, -1.0)?;
    let d2 = stolarsky_constant(d) * (i * n * n - e) / (n * n);
    if d2 < -1e-9 {
        return Err(Error::Numeric(format!("negative squared cap discrepancy {d2:e}")));
    }
    Ok(d2.max(0.0))
}

/// Spherical-cap `L²` discrepancy `D_cap,2` via Stolarsky.
pub fn cap_discrepancy_stolarsky(points: &PointSet) -> Result<f64> {
    Ok(cap_l2_sq(points)?.sqrt())
}

/// Normalized volume of the cap `{y : ⟨x, y⟩ ≥ t}` on `S^d`:
/// `I_{(1−t)/2}(d/2, d/2)`.
pub fn cap_measure(d: usize, t: f64) -> f64 {
    if t <= -1.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let a = d as f64 / 2.0;
    statrs::function::beta::beta_reg(a, a, (1.0 - t) / 2.0)
}

/// Monte Carlo estimate of the squared cap discrepancy straight from its
/// definition: `x` uniform on `S^d`, `t` uniform on `[−1, 1]`. Each sample
/// is `2 (count/N − σ(C(x,t)))²`; the factor 2 accounts for the `dt` measure
/// on an interval of length 2.
pub fn cap_discrepancy_mc<R: Rng + ?Sized>(
    points: &PointSet,
    samples: usize,
    rng: &mut R,
) -> Result<McEstimate> {
    let d = points.expect_sphere(None)?;
    if samples == 0 {
        return domain("samples >= 1 required");
    }
    let n = points.len() as f64;
    let mut w = Welford::new();
    for _ in 0..samples {
        let x = uniform_sphere(d, rng);
        let t: f64 = rng.random_range(-1.0..1.0);
        let count = points
            .points()
            .filter(|p| p.iter().zip(x.coords()).map(|(a, b)| a * b).sum::<f64>() >= t)
            .count() as f64;
        let diff = count / n - cap_measure(d, t);
        w.push(2.0 * diff * diff);
    }
    Ok(McEstimate::from_welford("cap-l2-sq-mc", &w, None))
}

/// Two-term expansion of `E D²_cap,2` for the harmonic ensemble with `N` points.
pub fn expected_cap_discrepancy_harmonic(d: usize, n: usize) -> Result<TheoryValue> {
    if d == 0 || n == 0 {
        return domain("d >= 1 and N >= 1 required");
    }
    let df = d as f64;
    let nf = n as f64;
    let c = stolarsky_constant(d);
    let ln_fact = ln_gamma(df + 1.0)?;
    let lead = (std::f64::consts::LN_2 / df - ln_fact / df).exp() / PI * c;
    let kappa = crate::energy::kappa(d);
    let p = nf.powf(1.0 + 1.0 / df);
    Ok(TheoryValue::asymptotic(
        lead * nf.ln() / p + kappa * c / p,
        "N -> infinity",
        "o(N^(-1-1/d))",
    ))
}

/// Exact `E D²_cap,2` for the harmonic ensemble of degree `L`, via Stolarsky
/// and the exact expected energy.
pub fn expected_cap_discrepancy_harmonic_exact(d: usize, l: usize) -> Result<TheoryValue> {
    if d == 0 {
        return domain("d >= 1 required");
    }
    let n = crate::ensembles::point_count(&crate::ensembles::EnsembleSpec::HarmonicSphere { d, l })
        as f64;
    let deficit = harmonic_sphere_energy_deficit(d, l, -1.0)?;
    Ok(TheoryValue::quadrature(
        stolarsky_constant(d) * deficit / (n * n),
        "all L >= 0",
    ))
}

/// Exact `E D²_cap,2` for the spherical ensemble with `N` points via
/// Stolarsky and the closed-form expected energy:
/// `Γ(3/2) Γ(N) / (2 Γ(N + 3/2))`.
pub fn expected_cap_discrepancy_spherical(n: usize) -> Result<TheoryValue> {
    if n == 0 {
        return domain("N >= 1 required");
    }
    let nf = n as f64;
    let v = 0.5 * (ln_gamma(1.5)? + ln_gamma(nf)? - ln_gamma(nf + 1.5)?).exp();
    Ok(TheoryValue::exact(v, "N >= 1"))
}
