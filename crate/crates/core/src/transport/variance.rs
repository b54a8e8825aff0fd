use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::specfun::{legendre_triple_integral, ln_binomial};
use crate::sum::Neumaier;
use crate::theory::TheoryValue;

/// Exact `E Σ_m |Σ_n Y_ℓ^m(X_n)|²` for the harmonic ensemble of degree `L`
/// on `S²`:
/// `(2ℓ+1)/(4π) Σ_{ℓ₁≤L<ℓ₂} (2ℓ₁+1)(2ℓ₂+1) · ½∫P_{ℓ₁}P_{ℓ₂}P_ℓ`.
/// Only `ℓ₂ ≤ ℓ₁ + ℓ` contributes.
pub fn harmonic_sphere_spectral_variance_exact(l: usize, ell: usize) -> Result<TheoryValue> {
    if ell == 0 {
        return domain("ell >= 1 required");
    }
    let mut acc = Neumaier::new();
    for l1 in 0..=l {
        for l2 in l + 1..=l1 + ell {
            let w = ((2 * l1 + 1) * (2 * l2 + 1)) as f64;
            acc.add(w * legendre_triple_integral(l1, l2, ell));
        }
    }
    Ok(TheoryValue::exact(
        (2 * ell + 1) as f64 / (4.0 * PI) * acc.value(),
        "L >= 0, ell >= 1",
    ))
}

/// `(2^{3/2}·3/π²) ℓ(ℓ+1) √N`, `N = (L+1)²`.
pub fn harmonic_sphere_spectral_variance_bound(l: usize, ell: usize) -> f64 {
    let n = ((l + 1) * (l + 1)) as f64;
    2f64.powf(1.5) * 3.0 / (PI * PI) * (ell * (ell + 1)) as f64 * n.sqrt()
}

/// `E Σ_m |Σ_n Y_ℓ^m(Z_n)|²` for the spherical ensemble with `N` points:
/// `(2ℓ+1)N/(4π) Σ_{k=1}^{ℓ} (−1)^{k+1} C(ℓ,k) C(ℓ+k,k) / C(N+k,k)`.
///
/// The alternating sum is used for `ℓ ≤ √N + 1/√N − 1/2`, where its terms
/// decrease. Larger `ℓ` return the bound `(2ℓ+1)N/(4π)` with kind
/// upper-bound.
pub fn spherical_spectral_variance_exact(n: usize, ell: usize) -> Result<TheoryValue> {
    if ell == 0 {
        return domain("ell >= 1 required");
    }
    if n == 0 {
        return domain("N >= 1 required");
    }
    let nf = n as f64;
    let lf = ell as f64;
    let pre = (2.0 * lf + 1.0) * nf / (4.0 * PI);
    let limit = nf.sqrt() + 1.0 / nf.sqrt() - 0.5;
    if lf > limit {
        return Ok(TheoryValue::upper_bound(pre, "ell > sqrt(N) + 1/sqrt(N) - 1/2"));
    }
    let mut acc = Neumaier::new();
    for k in (1..=ell).rev() {
        let kf = k as f64;
        let mag = (ln_binomial(lf, kf) + ln_binomial(lf + kf, kf) - ln_binomial(nf + kf, kf)).exp();
        acc.add(if k % 2 == 1 { mag } else { -mag });
    }
    Ok(TheoryValue::exact(
        pre * acc.value(),
        "1 <= ell <= sqrt(N) + 1/sqrt(N) - 1/2",
    ))
}

/// `ℓ(ℓ+1) √N / (2π)`.
pub fn spherical_spectral_variance_bound(n: usize, ell: usize) -> f64 {
    (ell * (ell + 1)) as f64 * (n as f64).sqrt() / (2.0 * PI)
}
