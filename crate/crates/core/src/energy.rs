//! Riesz energies of point sets on `S^d` and expected-energy oracles.
//!
//! Energies sum over *ordered* pairs `n ≠ m`, so every unordered pair is
//! counted twice.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::geometry::{chord, PointSet};
use crate::specfun::{
    digamma, gamma, gauss_jacobi_rule, jacobi_eval, ln_binomial, ln_gamma, JacobiParams,
};
use crate::sum::Neumaier;
use crate::theory::TheoryValue;

fn riesz_term(r: f64, s: f64) -> f64 {
    if s == -1.0 {
        r
    } else if s == -2.0 {
        r * r
    } else if s == 0.0 {
        -r.ln()
    } else {
        r.powf(-s)
    }
}

/// Discrete Riesz `s`-energy `Σ_{n≠m} |a_n − a_m|^{−s}`, or the logarithmic
/// energy `Σ_{n≠m} log(1/|a_n − a_m|)` when `s = 0`.
///
/// Rows are processed in parallel and combined in index order with
/// compensated summation, so the result does not depend on the thread count.
///
/// # Errors
///
/// The points must lie on a sphere. Coincident points make the energy
/// infinite for `s ≥ 0`, which is reported as an overflow.
pub fn discrete_energy(points: &PointSet, s: f64) -> Result<f64> {
    points.expect_sphere(None)?;
    if !s.is_finite() {
        return domain("s must be finite");
    }
    let n = points.len();
    let rows: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = points.point(i);
            let mut acc = Neumaier::new();
            for j in i + 1..n {
                let r = chord(xi, points.point(j));
                if r == 0.0 && s >= 0.0 {
                    return Err(Error::Overflow(format!(
                        "points {i} and {j} coincide; the energy is infinite for s = {s}"
                    )));
                }
                acc.add(riesz_term(r, s));
            }
            Ok(acc.value())
        })
        .collect();
    let mut total = Neumaier::new();
    for r in rows {
        total.add(r?);
    }
    let e = 2.0 * total.value();
    if !e.is_finite() {
        return Err(Error::Overflow(format!("energy overflowed for s = {s}")));
    }
    Ok(e)
}

/// `I_{s,d}` without range checks; negative non-integer gamma arguments are
/// continued analytically.
pub(crate) fn riesz_constant_raw(s: f64, d: usize) -> Result<f64> {
    let df = d as f64;
    if s == 0.0 {
        return Ok(0.5 * (digamma(df)? - digamma(df / 2.0)?) - LN_2);
    }
    let ln_part = (df - s - 1.0) * LN_2 + ln_gamma((df + 1.0) / 2.0)? - 0.5 * PI.ln();
    Ok(ln_part.exp() * gamma((df - s) / 2.0)? / gamma(df - s / 2.0)?)
}

/// Continuous energy `I_{s,d} = ∫∫ |x − y|^{−s}` against normalized surface
/// measure (logarithmic kernel at `s = 0`).
///
/// # Errors
///
/// Requires `s < d`.
pub fn continuous_energy_constant(s: f64, d: usize) -> Result<TheoryValue> {
    check_d(d)?;
    if !(s < d as f64) {
        return domain(format!("s < d required (s = {s}, d = {d})"));
    }
    let df = d as f64;
    let v = if s == 0.0 {
        riesz_constant_raw(0.0, d)?
    } else {
        let ln = (df - s - 1.0) * LN_2 + ln_gamma((df + 1.0) / 2.0)? + ln_gamma((df - s) / 2.0)?
            - 0.5 * PI.ln()
            - ln_gamma(df - s / 2.0)?;
        ln.exp()
    };
    Ok(TheoryValue::exact(v, "s < d"))
}

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        return domain("d >= 1 required");
    }
    Ok(())
}

/// Exact `E E_s(X)` for the harmonic ensemble `X(L, S^d)`:
///
/// `I_{s,d} N² − (d−1)! N² / (2^{d−1+s/2} Γ(d/2)² C(L+d/2, L)²) · ∫ P_L² (1−t)^{(d−2−s)/2} (1+t)^{(d−2)/2} dt`,
///
/// with `P_L = P_L^{(d/2,(d−2)/2)}`. The integral is a polynomial against a
/// Jacobi weight and is evaluated exactly by an `(L+1)`-point Gauss–Jacobi rule.
///
/// # Errors
///
/// Requires `s < d` and `s ≠ 0`.
pub fn harmonic_sphere_expected_energy_exact(d: usize, l: usize, s: f64) -> Result<TheoryValue> {
    check_d(d)?;
    if !(s < d as f64) {
        return domain(format!("s < d required (s = {s}, d = {d})"));
    }
    if s == 0.0 {
        return domain("s != 0 required; no closed form is provided for the logarithmic energy");
    }
    let n = crate::ensembles::point_count(&crate::ensembles::EnsembleSpec::HarmonicSphere { d, l })
        as f64;
    let i_sd = continuous_energy_constant(s, d)?.value;
    let deficit = harmonic_sphere_energy_deficit(d, l, s)?;
    Ok(TheoryValue::quadrature(
        i_sd * n * n - deficit,
        "s < d, s != 0",
    ))
}

/// The subtracted term `I_{s,d} N² − E E_s(X)` of the exact formula.
pub(crate) fn harmonic_sphere_energy_deficit(d: usize, l: usize, s: f64) -> Result<f64> {
    let df = d as f64;
    let n = crate::ensembles::point_count(&crate::ensembles::EnsembleSpec::HarmonicSphere { d, l })
        as f64;
    let kernel = JacobiParams::new(df / 2.0, (df - 2.0) / 2.0)?;
    let weight = JacobiParams::new((df - 2.0 - s) / 2.0, (df - 2.0) / 2.0)?;
    let rule = gauss_jacobi_rule(weight, l + 1)?;
    let integral = rule.integrate(|t| jacobi_eval(kernel, l, t).powi(2));
    let ln_pref = ln_gamma(df)? - (df - 1.0 + s / 2.0) * LN_2
        - 2.0 * ln_gamma(df / 2.0)?
        - 2.0 * ln_binomial(l as f64 + df / 2.0, l as f64);
    Ok(ln_pref.exp() * n * n * integral)
}

/// The second-order constant `C_{s,d}` of the expected harmonic-ensemble
/// energy for `s < 0`, and `κ_d` (returned only for `s = −1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConstants {
    pub c: f64,
    pub kappa: Option<f64>,
}

/// `C_{s,d}` in its three regimes `−1 < s < 0`, `s = −1`, `s < −1`, plus
/// `κ_d` when `s = −1`.
///
/// # Errors
///
/// Requires `s < 0`.
pub fn harmonic_sphere_energy_constants(s: f64, d: usize) -> Result<EnergyConstants> {
    check_d(d)?;
    if !(s < 0.0) {
        return domain(format!("s < 0 required, got {s}"));
    }
    let df = d as f64;
    let ln_fact = ln_gamma(df + 1.0)?;
    if s == -1.0 {
        return Ok(EnergyConstants {
            c: c_minus_one(d),
            kappa: Some(kappa(d)),
        });
    }
    let c = if s > -1.0 {
        let ln = (s / df) * ln_fact + ln_gamma((1.0 + s) / 2.0)? + ln_gamma((df - s) / 2.0)?
            - 0.5 * PI.ln()
            - (s / df) * LN_2
            - ln_gamma(1.0 + s / 2.0)?
            - ln_gamma((df + s) / 2.0)?;
        ln.exp() / (1.0 + s / df)
    } else {
        let ln = (1.0 / df - s - 2.0) * LN_2 + ln_gamma(-(1.0 + s) / 2.0)?
            - 0.5 * PI.ln()
            - ln_fact / df
            - ln_gamma(-s / 2.0)?;
        df * ln.exp()
    };
    Ok(EnergyConstants { c, kappa: None })
}

fn c_minus_one(d: usize) -> f64 {
    let df = d as f64;
    let ln_fact = crate::specfun::gamma::ln_gamma_pos(df + 1.0);
    (LN_2 / df - ln_fact / df).exp() / PI
}

/// `κ_d = 2^{1/d}/(π (d!)^{1/d}) (log(d!/2) + (4 + (−1)^d) d log 2 − 2d Σ_{j=1}^{⌊d/2⌋} 1/(d−2j+1))`.
pub fn kappa(d: usize) -> f64 {
    let df = d as f64;
    let ln_fact = crate::specfun::gamma::ln_gamma_pos(df + 1.0);
    let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
    let harmonic: f64 = (1..=d / 2).map(|j| 1.0 / (df - 2.0 * j as f64 + 1.0)).sum();
    c_minus_one(d) * (ln_fact - LN_2 + (4.0 + sign) * df * LN_2 - 2.0 * df * harmonic)
}

/// Leading terms of `E E_s(X)` for the harmonic ensemble with `N` points.
pub fn harmonic_sphere_expected_energy_asymptotic(d: usize, n: usize, s: f64) -> Result<TheoryValue> {
    let consts = harmonic_sphere_energy_constants(s, d)?;
    let df = d as f64;
    let nf = n as f64;
    let i_sd = continuous_energy_constant(s, d)?.value;
    let (term, order) = if s > -1.0 {
        (consts.c * nf.powf(1.0 + s / df), "O(N^(1-1/d))".to_string())
    } else if s == -1.0 {
        let p = nf.powf(1.0 - 1.0 / df);
        (
            consts.c * p * nf.ln() + consts.kappa.unwrap_or(0.0) * p,
            "O(N^(1-2/d) log N)".to_string(),
        )
    } else {
        (
            consts.c * nf.powf(1.0 - 1.0 / df),
            "O(N^(1+max(s,-2)/d))".to_string(),
        )
    };
    Ok(TheoryValue::asymptotic(i_sd * nf * nf - term, "s < 0, N -> infinity", order))
}

/// Exact `E E_s(Z)` for the spherical ensemble with `N` points:
/// `I_{s,2} N² − Γ(1 − s/2)/2^s · N² Γ(N)/Γ(N + 1 − s/2)`.
///
/// For `2 < s < 4` the constant `I_{s,2}` is taken by analytic continuation.
///
/// # Errors
///
/// Requires `s < 4`, `s ∉ {0, 2}` and `N ≥ 1`.
pub fn spherical_expected_energy(n: usize, s: f64) -> Result<TheoryValue> {
    if !(s < 4.0) || s == 0.0 || s == 2.0 {
        return domain(format!("s < 4 and s not in {{0, 2}} required, got {s}"));
    }
    if n == 0 {
        return domain("N >= 1 required");
    }
    let range = "s < 4, s != 0, 2";
    if n == 1 {
        return Ok(TheoryValue::exact(0.0, range));
    }
    let nf = n as f64;
    let i_s2 = riesz_constant_raw(s, 2)?;
    let ratio = (ln_gamma(nf)? - ln_gamma(nf + 1.0 - s / 2.0)?).exp();
    let c = gamma(1.0 - s / 2.0)? * (-s * LN_2).exp();
    Ok(TheoryValue::exact(i_s2 * nf * nf - c * nf * nf * ratio, range))
}

/// `E E_s(Y) = (N² − N) I_{s,d}` for `N` i.i.d. uniform points on `S^d`.
pub fn iid_expected_energy(d: usize, n: usize, s: f64) -> Result<TheoryValue> {
    let i = continuous_energy_constant(s, d)?.value;
    let nf = n as f64;
    Ok(TheoryValue::exact((nf * nf - nf) * i, "s < d"))
}
