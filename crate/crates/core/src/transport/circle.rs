use std::f64::consts::PI;

use num_complex::Complex64;

use crate::discrepancy::{expected_periodic_l2_1d, periodic_l2_exact, zeta2_tail, Truncated};
use crate::error::{domain, Error, Result};
use crate::geometry::PointSet;
use crate::specfun::EULER_GAMMA;
use crate::sum::Neumaier;
use crate::theory::TheoryValue;

const MAX_FOURIER_CUTOFF: usize = 10_000_000;

/// `∫_0^y ‖v‖² dv` with `‖·‖` the distance to the nearest integer.
fn cum_sq_dist(y: f64) -> f64 {
    let k = y.round();
    let r = y - k;
    k / 12.0 + r * r * r / 3.0
}

/// Cost of sending the sorted points, in order, onto consecutive arcs of
/// length `1/N` starting at `s`.
fn shifted_cost(sorted: &[f64], s: f64) -> f64 {
    let h = 1.0 / sorted.len() as f64;
    let mut acc = Neumaier::new();
    for (n, &x) in sorted.iter().enumerate() {
        let c = x - s - n as f64 * h;
        acc.add(cum_sq_dist(c) - cum_sq_dist(c - h));
    }
    acc.value()
}

/// Exact `W₂` between the empirical measure of points on `T¹` and the
/// uniform measure.
///
/// The optimal plan moves the sorted points onto consecutive arcs of length
/// `1/N`, for some starting offset `s`. The cost is piecewise quadratic in
/// `s`, with breaks where an arc endpoint passes the antipode of its point;
/// each piece is minimized in closed form.
pub fn w2_circle_quantile(points: &PointSet) -> Result<f64> {
    points.expect_torus(Some(1))?;
    if points.is_empty() {
        return domain("N >= 1 required");
    }
    let mut sorted = points.coords().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let h = 1.0 / n as f64;
    // offsets where x_n − s − n h or x_n − s − (n+1) h is a half-integer
    let mut breaks: Vec<f64> = Vec::with_capacity(2 * n + 2);
    for (i, &x) in sorted.iter().enumerate() {
        for j in [i, i + 1] {
            breaks.push((x - j as f64 * h - 0.5).rem_euclid(1.0));
        }
    }
    breaks.push(0.0);
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut best = f64::INFINITY;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let fa = shifted_cost(&sorted, a);
        best = best.min(fa);
        if b - a < 1e-15 {
            continue;
        }
        let m = 0.5 * (a + b);
        let fm = shifted_cost(&sorted, m);
        let fb = shifted_cost(&sorted, b);
        let curv = 4.0 * (fa - 2.0 * fm + fb) / ((b - a) * (b - a));
        if curv > 0.0 {
            let slope = (fb - fa) / (b - a);
            let s = (m - slope / curv).clamp(a, b);
            best = best.min(shifted_cost(&sorted, s));
        }
        best = best.min(fm);
    }
    best = best.min(shifted_cost(&sorted, 1.0));
    Ok(best.max(0.0).sqrt())
}

/// `W₂` on `T¹` from its Fourier series `Σ_{k≠0} |N^{−1}Σ e^{2πika_n}|²/(4π²k²)`,
/// truncated at the smallest `K` whose certified tail `Σ_{|k|>K} 1/(4π²k²)`
/// is below `tolerance`. The returned `sq` is `W₂²`.
///
/// # Errors
///
/// Resource error when `K` would exceed `10⁷`.
pub fn w2_circle_fourier(points: &PointSet, tolerance: f64) -> Result<Truncated> {
    points.expect_torus(Some(1))?;
    if !(tolerance > 0.0) {
        return domain("tolerance > 0 required");
    }
    if points.is_empty() {
        return domain("N >= 1 required");
    }
    let tail = |k: usize| zeta2_tail(k) / (2.0 * PI * PI);
    // the tail is close to 1/(2π²K); start there and correct
    let mut cutoff = ((1.0 / (2.0 * PI * PI * tolerance)).ceil() as usize).max(1);
    if cutoff > 2 * MAX_FOURIER_CUTOFF {
        return Err(Error::Resource(format!(
            "tolerance {tolerance:e} needs a cutoff above {MAX_FOURIER_CUTOFF}"
        )));
    }
    while cutoff > 1 && tail(cutoff - 1) < tolerance {
        cutoff -= 1;
    }
    while tail(cutoff) >= tolerance {
        cutoff += 1;
    }
    if cutoff > MAX_FOURIER_CUTOFF {
        return Err(Error::Resource(format!(
            "tolerance {tolerance:e} needs a cutoff above {MAX_FOURIER_CUTOFF}"
        )));
    }
    let xs = points.coords();
    let n = xs.len();
    let steps: Vec<Complex64> = xs
        .iter()
        .map(|&x| Complex64::from_polar(1.0, 2.0 * PI * x))
        .collect();
    let mut cur = steps.clone();
    let mut acc = Neumaier::new();
    for k in 1..=cutoff {
        if k % 512 == 0 {
            // re-anchor the phase recurrence
            for (c, &x) in cur.iter_mut().zip(xs) {
                *c = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 * x).rem_euclid(1.0));
            }
        }
        let s: Complex64 = cur.iter().sum();
        let kf = k as f64;
        acc.add(s.norm_sqr() / (kf * kf));
        for (c, st) in cur.iter_mut().zip(&steps) {
            *c *= st;
        }
    }
    let nf = n as f64;
    Ok(Truncated {
        sq: 2.0 * acc.value() / (4.0 * PI * PI * nf * nf),
        tail: tail(cutoff),
        cutoff,
    })
}

/// `W₂²` on `T¹` in closed pairwise form, equal to half the squared periodic
/// `L²` discrepancy.
pub fn w2_circle_sq_exact(points: &PointSet) -> Result<f64> {
    points.expect_torus(Some(1))?;
    Ok(periodic_l2_exact(points)? / 2.0)
}

/// Exact `E W₂²` for the harmonic ensemble on `T¹` with `N = 2T+1` points.
pub fn expected_w2_circle_harmonic(t: usize) -> TheoryValue {
    let v = expected_periodic_l2_1d(t);
    TheoryValue::exact(v.value / 2.0, "T >= 0")
}

/// `(log N + γ + 1) / (2π² N²)`.
pub fn expected_w2_circle_harmonic_asymptotic(n: usize) -> Result<TheoryValue> {
    if n == 0 {
        return domain("N >= 1 required");
    }
    let nf = n as f64;
    Ok(TheoryValue::asymptotic(
        (nf.ln() + EULER_GAMMA + 1.0) / (2.0 * PI * PI * nf * nf),
        "N = 2T+1 -> infinity",
        "O((log N)^2 / N^3)",
    ))
}
