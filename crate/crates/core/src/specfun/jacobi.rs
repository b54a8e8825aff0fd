use crate::error::{domain, Result};

use super::gamma::{ln_binomial, ln_gamma_pos};

/// Parameters `(α, β)` of the Jacobi weight `(1−t)^α (1+t)^β` on `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
}

impl JacobiParams {
    /// # Errors
    ///
    /// Returns a domain error unless `alpha > -1` and `beta > -1`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return domain(format!(
                "Jacobi parameters need alpha > -1 and beta > -1, got ({alpha}, {beta})"
            ));
        }
        Ok(Self { alpha, beta })
    }

    pub fn legendre() -> Self {
        Self { alpha: 0.0, beta: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `∫_{−1}^{1} (1−t)^α (1+t)^β dt`.
    pub fn total_mass(&self) -> f64 {
        jacobi_norm(*self, 0)
    }
}

/// `P_k^{(α,β)}(t)` by the forward three-term recurrence.
pub fn jacobi_eval(params: JacobiParams, k: usize, t: f64) -> f64 {
    jacobi_pair(params, k, t).0
}

/// Returns `(P_k(t), P_{k−1}(t))`, with `P_{−1} = 0`.
pub(crate) fn jacobi_pair(params: JacobiParams, k: usize, t: f64) -> (f64, f64) {
    let (a, b) = (params.alpha, params.beta);
    if k == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = (a + 1.0) + 0.5 * (a + b + 2.0) * (t - 1.0);
    for n in 2..=k {
        let n = n as f64;
        let s = 2.0 * n + a + b;
        let c0 = 2.0 * n * (n + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * t + a * a - b * b);
        let c2 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
        let next = (c1 * p - c2 * p_prev) / c0;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// `P_k(t)` and its derivative, for `|t| < 1`.
pub(crate) fn jacobi_with_derivative(params: JacobiParams, k: usize, t: f64) -> (f64, f64) {
    let (p, p_prev) = jacobi_pair(params, k, t);
    if k == 0 {
        return (p, 0.0);
    }
    let (a, b) = (params.alpha, params.beta);
    let n = k as f64;
    let s = 2.0 * n + a + b;
    let dp = (n * ((a - b) - s * t) * p + 2.0 * (n + a) * (n + b) * p_prev) / (s * (1.0 - t * t));
    (p, dp)
}

/// Squared norm `∫ P_k² (1−t)^α (1+t)^β dt`.
pub fn jacobi_norm(params: JacobiParams, k: usize) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    let ln2 = std::f64::consts::LN_2;
    if k == 0 {
        // The general formula has a removable 0/0 when α + β = −1.
        return ((a + b + 1.0) * ln2 + ln_gamma_pos(a + 1.0) + ln_gamma_pos(b + 1.0)
            - ln_gamma_pos(a + b + 2.0))
        .exp();
    }
    let n = k as f64;
    let ln = (a + b + 1.0) * ln2 + ln_gamma_pos(n + a + 1.0) + ln_gamma_pos(n + b + 1.0)
        - ln_gamma_pos(n + a + b + 1.0)
        - ln_gamma_pos(n + 1.0);
    ln.exp() / (2.0 * n + a + b + 1.0)
}

/// Legendre polynomial `P_ℓ(t)` with `P_ℓ(1) = 1`.
pub fn legendre_eval(ell: usize, t: f64) -> f64 {
    if ell == 0 {
        return 1.0;
    }
    let mut p_prev = 1.0;
    let mut p = t;
    for n in 2..=ell {
        let n = n as f64;
        let next = ((2.0 * n - 1.0) * t * p - (n - 1.0) * p_prev) / n;
        p_prev = p;
        p = next;
    }
    p
}

/// Writes `P_0(t), …, P_L(t)` into `out` (which must have length `L + 1`).
pub fn legendre_all(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = t;
    for n in 2..out.len() {
        let nf = n as f64;
        out[n] = ((2.0 * nf - 1.0) * t * out[n - 1] - (nf - 1.0) * out[n - 2]) / nf;
    }
}

/// `(1/2) ∫_{−1}^{1} P_{l1}(t) P_{l2}(t) P_l(t) dt`.
pub fn legendre_triple_integral(l1: usize, l2: usize, l: usize) -> f64 {
    let sum = l1 + l2 + l;
    if sum % 2 == 1 {
        return 0.0;
    }
    let g = sum / 2;
    if g < l1.max(l2).max(l) {
        return 0.0;
    }
    let c = |top: usize, bot: usize| ln_binomial(top as f64, bot as f64);
    let ln = c(2 * g - 2 * l1, g - l1) + c(2 * g - 2 * l2, g - l2) + c(2 * g - 2 * l, g - l)
        - c(2 * g, g);
    ln.exp() / (sum + 1) as f64
}
