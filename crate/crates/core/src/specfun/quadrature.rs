use std::f64::consts::LN_2;

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};

use super::gamma::ln_gamma_pos;
use super::jacobi::{jacobi_with_derivative, JacobiParams};

const MAX_NEWTON: usize = 100;

/// An `n`-point Gauss–Jacobi rule: exact for polynomials of degree `≤ 2n − 1`
/// against the weight `(1−t)^α (1+t)^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub params: JacobiParams,
}

impl QuadratureRule {
    /// `Σ w_i f(x_i)`, approximating `∫ f(t) (1−t)^α (1+t)^β dt`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds the `n`-point Gauss–Jacobi rule.
///
/// Starting values for the nodes are the eigenvalues of the symmetric Jacobi
/// matrix; each is then polished by Newton's method on `P_n^{(α,β)}`, and the
/// weights follow from `P_n'` at the polished nodes.
///
/// # Errors
///
/// `n = 0` is a domain error. A node whose Newton polish does not settle
/// within 100 iterations is reported as a numeric error naming its index.
pub fn gauss_jacobi_rule(params: JacobiParams, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return domain("quadrature rule needs at least one node");
    }
    let (a, b) = (params.alpha(), params.beta());
    let nf = n as f64;
    let ln_c = (a + b + 1.0) * LN_2 + ln_gamma_pos(nf + a + 1.0) + ln_gamma_pos(nf + b + 1.0)
        - ln_gamma_pos(nf + a + b + 1.0)
        - ln_gamma_pos(nf + 1.0);
    let c = ln_c.exp();

    let mut guesses = jacobi_matrix_eigenvalues(a, b, n);
    guesses.sort_by(f64::total_cmp);

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (i, &z0) in guesses.iter().enumerate() {
        // keep Newton inside the bracket formed by the neighbouring guesses
        let lo = if i == 0 { -1.0 } else { 0.5 * (guesses[i - 1] + z0) };
        let hi = if i + 1 == n { 1.0 } else { 0.5 * (z0 + guesses[i + 1]) };
        let mut z = z0;
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (p, dp) = jacobi_with_derivative(params, n, z);
            let next = z - p / dp;
            if !next.is_finite() || next <= lo || next >= hi {
                break;
            }
            let step = (next - z).abs();
            z = next;
            if step <= 1e-15 * (1.0 + z.abs()) {
                converged = true;
                break;
            }
        }
        // Newton may stall one ulp away from the root; the eigenvalue is
        // already accurate to a few ulps, so only a wild step is fatal.
        if !converged && (z - z0).abs() > 1e-10 {
            return Err(Error::Numeric(format!(
                "Gauss-Jacobi node {i} of {n} did not converge (alpha={a}, beta={b})"
            )));
        }
        let dp = jacobi_with_derivative(params, n, z).1;
        if !dp.is_finite() || dp == 0.0 {
            return Err(Error::Numeric(format!(
                "Gauss-Jacobi node {i} of {n}: derivative vanished (alpha={a}, beta={b})"
            )));
        }
        nodes.push(z);
        weights.push(c / ((1.0 - z * z) * dp * dp));
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Numeric(format!(
            "Gauss-Jacobi nodes collapsed for n={n} (alpha={a}, beta={b})"
        )));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        params,
    })
}

/// Eigenvalues of the symmetric tridiagonal matrix of the orthonormal Jacobi
/// recurrence, which are the zeros of `P_n^{(α,β)}`.
fn jacobi_matrix_eigenvalues(a: f64, b: f64, n: usize) -> Vec<f64> {
    let diag = |k: usize| {
        let s = 2.0 * k as f64 + a + b;
        if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        }
    };
    let off = |k: usize| {
        // coupling between degrees k−1 and k
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        if k == 1 {
            (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))).sqrt()
        } else {
            (4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0)))
                .sqrt()
        }
    };
    let m = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            diag(i)
        } else if i + 1 == j {
            off(j)
        } else if j + 1 == i {
            off(i)
        } else {
            0.0
        }
    });
    m.symmetric_eigenvalues().iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::ln_gamma;

    /// `μ_m = ∫ t^m (1−t)^α (1+t)^β dt` from the beta integral `μ_0` and the
    /// recurrence `(m+α+β+2) μ_{m+1} = m μ_{m−1} + (β−α) μ_m`, which follows
    /// from integrating the derivative of `t^m (1−t)^{α+1} (1+t)^{β+1}`.
    fn moment(m: usize, a: f64, b: f64) -> f64 {
        let mu0 = ((a + b + 1.0) * LN_2 + ln_gamma(a + 1.0).unwrap() + ln_gamma(b + 1.0).unwrap()
            - ln_gamma(a + b + 2.0).unwrap())
        .exp();
        let (mut prev, mut cur) = (0.0, mu0);
        for k in 0..m {
            let kf = k as f64;
            let next = (kf * prev + (b - a) * cur) / (kf + a + b + 2.0);
            prev = cur;
            cur = next;
        }
        cur
    }

    #[test]
    fn legendre_small_rules() {
        let r = gauss_jacobi_rule(JacobiParams::legendre(), 1).unwrap();
        assert!(r.nodes[0].abs() < 1e-15);
        assert!((r.weights[0] - 2.0).abs() < 1e-14);
        let r = gauss_jacobi_rule(JacobiParams::legendre(), 2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15 && (r.nodes[1] - x).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-14 && (r.weights[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn squared_degree_one_half_weight() {
        // ∫ ((3t+1)/2)² (1−t)^{1/2} dt = 92√2/105 by the substitution u = 1 − t.
        let r = gauss_jacobi_rule(JacobiParams::new(0.5, 0.0).unwrap(), 8).unwrap();
        let q = r.integrate(|t| (0.5 * (3.0 * t + 1.0)).powi(2));
        assert!((q - 92.0 * 2f64.sqrt() / 105.0).abs() < 1e-14);
    }

    #[test]
    fn monomials_exact() {
        for &(a, b) in &[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.5, 0.5), (-0.5, -0.5), (2.5, 1.0), (-0.75, 0.3)] {
            let p = JacobiParams::new(a, b).unwrap();
            for n in [1usize, 2, 3, 5, 9, 16] {
                let r = gauss_jacobi_rule(p, n).unwrap();
                assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
                assert!(r.weights.iter().all(|&w| w > 0.0));
                for m in 0..2 * n {
                    let q = r.integrate(|t| t.powi(m as i32));
                    let e = moment(m, a, b);
                    let scale = moment(0, a, b);
                    assert!((q - e).abs() <= 1e-12 * scale, "a={a} b={b} n={n} m={m}: {q} vs {e}");
                }
            }
        }
    }

    #[test]
    fn weights_sum_to_mass_for_large_n() {
        for &(a, b) in &[(0.0, 0.0), (1.5, 0.0), (0.5, 0.5), (2.0, 1.0), (-0.5, 0.0)] {
            let p = JacobiParams::new(a, b).unwrap();
            for n in [32usize, 65, 100, 150] {
                let r = gauss_jacobi_rule(p, n).unwrap();
                let s: f64 = r.weights.iter().sum();
                assert!((s / p.total_mass() - 1.0).abs() < 1e-12, "a={a} b={b} n={n}");
            }
        }
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(gauss_jacobi_rule(JacobiParams::legendre(), 0).is_err());
    }
}
