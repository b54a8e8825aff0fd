use std::f64::consts::PI;

use crate::error::{domain, Result};

use super::gamma::ln_gamma_pos;

/// Bessel function of the first kind `J_ν(x)` for `x ≥ 0`.
///
/// Only the orders needed by ball discrepancies are supported: `ν = d/2` with
/// `d ∈ {−1, 0, 1, …, 6}`. Small arguments use the power series; half-integer
/// orders otherwise use the closed spherical-Bessel forms and integer orders
/// Miller's downward recurrence.
///
/// # Errors
///
/// Unsupported orders and negative `x` are domain errors.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    let two_nu = 2.0 * nu;
    if two_nu != two_nu.round() || !(-1.0..=6.0).contains(&two_nu) {
        return domain(format!("bessel_j supports nu in {{-1/2, 0, 1/2, ..., 3}}, got {nu}"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("bessel_j requires finite x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if x < 2.0 {
        return Ok(series(nu, x));
    }
    let two_nu = two_nu as i32;
    if two_nu % 2 != 0 {
        Ok(half_integer(two_nu, x))
    } else {
        Ok(integer_order((two_nu / 2) as usize, x))
    }
}

fn series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = (nu * h.ln() - ln_gamma_pos(nu + 1.0)).exp();
    let mut sum = term;
    let q = -h * h;
    for m in 1..60 {
        let m = m as f64;
        term *= q / (m * (m + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_{n+1/2}(x) = √(2x/π) j_n(x)`, with `2ν = 2n + 1`.
fn half_integer(two_nu: i32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let n = (two_nu - 1) / 2;
    let j = if n == -1 {
        c / x
    } else {
        let mut jm1 = c / x;
        let mut j = s / x;
        for k in 0..n {
            let next = (2 * k + 1) as f64 / x * j - jm1;
            jm1 = j;
            j = next;
        }
        j
    };
    (2.0 * x / PI).sqrt() * j
}

fn integer_order(n: usize, x: f64) -> f64 {
    let start = (x as usize).max(n) + 30 + (3.0 * x.sqrt()) as usize;
    let start = start + start % 2;
    let mut jp1 = 0.0_f64;
    let mut j = 1e-300_f64;
    let mut norm = 0.0_f64;
    let mut wanted = 0.0_f64;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        // j now holds the unnormalized J_{k-1}
        let idx = k - 1;
        if idx == n {
            wanted = j;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += j;
    wanted / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `J_n(x) = (1/2π) ∫_0^{2π} cos(nτ − x sin τ) dτ` by the trapezoid rule,
    /// which is spectrally accurate for periodic integrands.
    fn bessel_integral(n: usize, x: f64) -> f64 {
        let m = 2 * (x as usize + n) + 400;
        let h = 2.0 * PI / m as f64;
        (0..m)
            .map(|i| {
                let tau = i as f64 * h;
                (n as f64 * tau - x * tau.sin()).cos()
            })
            .sum::<f64>()
            / m as f64
    }

    #[test]
    fn spot_values() {
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-15);
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert!((bessel_j(1.0, 1.0).unwrap() - 0.440_050_585_744_933_5).abs() < 1e-15);
    }

    #[test]
    fn unsupported_orders() {
        assert!(bessel_j(0.25, 1.0).is_err());
        assert!(bessel_j(3.5, 1.0).is_err());
        assert!(bessel_j(-1.0, 1.0).is_err());
        assert!(bessel_j(1.0, -1.0).is_err());
    }

    #[test]
    fn integer_orders_match_integral() {
        for n in 0..=3 {
            for i in 0..400 {
                let x = 0.013 + i as f64 * 1.25;
                let got = bessel_j(n as f64, x).unwrap();
                let want = bessel_integral(n, x);
                assert!((got - want).abs() < 1e-12, "n={n} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn half_integer_closed_forms() {
        for i in 0..500 {
            let x = 0.01 + i as f64;
            let (s, c) = x.sin_cos();
            let f = (2.0 / (PI * x)).sqrt();
            assert!((bessel_j(0.5, x).unwrap() - f * s).abs() < 1e-13);
            assert!((bessel_j(-0.5, x).unwrap() - f * c).abs() < 1e-13);
            assert!((bessel_j(1.5, x).unwrap() - f * (s / x - c)).abs() < 1e-12);
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_switch() {
        for two_nu in -1..=6 {
            let nu = two_nu as f64 / 2.0;
            let a = series(nu, 2.0);
            let b = if two_nu % 2 != 0 {
                half_integer(two_nu, 2.0)
            } else {
                integer_order((two_nu / 2) as usize, 2.0)
            };
            assert!((a - b).abs() < 1e-13, "nu={nu}");
        }
    }

    proptest! {
        #[test]
        fn half_order_pythagoras(x in 0.5f64..100.0) {
            let a = bessel_j(0.5, x).unwrap();
            let b = bessel_j(-0.5, x).unwrap();
            prop_assert!((a * a + b * b - 2.0 / (PI * x)).abs() < 1e-10);
        }

        #[test]
        fn three_term_recurrence(x in 0.1f64..500.0, two_nu in 1i32..=4) {
            // J_{ν−1} + J_{ν+1} = (2ν/x) J_ν
            let nu = two_nu as f64 / 2.0;
            let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
            let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
