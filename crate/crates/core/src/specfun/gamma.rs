use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_78;

/// Below this the argument is shifted up before the asymptotic series is used.
const STIRLING_MIN: f64 = 15.0;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let mut z = x;
    let mut prod = 1.0;
    while z < STIRLING_MIN {
        prod *= z;
        z += 1.0;
    }
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    // Bernoulli terms B_{2k} / (2k (2k-1) z^{2k-1})
    let series = zi
        * (1.0 / 12.0
            + zi2
                * (-1.0 / 360.0
                    + zi2
                        * (1.0 / 1260.0
                            + zi2
                                * (-1.0 / 1680.0
                                    + zi2
                                        * (1.0 / 1188.0
                                            + zi2 * (-691.0 / 360_360.0 + zi2 / 156.0))))));
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series - prod.ln()
}

/// `Γ(x)` for real `x` that is not a non-positive integer.
///
/// Negative arguments go through the reflection formula.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || (x <= 0.0 && x == x.floor()) {
        return domain(format!("gamma has a pole at {x}"));
    }
    if x > 0.0 {
        if x > 171.7 {
            return Err(crate::Error::Overflow(format!("gamma({x})")));
        }
        Ok(ln_gamma_pos(x).exp())
    } else {
        let s = (PI * x).sin();
        Ok(PI / (s * ln_gamma_pos(1.0 - x).exp()))
    }
}

/// Digamma function `ψ₀(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("digamma requires x > 0, got {x}"));
    }
    let mut z = x;
    let mut acc = 0.0;
    while z < 12.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let zi2 = 1.0 / (z * z);
    let series = zi2
        * (1.0 / 12.0
            - zi2
                * (1.0 / 120.0
                    - zi2
                        * (1.0 / 252.0
                            - zi2
                                * (1.0 / 240.0
                                    - zi2 * (1.0 / 132.0 - zi2 * (691.0 / 32_760.0 - zi2 / 12.0))))));
    Ok(acc + z.ln() - 0.5 / z - series)
}

/// `ln C(n, k)` for real `n ≥ k ≥ 0`.
pub fn ln_binomial(n: f64, k: f64) -> f64 {
    ln_gamma_pos(n + 1.0) - ln_gamma_pos(k + 1.0) - ln_gamma_pos(n - k + 1.0)
}

/// Binomial coefficient `C(n, k)` for integers, as a float.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n > 120 {
        return ln_binomial(n as f64, k as f64).exp();
    }
    // exact in u128: each partial product is itself a binomial coefficient
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn ln_gamma_spot_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert!((ln_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-14);
        let mut g = PI.sqrt();
        let mut a = 0.5;
        while a < 7.5 {
            g *= a;
            a += 1.0;
        }
        assert_relative_eq!(ln_gamma(7.5).unwrap(), g.ln(), max_relative = 1e-14);
        assert!((ln_gamma(7.5).unwrap() - 7.534_364_236_758_734).abs() < 1e-13);
    }

    #[test]
    fn ln_gamma_factorials() {
        let mut f = 1.0_f64;
        for n in 1..60u32 {
            f *= n as f64;
            assert_relative_eq!(ln_gamma(n as f64 + 1.0).unwrap(), f.ln(), max_relative = 1e-13);
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(digamma(0.0).is_err());
        assert!(gamma(-2.0).is_err());
    }

    #[test]
    fn gamma_reflection() {
        // Γ(-1/2) = -2√π
        assert_relative_eq!(gamma(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-14);
    }

    #[test]
    fn digamma_spot_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-14);
        let expect = -EULER_GAMMA - 2.0 * 2f64.ln();
        assert!((digamma(0.5).unwrap() - expect).abs() < 1e-13);
        assert!((digamma(0.5).unwrap() + 1.963_510_026_0).abs() < 1e-10);
    }

    #[test]
    fn digamma_matches_series() {
        // ψ(x) = -γ + Σ_{k≥0} (1/(k+1) - 1/(k+x)), summed with a tail correction
        for &x in &[0.3, 1.7, 4.25, 9.5] {
            let n = 200_000;
            let mut s = -EULER_GAMMA;
            for k in 0..n {
                s += 1.0 / (k as f64 + 1.0) - 1.0 / (k as f64 + x);
            }
            // tail Σ_{k≥n} (x-1)/((k+1)(k+x)) ≈ (x-1)/n
            s += (x - 1.0) / (n as f64 + 0.5 * x);
            assert!((digamma(x).unwrap() - s).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_relative_eq!(binomial(66, 33), 7.219_428_434_016_265_74e18, max_relative = 1e-14);
        assert_eq!(binomial(3, 5), 0.0);
        assert_relative_eq!(ln_binomial(10.0, 3.0).exp(), 120.0, max_relative = 1e-13);
    }

    proptest! {
        #[test]
        fn ln_gamma_recurrence(x in 0.01f64..100.0) {
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = ln_gamma(x).unwrap() + x.ln();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn digamma_recurrence(x in 0.01f64..100.0) {
            let lhs = digamma(x + 1.0).unwrap();
            let rhs = digamma(x).unwrap() + 1.0 / x;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
