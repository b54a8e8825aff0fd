use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Frequency, SpectralSum, Truncated};
use crate::error::{domain, Error, Result};
use crate::geometry::PointSet;
use crate::specfun::EULER_GAMMA;
use crate::sum::Neumaier;
use crate::theory::TheoryValue;

/// Largest box half-width `K` accepted by [`periodic_l2`].
const MAX_CUTOFF: usize = 1_000_000;
/// Upper limit on the arithmetic work of a single truncated sum.
const MAX_WORK: f64 = 2e9;

/// `1 / r(k)` with `r(k) = max(2π²k²/3, 1)`.
fn weight(k: i64) -> f64 {
    if k == 0 {
        1.0
    } else {
        3.0 / (2.0 * PI * PI * (k * k) as f64)
    }
}

/// `Σ_{k>n} 1/k²`.
pub fn zeta2_tail(n: usize) -> f64 {
    let m = n.max(64);
    let mut acc = Neumaier::default();
    for k in (n + 1..=m).rev() {
        let kf = k as f64;
        acc.add(1.0 / (kf * kf));
    }
    // Euler–Maclaurin for k > m
    let mf = m as f64;
    let r = 1.0 / mf;
    acc.add(r - r * r / 2.0 + r.powi(3) / 6.0 - r.powi(5) / 30.0 + r.powi(7) / 42.0);
    acc.value()
}

/// `Σ_n e^{2πi⟨k, a_n⟩}` and its squared modulus.
pub fn exponential_sum(points: &PointSet, k: &[i64]) -> Result<SpectralSum> {
    points.expect_torus(Some(k.len()))?;
    let mut s = Complex64::new(0.0, 0.0);
    for p in points.points() {
        let phase: f64 = p.iter().zip(k).map(|(x, &kj)| x * kj as f64).sum();
        s += Complex64::from_polar(1.0, 2.0 * PI * phase.rem_euclid(1.0));
    }
    Ok(SpectralSum {
        frequency: Frequency::Lattice(k.to_vec()),
        power: s.norm_sqr(),
    })
}

/// `E|Σ_n e^{2πi⟨k, X_n⟩}|² = N − Π_j max(2T+1−|k_j|, 0)` for the harmonic
/// ensemble on `T^d` with `N = (2T+1)^d`.
pub fn torus_variance(d: usize, t: usize, k: &[i64]) -> Result<TheoryValue> {
    if k.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: k.len(),
        });
    }
    let side = (2 * t + 1) as f64;
    let n = side.powi(d as i32);
    let v: f64 = k
        .iter()
        .map(|&kj| (side - kj.unsigned_abs() as f64).max(0.0))
        .product();
    Ok(TheoryValue::exact(n - v, "T >= 0, all k"))
}

/// Certified bound on `3^{−d} Σ_{‖k‖∞ > K} Π_j 1/r(k_j)`.
fn box_tail(d: usize, cutoff: usize) -> f64 {
    let tau = zeta2_tail(cutoff);
    let inner = 1.5 - 3.0 * tau / (PI * PI);
    let di = d as i32;
    // a^d − b^d without cancellation
    let a: f64 = 1.5;
    let diff = (0..di).map(|j| a.powi(di - 1 - j) * inner.powi(j)).sum::<f64>() * (a - inner);
    diff / 3f64.powi(di)
}

/// Periodic `L²` discrepancy (diaphony) on `T^d` by its Fourier series,
/// truncated to the box `‖k‖∞ ≤ K` with `K` the smallest power of two for
/// which the worst-case tail is below `tolerance`.
///
/// # Errors
///
/// Resource error when `K` would exceed `10⁶` or the sum would be too
/// expensive.
pub fn periodic_l2(points: &PointSet, tolerance: f64) -> Result<Truncated> {
    let d = points.expect_torus(None)?;
    if !(tolerance > 0.0) {
        return domain("tolerance > 0 required");
    }
    let mut cutoff = 1usize;
    while box_tail(d, cutoff) >= tolerance {
        cutoff *= 2;
        if cutoff > MAX_CUTOFF {
            return Err(Error::Resource(format!(
                "tolerance {tolerance:e} needs a cutoff above {MAX_CUTOFF}"
            )));
        }
    }
    // bisect down to the smallest adequate cutoff
    let (mut lo, mut hi) = (cutoff / 2, cutoff);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if box_tail(d, mid) < tolerance {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let cutoff = hi;
    let sq = periodic_l2_truncated(points, cutoff)?;
    Ok(Truncated {
        sq,
        tail: box_tail(d, cutoff),
        cutoff,
    })
}

/// `3^{−d} Σ_{0 < ‖k‖∞ ≤ K} Π_j 1/r(k_j) |N^{−1} Σ_n e^{2πi⟨k, a_n⟩}|²`.
fn periodic_l2_truncated(points: &PointSet, cutoff: usize) -> Result<f64> {
    let d = points.expect_torus(None)?;
    let n = points.len();
    let nf = n as f64;
    let width = 2 * cutoff + 1;
    let spectral_work = (width as f64).powi(d as i32) * nf * d as f64;
    let pairwise_work = nf * nf * d as f64 * cutoff as f64;
    if spectral_work.min(pairwise_work) > MAX_WORK {
        return Err(Error::Resource(format!(
            "truncated periodic sum with K = {cutoff}, N = {n}, d = {d} is too large"
        )));
    }
    let total = if pairwise_work < spectral_work {
        // Σ_{n,n'} Π_j g_K(a_nj − a_n'j) with g_K the truncated 1-D series
        let g = |u: f64| {
            let mut acc = 1.0;
            let mut k = cutoff;
            while k > 0 {
                acc += 2.0 * weight(k as i64) * (2.0 * PI * k as f64 * u).cos();
                k -= 1;
            }
            acc
        };
        let mut acc = Neumaier::default();
        for i in 0..n {
            let a = points.point(i);
            acc.add(g(0.0).powi(d as i32));
            for j in i + 1..n {
                let b = points.point(j);
                acc.add(2.0 * a.iter().zip(b).map(|(x, y)| g(x - y)).product::<f64>());
            }
        }
        acc.value() / (nf * nf)
    } else {
        // per-frequency sums from per-coordinate phase tables
        let mut table = vec![Complex64::new(0.0, 0.0); n * d * width];
        for (i, p) in points.points().enumerate() {
            for (j, &x) in p.iter().enumerate() {
                for (m, k) in (-(cutoff as i64)..=cutoff as i64).enumerate() {
                    table[(i * d + j) * width + m] =
                        Complex64::from_polar(1.0, 2.0 * PI * (k as f64 * x).rem_euclid(1.0));
                }
            }
        }
        let mut idx = vec![0usize; d];
        let mut acc = Neumaier::default();
        loop {
            let w: f64 = idx.iter().map(|&m| weight(m as i64 - cutoff as i64)).product();
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let mut e = Complex64::new(1.0, 0.0);
                for (j, &m) in idx.iter().enumerate() {
                    e *= table[(i * d + j) * width + m];
                }
                s += e;
            }
            acc.add(w * s.norm_sqr());
            let mut j = 0;
            while j < d {
                idx[j] += 1;
                if idx[j] < width {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == d {
                break;
            }
        }
        acc.value() / (nf * nf)
    };
    // remove the k = 0 term, which contributes exactly 1
    Ok(((total - 1.0) / 3f64.powi(d as i32)).max(0.0))
}

/// Periodic `L²` discrepancy squared in closed pairwise form:
/// `3^{−d} (N^{−2} Σ_{n,n'} Π_j g(a_nj − a_n'j) − 1)` with
/// `g(u) = 3/2 − 3{u}(1 − {u})`.
pub fn periodic_l2_exact(points: &PointSet) -> Result<f64> {
    let d = points.expect_torus(None)?;
    let n = points.len();
    let nf = n as f64;
    let g = |u: f64| {
        let f = u.rem_euclid(1.0);
        1.5 - 3.0 * f * (1.0 - f)
    };
    let mut acc = Neumaier::default();
    acc.add(nf * 1.5f64.powi(d as i32));
    for i in 0..n {
        let a = points.point(i);
        for j in i + 1..n {
            let b = points.point(j);
            acc.add(2.0 * a.iter().zip(b).map(|(x, y)| g(x - y)).product::<f64>());
        }
    }
    Ok(((acc.value() / (nf * nf) - 1.0) / 3f64.powi(d as i32)).max(0.0))
}

/// Exact `E D²_per,2` for the harmonic ensemble on `T^d` with parameter `T`:
/// `3^{−d} (N (3/2)^d − S(T)^d) / N²` where
/// `S(T) = Σ_{|k| ≤ 2T} (2T+1−|k|)/r(k)`.
pub fn expected_periodic_l2_exact(d: usize, t: usize) -> Result<TheoryValue> {
    if d == 0 {
        return domain("d >= 1 required");
    }
    let side = 2 * t + 1;
    let mut s = Neumaier::default();
    for k in (1..=2 * t).rev() {
        s.add(2.0 * (side - k) as f64 * weight(k as i64));
    }
    s.add(side as f64);
    let s = s.value();
    let di = d as i32;
    let n = (side as f64).powi(di);
    let v = (n * 1.5f64.powi(di) - s.powi(di)) / (3f64.powi(di) * n * n);
    Ok(TheoryValue::exact(v, "T >= 0"))
}

/// One-dimensional expectation in harmonic-number form:
/// `H_N/(π²N²) + (1/(π²N)) Σ_{k>N} 1/k²`, `N = 2T+1`.
pub fn expected_periodic_l2_1d(t: usize) -> TheoryValue {
    let n = 2 * t + 1;
    let nf = n as f64;
    let h: f64 = (1..=n).rev().map(|k| 1.0 / k as f64).sum();
    let pi2 = PI * PI;
    TheoryValue::exact(h / (pi2 * nf * nf) + zeta2_tail(n) / (pi2 * nf), "d = 1, T >= 0")
}

/// `(log N + (γ+1) d) / (2^{d−1} π² N^{1+1/d})`.
pub fn expected_periodic_l2_asymptotic(d: usize, n: usize) -> Result<TheoryValue> {
    if d == 0 || n == 0 {
        return domain("d >= 1 and N >= 1 required");
    }
    let df = d as f64;
    let nf = n as f64;
    let v = (nf.ln() + (EULER_GAMMA + 1.0) * df)
        / (2f64.powi(d as i32 - 1) * PI * PI * nf.powf(1.0 + 1.0 / df));
    Ok(TheoryValue::asymptotic(
        v,
        "N = (2T+1)^d -> infinity",
        "O((log N)^2 / N^(1+2/d))",
    ))
}

/// `E D²_per,2 = ((3/2)^d − 1) / (3^d N)` for `N` i.i.d. uniform points.
pub fn iid_expected_periodic_l2(d: usize, n: usize) -> Result<TheoryValue> {
    if d == 0 || n == 0 {
        return domain("d >= 1 and N >= 1 required");
    }
    let di = d as i32;
    Ok(TheoryValue::exact(
        (1.5f64.powi(di) - 1.0) / (3f64.powi(di) * n as f64),
        "N >= 1",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample, EnsembleSpec};
    use crate::geometry::Manifold;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn torus(d: usize, c: Vec<f64>) -> PointSet {
        PointSet::new(Manifold::Torus(d), c).unwrap()
    }

    fn random(d: usize, n: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        torus(d, (0..n * d).map(|_| rng.random()).collect())
    }

    #[test]
    fn zeta_tail() {
        let z2 = PI * PI / 6.0;
        assert!((zeta2_tail(0) - z2).abs() < 1e-15);
        let direct: f64 = (1..=5).map(|k| 1.0 / (k * k) as f64).sum();
        assert!((zeta2_tail(5) - (z2 - direct)).abs() < 1e-15);
        assert!((zeta2_tail(1000) - 9.995001666666333e-4).abs() < 1e-18);
    }

    #[test]
    fn single_point() {
        let p = torus(1, vec![0.3]);
        let r = periodic_l2(&p, 1e-6).unwrap();
        assert!((r.sq - 1.0 / 6.0).abs() < 1e-6);
        assert!(r.tail < 1e-6);
        assert!((periodic_l2_exact(&p).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let p2 = torus(2, vec![0.3, 0.9]);
        let want = (2.25 - 1.0) / 9.0;
        assert!((periodic_l2_exact(&p2).unwrap() - want).abs() < 1e-15);
        let r = periodic_l2(&p2, 1e-4).unwrap();
        assert!((r.sq - want).abs() < 1e-4);
    }

    #[test]
    fn roots_of_unity() {
        for n in [2usize, 5, 12] {
            let p = torus(1, (0..n).map(|i| i as f64 / n as f64).collect());
            let want = 1.0 / (6.0 * (n * n) as f64);
            assert!((periodic_l2_exact(&p).unwrap() - want).abs() < 1e-15);
            let r = periodic_l2(&p, 1e-6).unwrap();
            assert!((r.sq - want).abs() < 1e-6);
        }
    }

    #[test]
    fn truncated_routes_agree() {
        // the pairwise and per-frequency routes evaluate the same finite sum
        let p = random(2, 6, 3);
        let cutoff = 9;
        let spectral = {
            let mut acc = 0.0;
            for k1 in -9i64..=9 {
                for k2 in -9i64..=9 {
                    if (k1, k2) != (0, 0) {
                        let s = exponential_sum(&p, &[k1, k2]).unwrap().power;
                        acc += weight(k1) * weight(k2) * s / 36.0;
                    }
                }
            }
            acc / 9.0
        };
        let got = periodic_l2_truncated(&p, cutoff).unwrap();
        assert!((got - spectral).abs() < 1e-13);
        let many = random(1, 400, 4);
        let via_pairs = periodic_l2_truncated(&many, 3).unwrap();
        let direct: f64 = (1..=3)
            .map(|k| 2.0 * weight(k) * exponential_sum(&many, &[k]).unwrap().power / 160_000.0)
            .sum::<f64>()
            / 3.0;
        assert!((via_pairs - direct).abs() < 1e-13);
    }

    #[test]
    fn tolerance_controls_error() {
        let p = random(1, 7, 11);
        let exact = periodic_l2_exact(&p).unwrap();
        for tol in [1e-3, 1e-5, 1e-6] {
            let r = periodic_l2(&p, tol).unwrap();
            assert!(exact - r.sq >= -1e-14 && exact - r.sq <= r.tail, "{tol}");
        }
        assert!(matches!(periodic_l2(&p, 1e-12), Err(Error::Resource(_))));
    }

    #[test]
    fn expectation_routes_agree() {
        assert!((expected_periodic_l2_exact(1, 0).unwrap().value - 1.0 / 6.0).abs() < 1e-15);
        for t in 0..=50 {
            let a = expected_periodic_l2_exact(1, t).unwrap().value;
            let b = expected_periodic_l2_1d(t).value;
            assert!((a - b).abs() <= 1e-12 * b, "T={t}: {a} {b}");
        }
        let h5 = 1.0 + 0.5 + 1.0 / 3.0 + 0.25 + 0.2;
        let tail = PI * PI / 6.0 - (1..=5).map(|k| 1.0 / (k * k) as f64).sum::<f64>();
        let want = h5 / (PI * PI * 25.0) + tail / (5.0 * PI * PI);
        assert!((expected_periodic_l2_1d(2).value - want).abs() < 1e-15);
    }

    #[test]
    fn expectation_from_variance_sum() {
        // brute-force Σ_k Πw(k_j) (N − V(k)) over a box containing all V ≠ 0
        for (d, t) in [(2usize, 1usize), (2, 2), (3, 1)] {
            let side = 2 * t + 1;
            let n = (side as f64).powi(d as i32);
            let r = 4 * t as i64;
            let mut sum = 0.0;
            let mut idx = vec![-r; d];
            loop {
                let w: f64 = idx.iter().map(|&k| weight(k)).product();
                let v = torus_variance(d, t, &idx).unwrap().value;
                sum += w * v;
                let mut j = 0;
                while j < d {
                    idx[j] += 1;
                    if idx[j] <= r {
                        break;
                    }
                    idx[j] = -r;
                    j += 1;
                }
                if j == d {
                    break;
                }
            }
            // add the N (3/2)^d − N part beyond the box analytically
            let full = n * (1.5f64.powi(d as i32) - 1.0);
            let in_box_n: f64 = {
                let s1: f64 = (-r..=r).map(weight).sum();
                n * (s1.powi(d as i32) - 1.0)
            };
            let brute = (full - in_box_n + sum) / (3f64.powi(d as i32) * n * n);
            let got = expected_periodic_l2_exact(d, t).unwrap().value;
            assert!((brute - got).abs() < 1e-14, "d={d} T={t}");
        }
    }

    #[test]
    fn asymptotics() {
        let n = 81usize;
        let a = expected_periodic_l2_asymptotic(1, n).unwrap().value;
        let want = ((n as f64).ln() + EULER_GAMMA + 1.0) / (PI * PI * 81.0 * 81.0);
        assert!((a - want).abs() < 1e-18);
        let t = 40;
        let n = 2 * t + 1;
        let ratio = expected_periodic_l2_exact(1, t).unwrap().value
            / expected_periodic_l2_asymptotic(1, n).unwrap().value;
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
        let ratio = expected_periodic_l2_exact(2, 13).unwrap().value
            / expected_periodic_l2_asymptotic(2, 729).unwrap().value;
        assert!((ratio - 1.0).abs() < 0.15, "{ratio}");
    }

    #[test]
    fn iid_expectation_by_simulation() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let spec = EnsembleSpec::IidUniform {
            manifold: Manifold::Torus(2),
            n: 6,
        };
        let mut w = crate::mc::Welford::new();
        for _ in 0..4000 {
            let p = sample(&spec, &mut rng).unwrap();
            w.push(periodic_l2_exact(&p).unwrap());
        }
        let want = iid_expected_periodic_l2(2, 6).unwrap().value;
        assert!((w.mean() - want).abs() < 4.0 * w.stderr());
    }

    proptest! {
        #[test]
        fn translation_and_relabeling(seed in 0u64..1000, shift in 0.0f64..1.0) {
            let p = random(2, 5, seed);
            let base = periodic_l2_exact(&p).unwrap();
            let moved = periodic_l2_exact(&p.translated(&[shift, 1.0 - shift]).unwrap()).unwrap();
            prop_assert!((base - moved).abs() < 1e-10);
            let mut c = p.coords().to_vec();
            c.rotate_left(2);
            let relabeled = periodic_l2_exact(&torus(2, c)).unwrap();
            prop_assert!((base - relabeled).abs() < 1e-14);
            let r = periodic_l2(&p.translated(&[shift, 0.0]).unwrap(), 1e-3).unwrap();
            let r0 = periodic_l2(&p, 1e-3).unwrap();
            prop_assert!((r.sq - r0.sq).abs() < 1e-10);
        }

        #[test]
        fn exponential_sum_bounded(seed in 0u64..1000, k1 in -20i64..20, k2 in -20i64..20) {
            let p = random(2, 7, seed);
            let s = exponential_sum(&p, &[k1, k2]).unwrap().power;
            prop_assert!((0.0..=49.0 + 1e-9).contains(&s));
        }
    }
}
