use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::Truncated;
use crate::error::{domain, Error, Result};
use crate::geometry::{dist_to_int, uniform_torus, PointSet};
use crate::mc::{McEstimate, Welford};
use crate::specfun::{bessel_j, gamma, ln_gamma};
use crate::sum::Neumaier;
use crate::theory::TheoryValue;

/// Spectral weight of the ball discrepancy at frequency `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallCoefficient {
    pub k: Vec<i64>,
    pub b: f64,
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > 6 {
        return domain(format!("ball coefficients need 1 <= d <= 6, got d = {d}"));
    }
    Ok(())
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `∫_a^b f` by adaptive Simpson on panels no wider than `π/4`.
fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let panels = ((b - a) / (PI / 4.0)).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut acc = Neumaier::default();
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let hi = if p + 1 == panels { b } else { lo + h };
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = simpson(lo, hi, fa, fm, fb);
        acc.add(adaptive(f, lo, hi, fa, fm, fb, whole, tol / panels as f64, 30));
    }
    acc.value()
}

/// `b` as a function of `m = |k|²` for `m = 0..=r2_max` (entry 0 unused):
/// `b = (2^d π^{d+1} |k|^{2d+1})^{−1} ∫_0^{π|k|} x^d J_{d/2}(x)² dx`.
///
/// The integral is accumulated over consecutive radii, so the table costs
/// about as much as its largest entry.
pub fn ball_coefficients(d: usize, r2_max: usize) -> Result<Vec<f64>> {
    check_dim(d)?;
    let nu = d as f64 / 2.0;
    let di = d as i32;
    let f = |x: f64| x.powi(di) * bessel_j(nu, x).unwrap_or(f64::NAN).powi(2);
    let norm = 2f64.powi(di) * PI.powi(di + 1);
    let mut out = vec![0.0; r2_max + 1];
    let mut acc = Neumaier::default();
    let mut prev = 0.0;
    for (m, slot) in out.iter_mut().enumerate().skip(1) {
        let r = (m as f64).sqrt();
        let upper = PI * r;
        // integrand is at most about (2/π) x^{d−1}
        let scale = upper.powi(di - 1).max(1.0);
        acc.add(integrate(&f, prev, upper, 1e-13 * scale));
        prev = upper;
        let b = acc.value() / (norm * r.powi(2 * di + 1));
        if !b.is_finite() || b <= 0.0 {
            return Err(Error::Numeric(format!("ball coefficient at |k|² = {m} is {b}")));
        }
        *slot = b;
    }
    Ok(out)
}

/// Ball-discrepancy weight `b_k` for a nonzero integer vector `k`.
pub fn ball_coefficient(d: usize, k: &[i64]) -> Result<BallCoefficient> {
    check_dim(d)?;
    if k.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: k.len(),
        });
    }
    let r2: i64 = k.iter().map(|x| x * x).sum();
    if r2 == 0 {
        return domain("k must be nonzero");
    }
    let table = ball_coefficients(d, r2 as usize)?;
    Ok(BallCoefficient {
        k: k.to_vec(),
        b: table[r2 as usize],
    })
}

/// Heuristic bound on `Σ_{|k| > K} b_k` from `b_k ≤ 1.5 / (d 2^d π² |k|^{d+1})`
/// and comparison with the integral over the shell `|x| > K − √d/2`.
pub fn ball_tail_bound(d: usize, k_max: usize) -> f64 {
    let df = d as f64;
    let r = k_max as f64 - df.sqrt() / 2.0;
    if r <= 0.0 {
        return f64::INFINITY;
    }
    let omega = 2.0 * PI.powf(df / 2.0) / gamma(df / 2.0).unwrap();
    1.5 * omega / (df * 2f64.powi(d as i32) * PI * PI * r)
}

/// Nonzero lattice vectors with `|k| ≤ k_max`.
fn lattice_ball(d: usize, k_max: usize) -> Vec<Vec<i64>> {
    let r = k_max as i64;
    let r2 = r * r;
    let mut out = Vec::new();
    let mut idx = vec![-r; d];
    loop {
        let n2: i64 = idx.iter().map(|x| x * x).sum();
        if n2 > 0 && n2 <= r2 {
            out.push(idx.clone());
        }
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
            return out;
        }
    }
}

/// Ball `L²` discrepancy on `T^d` from its spectral form truncated to
/// `0 < |k| ≤ K_max`, with the heuristic tail bound.
pub fn ball_l2(points: &PointSet, k_max: usize) -> Result<Truncated> {
    let d = points.expect_torus(None)?;
    check_dim(d)?;
    if k_max == 0 {
        return domain("K_max >= 1 required");
    }
    let table = ball_coefficients(d, k_max * k_max)?;
    ball_l2_with_table(points, k_max, &table)
}

/// [`ball_l2`] with a precomputed coefficient table covering `|k|² ≤ K_max²`.
pub(crate) fn ball_l2_with_table(points: &PointSet, k_max: usize, table: &[f64]) -> Result<Truncated> {
    let d = points.expect_torus(None)?;
    if table.len() <= k_max * k_max {
        return domain("coefficient table too short");
    }
    let n = points.len();
    let width = 2 * k_max + 1;
    let mut phases = vec![Complex64::new(0.0, 0.0); n * d * width];
    for (i, p) in points.points().enumerate() {
        for (j, &x) in p.iter().enumerate() {
            for (m, k) in (-(k_max as i64)..=k_max as i64).enumerate() {
                phases[(i * d + j) * width + m] =
                    Complex64::from_polar(1.0, 2.0 * PI * (k as f64 * x).rem_euclid(1.0));
            }
        }
    }
    let ks = lattice_ball(d, k_max);
    let terms: Vec<f64> = ks
        .par_iter()
        .map(|k| {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let mut e = Complex64::new(1.0, 0.0);
                for (j, &kj) in k.iter().enumerate() {
                    e *= phases[(i * d + j) * width + (kj + k_max as i64) as usize];
                }
                s += e;
            }
            let r2: i64 = k.iter().map(|x| x * x).sum();
            table[r2 as usize] * s.norm_sqr()
        })
        .collect();
    let nf = n as f64;
    Ok(Truncated {
        sq: crate::sum::sum(terms) / (nf * nf),
        tail: ball_tail_bound(d, k_max),
        cutoff: k_max,
    })
}

/// `Σ_{k≠0} b_k`, the squared ball discrepancy of a single point:
/// `2 ∫_0^{1/2} V(r)(1 − V(r)) dr` with `V(r) = ω_d r^d`.
pub fn ball_single_point_sq(d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    let omega = (df / 2.0 * PI.ln() - ln_gamma(df / 2.0 + 1.0)?).exp();
    Ok(2.0
        * (omega * 0.5f64.powi(d as i32 + 1) / (df + 1.0)
            - omega * omega * 0.5f64.powi(2 * d as i32 + 1) / (2.0 * df + 1.0)))
}

/// [`ball_l2`] with the diagonal part of the omitted frequencies added back
/// exactly: `|S_k|²/N²` splits into `1/N` plus cross terms, and
/// `Σ_{|k|>K} b_k / N` is known in closed form. The reported tail then only
/// bounds the cross terms.
pub fn ball_l2_corrected(points: &PointSet, k_max: usize) -> Result<Truncated> {
    let d = points.expect_torus(None)?;
    check_dim(d)?;
    if k_max == 0 {
        return domain("K_max >= 1 required");
    }
    let table = ball_coefficients(d, k_max * k_max)?;
    let head = ball_l2_with_table(points, k_max, &table)?;
    let inside = crate::sum::sum(
        lattice_ball(d, k_max)
            .into_iter()
            .map(|k| table[k.iter().map(|x| (x * x) as usize).sum::<usize>()]),
    );
    let n = points.len() as f64;
    let diagonal_tail = (ball_single_point_sq(d)? - inside).max(0.0) / n;
    Ok(Truncated {
        sq: head.sq + diagonal_tail,
        tail: head.tail * (1.0 - 1.0 / n),
        cutoff: k_max,
    })
}

/// Monte Carlo estimate of the squared ball discrepancy from its definition:
/// `x` uniform on `T^d`, `r` uniform on `[0, 1/2]`, averaging
/// `(count/N − Vol B(x, r))²`. Balls of radius below `1/2` embed in the
/// torus, so the volume is the Euclidean one.
pub fn ball_l2_mc<R: Rng + ?Sized>(
    points: &PointSet,
    samples: usize,
    rng: &mut R,
) -> Result<McEstimate> {
    let d = points.expect_torus(None)?;
    if samples == 0 {
        return domain("samples >= 1 required");
    }
    let df = d as f64;
    let unit = (df / 2.0 * PI.ln() - ln_gamma(df / 2.0 + 1.0)?).exp();
    let n = points.len() as f64;
    let mut w = Welford::new();
    for _ in 0..samples {
        let x = uniform_torus(d, rng);
        let r: f64 = rng.random_range(0.0..0.5);
        let r2 = r * r;
        let count = points
            .points()
            .filter(|p| {
                p.iter()
                    .zip(x.coords())
                    .map(|(a, b)| dist_to_int(a - b).powi(2))
                    .sum::<f64>()
                    <= r2
            })
            .count() as f64;
        let diff = count / n - unit * r.powi(d as i32);
        w.push(diff * diff);
    }
    Ok(McEstimate::from_welford("ball-l2-sq-mc", &w, None))
}

/// `π^{(d−5)/2} / (d 2^{d−1} Γ((d+1)/2)) · log N / N^{1+1/d}` for the
/// harmonic ensemble on `T^d`.
pub fn expected_ball_l2_asymptotic(d: usize, n: usize) -> Result<TheoryValue> {
    if d == 0 || n == 0 {
        return domain("d >= 1 and N >= 1 required");
    }
    let df = d as f64;
    let nf = n as f64;
    let c = PI.powf((df - 5.0) / 2.0) / (df * 2f64.powi(d as i32 - 1) * gamma((df + 1.0) / 2.0)?);
    Ok(TheoryValue::asymptotic(
        c * nf.ln() / nf.powf(1.0 + 1.0 / df),
        "N = (2T+1)^d -> infinity",
        "O(N^(-1-1/d))",
    ))
}

/// `Σ_{0<|k|≤K_max} b_k (N − Π_j max(2T+1−|k_j|, 0)) / N²` for the harmonic
/// ensemble on `T^d`. The omitted part is at most `ball_tail_bound / N`.
pub fn expected_ball_l2_exact_sum(d: usize, t: usize, k_max: usize) -> Result<TheoryValue> {
    check_dim(d)?;
    if k_max == 0 {
        return domain("K_max >= 1 required");
    }
    let table = ball_coefficients(d, k_max * k_max)?;
    let side = (2 * t + 1) as f64;
    let n = side.powi(d as i32);
    let terms = lattice_ball(d, k_max).into_iter().map(|k| {
        let v: f64 = k
            .iter()
            .map(|&kj| (side - kj.unsigned_abs() as f64).max(0.0))
            .product();
        let r2: i64 = k.iter().map(|x| x * x).sum();
        table[r2 as usize] * (n - v)
    });
    Ok(TheoryValue::quadrature(
        crate::sum::sum(terms) / (n * n),
        format!("T >= 0, truncated at |k| <= {k_max}"),
    ))
}

/// `Σ_{0<|k|≤K_max} b_k / N` for `N` i.i.d. uniform points.
pub fn iid_expected_ball_l2(d: usize, n: usize, k_max: usize) -> Result<TheoryValue> {
    check_dim(d)?;
    if k_max == 0 || n == 0 {
        return domain("K_max >= 1 and N >= 1 required");
    }
    let table = ball_coefficients(d, k_max * k_max)?;
    let terms = lattice_ball(d, k_max).into_iter().map(|k| {
        let r2: i64 = k.iter().map(|x| x * x).sum();
        table[r2 as usize]
    });
    Ok(TheoryValue::quadrature(
        crate::sum::sum(terms) / n as f64,
        format!("N >= 1, truncated at |k| <= {k_max}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::expected_periodic_l2_1d;
    use crate::geometry::Manifold;
    use crate::specfun::EULER_GAMMA;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn torus(d: usize, c: Vec<f64>) -> PointSet {
        PointSet::new(Manifold::Torus(d), c).unwrap()
    }

    #[test]
    fn one_dimensional_coefficients() {
        let table = ball_coefficients(1, 2500).unwrap();
        for k in 1..=50usize {
            let want = 1.0 / (2.0 * PI * PI * (k * k) as f64);
            assert!((table[k * k] - want).abs() <= 1e-10 * want, "k={k}");
        }
        let b = ball_coefficient(1, &[-7]).unwrap().b;
        assert!((b - 1.0 / (98.0 * PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn three_dimensional_closed_form() {
        // x³ J_{3/2}(x)² = (2/π)(sin x / x − cos x)² x² / x ... integrate numerically
        let table = ball_coefficients(3, 9).unwrap();
        for (m, &b) in table.iter().enumerate().skip(1) {
            let upper = PI * (m as f64).sqrt();
            let g = |x: f64| {
                let j = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
                x.powi(3) * j * j
            };
            let steps = 20000;
            let h = upper / steps as f64;
            let mut s = 0.0;
            for i in 0..steps {
                s += g((i as f64 + 0.5) * h) * h;
            }
            let want = s / (8.0 * PI.powi(4) * (m as f64).powf(3.5));
            assert!((b - want).abs() < 1e-7 * want, "m={m}");
        }
    }

    #[test]
    fn asymptotic_normalization() {
        let table = ball_coefficients(2, 2500).unwrap();
        let mut worst = 0.0f64;
        for (m, b) in table.iter().enumerate().skip(4) {
            let r = (m as f64).sqrt();
            let dev = (b * 2.0 * 4.0 * PI * PI * r.powi(3) - 1.0).abs() * r;
            worst = worst.max(dev);
        }
        assert!(worst < 1.0, "{worst}");
    }

    #[test]
    fn radial_and_positive() {
        for d in 1..=3usize {
            let a = vec![3i64; d];
            let mut b = a.clone();
            b[0] = -3;
            let ca = ball_coefficient(d, &a).unwrap().b;
            assert_eq!(ca, ball_coefficient(d, &b).unwrap().b);
            assert!(ball_coefficients(d, 50 * 50).unwrap()[1..].iter().all(|&b| b > 0.0));
        }
        assert!(ball_coefficient(7, &[1; 7]).is_err());
        assert!(ball_coefficient(2, &[0, 0]).is_err());
    }

    #[test]
    fn single_point_one_dimension() {
        let p = torus(1, vec![0.42]);
        let r = ball_l2(&p, 200).unwrap();
        assert!((r.sq - 1.0 / 6.0).abs() < r.tail);
        assert!((r.sq - 1.0 / 6.0).abs() < 1.1e-3);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let est = ball_l2_mc(&p, 100_000, &mut rng).unwrap();
        assert!((est.mean - 1.0 / 6.0).abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn mc_matches_spectral_in_two_dimensions() {
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let p = torus(2, (0..8).map(|_| rng.random()).collect());
        let spec = ball_l2_corrected(&p, 64).unwrap();
        let est = ball_l2_mc(&p, 100_000, &mut rng).unwrap();
        let z = (est.mean - spec.sq) / est.stderr;
        assert!(z.abs() < 3.0, "{z} {est:?} {spec:?}");
    }

    #[test]
    fn single_point_totals() {
        assert!((ball_single_point_sq(1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        for d in 1..=3 {
            let one = torus(d, vec![0.3; d]);
            let c = ball_l2_corrected(&one, 12).unwrap();
            assert!((c.sq - ball_single_point_sq(d).unwrap()).abs() < 1e-12);
            assert_eq!(c.tail, 0.0);
            // truncated sums approach the closed total from below
            let a = ball_l2(&one, 12).unwrap().sq;
            let b = ball_l2(&one, 24).unwrap().sq;
            assert!(a < b && b < c.sq);
        }
    }

    #[test]
    fn translation_invariance() {
        let p = torus(2, vec![0.1, 0.2, 0.7, 0.4, 0.5, 0.95]);
        let a = ball_l2(&p, 20).unwrap().sq;
        let b = ball_l2(&p.translated(&[0.37, 0.81]).unwrap(), 20).unwrap().sq;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn expected_sum_one_dimension() {
        let v = expected_ball_l2_exact_sum(1, 0, 400).unwrap().value;
        assert!((v - 1.0 / 6.0).abs() < ball_tail_bound(1, 400));
        // in one dimension the ball and periodic expectations coincide
        for t in [1usize, 2, 5] {
            let n = (2 * t + 1) as f64;
            let v = expected_ball_l2_exact_sum(1, t, 2000).unwrap().value;
            let want = expected_periodic_l2_1d(t).value;
            assert!((v - want).abs() < ball_tail_bound(1, 2000) / n, "T={t}");
        }
        let t1 = ball_tail_bound(1, 100);
        let t2 = ball_tail_bound(1, 200);
        assert!((t1 / t2 - 2.0).abs() < 0.02);
    }

    #[test]
    fn asymptotic_expectation() {
        let nf = 9.0f64;
        let a = expected_ball_l2_asymptotic(1, 9).unwrap().value;
        assert!((a - nf.ln() / (PI * PI * 81.0)).abs() < 1e-17);
        // d = 1, T = 20: the exact value is (H_N + N Σ_{k>N} k^{−2})/(π² N²),
        // which the leading log term plus its constant correction matches
        let t = 20;
        let n = 41.0f64;
        let exact = expected_ball_l2_exact_sum(1, t, 200).unwrap().value;
        let next = (n.ln() + EULER_GAMMA + 1.0) / (PI * PI * n * n);
        assert!((exact / next - 1.0).abs() < 0.05);
        let lead = expected_ball_l2_asymptotic(1, 41).unwrap().value;
        assert!(lead > 0.0 && lead < exact);
    }
}
