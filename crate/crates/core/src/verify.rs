//! The acceptance grid: every criterion as a function returning labelled
//! checks, shared by the `verify` subcommand and the acceptance tests.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::discrepancy::{self as disc, Frequency};
use crate::energy;
use crate::ensembles::{self, sample_projection_dpp, EnsembleSpec, HarmonicSphereKernel};
use crate::error::{Error, Result};
use crate::geometry::{uniform_sphere, Manifold, PointSet, SpherePoint};
use crate::mc::{estimate, estimate_with, replicate_rng, McEstimate, Statistic};
use crate::specfun::{gauss_jacobi_rule, jacobi_eval, jacobi_norm, legendre_eval, JacobiParams};
use crate::transport::{self, Preset};

/// Replicate counts: `Full` uses the stated counts, `Fast` a quarter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Fast,
    Full,
}

impl Suite {
    fn reps(self, full: usize) -> usize {
        match self {
            Suite::Full => full,
            Suite::Fast => (full / 4).max(200),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Suite::Fast),
            "full" => Ok(Suite::Full),
            other => Err(Error::Usage(format!(
                "unknown suite '{other}' (expected fast or full)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Fast => "fast",
            Suite::Full => "full",
        })
    }
}

/// One comparison: `value` must not exceed `limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    pub fn new(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            label: label.into(),
            value,
            limit,
        }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.limit
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
    /// JSON records of the Monte Carlo estimates, in run order.
    pub records: Vec<String>,
}

impl CriterionReport {
    fn new(id: u32) -> Self {
        Self {
            id,
            title: title(id),
            checks: Vec::new(),
            records: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, value: f64, limit: f64) {
        self.checks.push(Check::new(label, value, limit));
    }

    /// Records an estimate and checks `|z| ≤ limit`.
    fn z_check(&mut self, label: impl Into<String>, est: &McEstimate, limit: f64) {
        let z = est.z_abs().unwrap_or(f64::INFINITY);
        self.check(label, z, limit);
        self.records.push(est.to_json());
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    /// The check closest to (or furthest past) its limit.
    pub fn worst(&self) -> Option<&Check> {
        self.checks.iter().max_by(|a, b| {
            let ra = a.value / a.limit;
            let rb = b.value / b.limit;
            ra.partial_cmp(&rb).unwrap_or(std::cmp::Ordering::Greater)
        })
    }

    /// `PASS  3 torus variance: 12/12 checks, worst ... = v (limit l)`
    pub fn line(&self) -> String {
        let n_pass = self.checks.iter().filter(|c| c.passed()).count();
        let worst = self
            .worst()
            .map(|c| format!(", worst {} = {:.4e} (limit {:.4e})", c.label, c.value, c.limit))
            .unwrap_or_default();
        format!(
            "{} {:>2} {}: {}/{} checks{}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            n_pass,
            self.checks.len(),
            worst
        )
    }

    /// Every check as a table row.
    pub fn table(&self) -> String {
        let mut out = self.line();
        out.push('\n');
        for c in &self.checks {
            out.push_str(&format!(
                "    {} {:<56} {:>12.4e} <= {:.4e}\n",
                if c.passed() { "ok  " } else { "FAIL" },
                c.label,
                c.value,
                c.limit
            ));
        }
        out
    }
}

pub const CRITERIA: [u32; 13] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13];

pub fn title(id: u32) -> &'static str {
    match id {
        1 => "Jacobi orthogonality",
        2 => "S^2 kernel identity",
        3 => "torus variance",
        4 => "circle diaphony and W2",
        5 => "harmonic-sphere energy",
        6 => "energy asymptotics",
        7 => "spherical ensemble energy",
        8 => "Stolarsky invariance",
        9 => "periodic L2 on T^2",
        10 => "ball discrepancy",
        11 => "W2 smoothing bounds",
        12 => "spectral variances",
        13 => "determinism",
        _ => "unknown",
    }
}

fn sub_seed(seed: u64, id: u32, j: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(u64::from(id) << 32)
        .wrapping_add(j)
}

/// Runs criterion `id`.
pub fn run_criterion(id: u32, suite: Suite, seed: u64) -> Result<CriterionReport> {
    match id {
        1 => jacobi_orthogonality(),
        2 => kernel_identity(),
        3 => torus_variance(suite, seed),
        4 => circle_diaphony(suite, seed),
        5 => harmonic_energy(suite, seed),
        6 => energy_asymptotics(),
        7 => spherical_energy(suite, seed),
        8 => stolarsky(suite, seed),
        9 => periodic_torus2(suite, seed),
        10 => ball(suite, seed),
        11 => smoothing_bounds(suite, seed),
        12 => spectral_variances(suite, seed),
        13 => determinism(suite, seed),
        _ => Err(Error::Usage(format!("no criterion {id}"))),
    }
}

/// Runs every criterion in order.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CriterionReport>> {
    CRITERIA.iter().map(|&id| run_criterion(id, suite, seed)).collect()
}

fn jacobi_orthogonality() -> Result<CriterionReport> {
    let mut r = CriterionReport::new(1);
    for d in [2usize, 3] {
        let params = JacobiParams::new(d as f64 / 2.0, (d as f64 - 2.0) / 2.0)?;
        let rule = gauss_jacobi_rule(params, 32)?;
        let mut worst = 0.0f64;
        for j in 0..=20 {
            for k in 0..=20 {
                let got = rule.integrate(|t| jacobi_eval(params, j, t) * jacobi_eval(params, k, t));
                let scale = (jacobi_norm(params, j) * jacobi_norm(params, k)).sqrt();
                let want = if j == k { jacobi_norm(params, j) } else { 0.0 };
                worst = worst.max((got - want).abs() / scale);
            }
        }
        r.check(format!("d={d} max relative error, j,k <= 20"), worst, 1e-10);
    }
    Ok(r)
}

fn kernel_identity() -> Result<CriterionReport> {
    let mut r = CriterionReport::new(2);
    for l in 0..=20usize {
        let k = HarmonicSphereKernel::new(2, l)?;
        let mut worst = 0.0f64;
        for i in 0..1000 {
            let t = -1.0 + 2.0 * i as f64 / 999.0;
            let direct: f64 = (0..=l)
                .map(|j| (2 * j + 1) as f64 * legendre_eval(j, t))
                .sum::<f64>()
                / (4.0 * PI);
            worst = worst.max((k.eval(t) - direct).abs());
        }
        r.check(format!("L={l} max abs error on 1000-point grid"), worst, 1e-10);
    }
    Ok(r)
}

fn torus_variance(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(3);
    let reps = suite.reps(2000);
    let ks: [&[i64]; 6] = [&[1], &[2], &[1, 0], &[1, 1], &[2, 2], &[3, 3]];
    let mut j = 0;
    for d in [1usize, 2] {
        for t in [1usize, 2] {
            for k in ks.iter().filter(|k| k.len() == d) {
                let spec = EnsembleSpec::HarmonicTorus { d, t };
                let stat = Statistic::SpectralPower(Frequency::Lattice(k.to_vec()));
                let est = estimate(&spec, &stat, reps, sub_seed(seed, 3, j))?;
                j += 1;
                r.z_check(format!("d={d} T={t} k={k:?} |z|"), &est, 4.0);
            }
        }
    }
    Ok(r)
}

fn circle_diaphony(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(4);
    let reps = suite.reps(2000);
    for t in 0..=2usize {
        let spec = EnsembleSpec::HarmonicTorus { d: 1, t };
        let est = estimate(&spec, &Statistic::PeriodicL2Sq, reps, sub_seed(seed, 4, t as u64))?;
        let closed = disc::expected_periodic_l2_1d(t);
        let est = est.with_theory(closed);
        r.z_check(format!("T={t} E D^2 vs harmonic-number form |z|"), &est, 4.0);
    }
    // per-sample identities on harmonic and i.i.d. sets
    let mut rng = replicate_rng(sub_seed(seed, 4, 100), 0);
    let mut sets = Vec::new();
    for t in 1..=2usize {
        for _ in 0..20 {
            sets.push(ensembles::sample(&EnsembleSpec::HarmonicTorus { d: 1, t }, &mut rng)?);
        }
    }
    for _ in 0..10 {
        let n = rng.random_range(1..=100usize);
        let spec = EnsembleSpec::IidUniform {
            manifold: Manifold::Torus(1),
            n,
        };
        sets.push(ensembles::sample(&spec, &mut rng)?);
    }
    let mut identity = 0.0f64;
    let mut cross = 0.0f64;
    for p in &sets {
        let q = transport::w2_circle_quantile(p)?;
        let d = disc::periodic_l2_exact(p)?.sqrt();
        identity = identity.max((q - d / 2f64.sqrt()).abs());
        let f = transport::w2_circle_fourier(p, 1e-7)?;
        cross = cross.max((q - f.sq.sqrt()).abs());
    }
    r.check("W2 = D_per/sqrt(2), max abs error over 50 sets", identity, 1e-8);
    r.check("quantile vs Fourier W2, max abs error over 50 sets", cross, 1e-6);
    Ok(r)
}

fn harmonic_energy(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(5);
    let reps = suite.reps(2000);
    let mut j = 0;
    for l in [1usize, 4] {
        for s in [-0.5, -1.0, -3.0] {
            let spec = EnsembleSpec::HarmonicSphere { d: 2, l };
            let est = estimate(&spec, &Statistic::RieszEnergy { s }, reps, sub_seed(seed, 5, j))?;
            j += 1;
            r.z_check(format!("L={l} s={s} |z|"), &est, 4.0);
        }
    }
    let spot = energy::harmonic_sphere_expected_energy_exact(2, 1, -1.0)?.value;
    r.check(
        "E E_{-1}, L=1 vs 1872/105 (= 17.8286)",
        (spot - 1872.0 / 105.0).abs(),
        1e-9,
    );
    Ok(r)
}

fn energy_asymptotics() -> Result<CriterionReport> {
    let mut r = CriterionReport::new(6);
    let k = energy::harmonic_sphere_energy_constants(-1.0, 2)?;
    let kappa = k.kappa.unwrap_or(f64::NAN);
    let i = energy::continuous_energy_constant(-1.0, 2)?.value;
    let mut prev = f64::INFINITY;
    let mut last = f64::NAN;
    for l in [8usize, 16, 32, 64] {
        let n = ((l + 1) * (l + 1)) as f64;
        let exact = energy::harmonic_sphere_expected_energy_exact(2, l, -1.0)?.value;
        let resid = ((i * n * n - exact) / n.sqrt() - (k.c * n.ln() + kappa)).abs();
        r.check(
            format!("L={l} residual {resid:.6} not above previous"),
            resid,
            prev,
        );
        prev = resid;
        last = resid;
    }
    r.check("final residual vs 0.05 kappa_2", last, 0.05 * kappa);
    Ok(r)
}

fn spherical_energy(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(7);
    let reps = suite.reps(1000);
    let stat = Statistic::RieszEnergy { s: -1.0 };
    for (j, n) in [8usize, 16].into_iter().enumerate() {
        let spec = EnsembleSpec::Spherical { n };
        let matrix = estimate(&spec, &stat, reps, sub_seed(seed, 7, j as u64))?;
        r.z_check(format!("N={n} matrix route |z|"), &matrix, 4.0);
        let kernel = estimate_with(&spec, &stat, reps, sub_seed(seed, 7, 10 + j as u64), |s, rng| {
            sample_projection_dpp(s, rng)
        })?;
        r.z_check(format!("N={n} kernel route |z|"), &kernel, 4.0);
        let combined = (matrix.stderr.powi(2) + kernel.stderr.powi(2)).sqrt();
        r.check(
            format!("N={n} |matrix - kernel| / combined stderr"),
            (matrix.mean - kernel.mean).abs() / combined,
            3.0,
        );
    }
    let spot = energy::spherical_expected_energy(2, -1.0)?.value;
    r.check("E E_{-1}, N=2 vs 16/5", (spot - 3.2).abs(), 1e-12);
    Ok(r)
}

fn sphere_set(points: Vec<[f64; 3]>) -> Result<PointSet> {
    let pts = points
        .into_iter()
        .map(|p| SpherePoint::from_direction(p.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    PointSet::from_sphere_points(pts)
}

/// Twenty point sets on `S²` of varied structure.
fn heterogeneous_sets(rng: &mut ChaCha20Rng) -> Result<Vec<(String, PointSet)>> {
    let mut sets = Vec::new();
    let iid = |n: usize, rng: &mut ChaCha20Rng| {
        PointSet::from_sphere_points((0..n).map(|_| uniform_sphere(2, rng)).collect())
    };
    sets.push(("single point".into(), sphere_set(vec![[0.0, 0.0, 1.0]])?));
    sets.push(("single point (tilted)".into(), sphere_set(vec![[1.0, 2.0, -0.5]])?));
    sets.push((
        "antipodal pair".into(),
        sphere_set(vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])?,
    ));
    sets.push((
        "coincident pair".into(),
        sphere_set(vec![[0.3, 0.4, 0.5], [0.3, 0.4, 0.5]])?,
    ));
    sets.push((
        "tetrahedron".into(),
        sphere_set(vec![
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ])?,
    ));
    sets.push((
        "octahedron".into(),
        sphere_set(vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ])?,
    ));
    let cube = (0..8)
        .map(|i| {
            let s = |b: i32| if i & b == 0 { 1.0 } else { -1.0 };
            [s(1), s(2), s(4)]
        })
        .collect();
    sets.push(("cube".into(), sphere_set(cube)?));
    let ring = (0..12)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / 12.0;
            [a.cos(), a.sin(), 0.0]
        })
        .collect();
    sets.push(("equator ring".into(), sphere_set(ring)?));
    let cluster = (0..10)
        .map(|_| {
            [
                0.05 * (rng.random::<f64>() - 0.5),
                0.05 * (rng.random::<f64>() - 0.5),
                1.0,
            ]
        })
        .collect();
    sets.push(("polar cluster".into(), sphere_set(cluster)?));
    let two = (0..12)
        .map(|i| {
            let z = if i % 2 == 0 { 1.0 } else { -0.2 };
            [0.1 * rng.random::<f64>(), if i % 2 == 0 { 0.0 } else { 1.0 }, z]
        })
        .collect();
    sets.push(("two clusters".into(), sphere_set(two)?));
    for n in [3usize, 5, 10, 20, 30] {
        sets.push((format!("iid N={n}"), iid(n, rng)?));
    }
    let mut dup = iid(6, rng)?.coords().to_vec();
    dup.extend_from_within(0..9);
    sets.push(("iid with duplicates".into(), PointSet::new(Manifold::Sphere(2), dup)?));
    for l in [2usize, 3] {
        let spec = EnsembleSpec::HarmonicSphere { d: 2, l };
        sets.push((format!("harmonic L={l}"), ensembles::sample(&spec, rng)?));
    }
    for n in [10usize, 20] {
        let spec = EnsembleSpec::Spherical { n };
        sets.push((format!("spherical N={n}"), ensembles::sample(&spec, rng)?));
    }
    Ok(sets)
}

fn stolarsky(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(8);
    let samples = suite.reps(40_000);
    let mut rng = replicate_rng(sub_seed(seed, 8, 0), 0);
    let sets = heterogeneous_sets(&mut rng)?;
    for (j, (name, set)) in sets.iter().enumerate() {
        let exact = disc::cap_l2_sq(set)?;
        let mut mc_rng = replicate_rng(sub_seed(seed, 8, 1), j as u64);
        let est = disc::cap_discrepancy_mc(set, samples, &mut mc_rng)?;
        let est = est.with_theory(crate::theory::TheoryValue::exact(exact, "any point set"));
        r.z_check(format!("{name} |z|"), &est, 3.0);
    }
    let one = sphere_set(vec![[0.0, 0.0, 1.0]])?;
    r.check(
        "single point D^2 vs 1/3",
        (disc::cap_l2_sq(&one)? - 1.0 / 3.0).abs(),
        1e-12,
    );
    Ok(r)
}

fn periodic_torus2(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(9);
    let spec = EnsembleSpec::HarmonicTorus { d: 2, t: 1 };
    let est = estimate(&spec, &Statistic::PeriodicL2Sq, suite.reps(2000), sub_seed(seed, 9, 0))?;
    r.z_check("d=2 T=1 |z|", &est, 4.0);
    let mut worst = 0.0f64;
    for t in 0..=50 {
        let a = disc::expected_periodic_l2_exact(1, t)?.value;
        let b = disc::expected_periodic_l2_1d(t).value;
        worst = worst.max((a - b).abs() / b);
    }
    r.check("d=1 closed sum vs harmonic-number form, T <= 50 (relative)", worst, 1e-12);
    Ok(r)
}

fn ball(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(10);
    let table = disc::ball_coefficients(1, 2500)?;
    let worst = (1..=50usize)
        .map(|k| {
            let want = 1.0 / (2.0 * PI * PI * (k * k) as f64);
            (table[k * k] - want).abs() / want
        })
        .fold(0.0, f64::max);
    r.check("d=1 b_k vs 1/(2 pi^2 k^2), k <= 50 (relative)", worst, 1e-10);
    let table = disc::ball_coefficients(2, 2500)?;
    let c = (4..=2500usize)
        .map(|m| {
            let k = (m as f64).sqrt();
            (table[m] * 2.0 * 4.0 * PI * PI * k.powi(3) - 1.0).abs() * k
        })
        .fold(0.0, f64::max);
    r.check("d=2 |b_k d 2^d pi^2 |k|^3 - 1| |k|, 2 <= |k| <= 50", c, 1.0);
    let samples = suite.reps(100_000);
    let mut rng = replicate_rng(sub_seed(seed, 10, 0), 0);
    for j in 0..5 {
        let p = PointSet::new(Manifold::Torus(2), (0..8).map(|_| rng.random()).collect::<Vec<f64>>())?;
        let spectral = disc::ball_l2_corrected(&p, 64)?;
        let mut mc_rng = replicate_rng(sub_seed(seed, 10, 1), j);
        let est = disc::ball_l2_mc(&p, samples, &mut mc_rng)?
            .with_theory(crate::theory::TheoryValue::quadrature(spectral.sq, "K = 64"));
        r.z_check(format!("random 4-point set #{j} |z|"), &est, 3.0);
    }
    Ok(r)
}

fn smoothing_bounds(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(11);
    let reps = suite.reps(500);
    let cases = [
        (EnsembleSpec::HarmonicSphere { d: 2, l: 7 }, Preset::HarmonicSphere),
        (EnsembleSpec::HarmonicTorus { d: 2, t: 3 }, Preset::HarmonicTorus),
        (EnsembleSpec::Spherical { n: 64 }, Preset::Spherical),
    ];
    for (j, (spec, preset)) in cases.iter().enumerate() {
        let est = estimate(spec, &Statistic::W2BoundSq { t: None }, reps, sub_seed(seed, 11, j as u64))?;
        let n = spec.point_count() as f64;
        r.records.push(est.to_json());
        r.check(
            format!("{spec} sqrt(E bound^2) sqrt(N) vs {}", preset.constant()),
            est.mean.sqrt() * n.sqrt(),
            preset.constant(),
        );
    }
    Ok(r)
}

/// Label prefix of the degree-one harmonic closed-form checks.
pub const HARMONIC_DEGREE_ONE: &str = "harmonic l=1 vs 3(2L+3)/(8 pi)";

fn spectral_variances(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(12);
    for l in 0..=10usize {
        let v = transport::harmonic_sphere_spectral_variance_exact(l, 1)?.value;
        let stated = 3.0 * (2 * l + 3) as f64 / (8.0 * PI);
        r.check(format!("{HARMONIC_DEGREE_ONE}, L={l}"), (v - stated).abs(), 1e-10);
    }
    let mut worst = 0.0f64;
    for n in 1..=64usize {
        let v = transport::spherical_spectral_variance_exact(n, 1)?.value;
        let nf = n as f64;
        worst = worst.max((v - 3.0 * nf / (2.0 * PI * (nf + 1.0))).abs());
    }
    r.check("spherical l=1 vs 3N/(2 pi (N+1)), N <= 64", worst, 1e-12);
    let mut ratio = 0.0f64;
    for l in 0..=20usize {
        for ell in 1..=10usize {
            let v = transport::harmonic_sphere_spectral_variance_exact(l, ell)?.value;
            ratio = ratio.max(v / transport::harmonic_sphere_spectral_variance_bound(l, ell));
        }
    }
    r.check("harmonic exact / bound, L <= 20, l <= 10", ratio, 1.0);
    let mut ratio = 0.0f64;
    for n in 1..=64usize {
        let mut ell = 1;
        while (ell * ell) as f64 <= n as f64 {
            let v = transport::spherical_spectral_variance_exact(n, ell)?.value;
            ratio = ratio.max(v / transport::spherical_spectral_variance_bound(n, ell));
            ell += 1;
        }
    }
    r.check("spherical exact / bound, N <= 64, l <= sqrt(N)", ratio, 1.0);
    let reps = suite.reps(2000);
    for ell in [1usize, 2] {
        let spec = EnsembleSpec::HarmonicSphere { d: 2, l: 3 };
        let stat = Statistic::SpectralPower(Frequency::Degree(ell));
        let est = estimate(&spec, &stat, reps, sub_seed(seed, 12, ell as u64))?;
        r.z_check(format!("harmonic L=3 l={ell} |z|"), &est, 4.0);
    }
    let spec = EnsembleSpec::Spherical { n: 16 };
    let stat = Statistic::SpectralPower(Frequency::Degree(1));
    let est = estimate(&spec, &stat, reps, sub_seed(seed, 12, 10))?;
    r.z_check("spherical N=16 l=1 |z|", &est, 4.0);
    Ok(r)
}

/// Monte Carlo criteria whose records must be reproducible.
const MC_CRITERIA: [u32; 9] = [3, 4, 5, 7, 8, 9, 10, 11, 12];

fn determinism(suite: Suite, seed: u64) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(13);
    let run = |threads: usize| -> Result<Vec<Vec<String>>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Resource(e.to_string()))?;
        pool.install(|| {
            MC_CRITERIA
                .iter()
                .map(|&id| Ok(run_criterion(id, suite, seed)?.records))
                .collect()
        })
    };
    let first = run(1)?;
    let second = run(1)?;
    let threaded = run(4)?;
    for (i, &id) in MC_CRITERIA.iter().enumerate() {
        let differs = |other: &[Vec<String>]| f64::from(u8::from(first[i] != other[i]));
        r.check(format!("criterion {id} repeat run identical (0 = yes)"), differs(&second), 0.0);
        r.check(format!("criterion {id} 1 vs 4 threads identical (0 = yes)"), differs(&threaded), 0.0);
        r.records.extend(first[i].iter().cloned());
    }
    Ok(r)
}
