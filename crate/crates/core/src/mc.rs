//! Deterministic Monte Carlo harness.
//!
//! Replicate `r` of a run with seed `s` draws from the ChaCha20 stream
//! `(s, r)`, so results do not depend on scheduling or thread count.
//! Replicates are evaluated in parallel, collected in order and reduced
//! sequentially with Welford's algorithm.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use std::f64::consts::PI;
use std::fmt;

use crate::discrepancy::{self as disc, Frequency};
use crate::energy;
use crate::ensembles::{sample, EnsembleSpec};
use crate::error::{domain, Error, Result};
use crate::fmt::Sig17;
use crate::geometry::{Manifold, PointSet};
use crate::theory::{TheoryKind, TheoryValue};
use crate::transport::{self, Preset};

/// Running mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// `sample_std / √n`.
    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// A Monte Carlo mean with its standard error and, optionally, the theory
/// value it is compared with.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub statistic: String,
    pub ensemble: Option<EnsembleSpec>,
    pub mean: f64,
    pub stderr: f64,
    pub replicates: u64,
    /// `None` when the caller supplied the random stream.
    pub seed: Option<u64>,
    pub theory: Option<TheoryValue>,
    pub z: Option<f64>,
}

impl McEstimate {
    pub fn from_welford(statistic: impl Into<String>, w: &Welford, seed: Option<u64>) -> Self {
        Self {
            statistic: statistic.into(),
            ensemble: None,
            mean: w.mean(),
            stderr: w.stderr(),
            replicates: w.count(),
            seed,
            theory: None,
            z: None,
        }
    }

    /// Attaches a theory value and computes `z = (mean − theory) / stderr`.
    /// Upper bounds get no `z`.
    ///
    /// With zero standard error, `z` is 0 if the mean matches to `1e−12`
    /// and infinite otherwise.
    pub fn with_theory(mut self, theory: TheoryValue) -> Self {
        self.z = (theory.kind != TheoryKind::UpperBound)
            .then(|| z_score(self.mean, self.stderr, theory.value));
        self.theory = Some(theory);
        self
    }

    pub fn z_abs(&self) -> Option<f64> {
        self.z.map(f64::abs)
    }
}

pub fn z_score(mean: f64, stderr: f64, target: f64) -> f64 {
    let diff = mean - target;
    if stderr > 0.0 {
        diff / stderr
    } else if diff.abs() <= 1e-12 * (1.0 + target.abs()) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

/// The random stream for replicate `replicate` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Evaluates `f` on `replicates` independent streams and reduces the values
/// in replicate order.
///
/// # Errors
///
/// The first failing replicate (by index) is returned, wrapped with its index.
pub fn run_replicates<F>(replicates: usize, seed: u64, f: F) -> Result<Welford>
where
    F: Fn(&mut ChaCha20Rng) -> Result<f64> + Sync,
{
    let values: Vec<Result<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(seed, r as u64);
            f(&mut rng).map_err(|e| Error::Replicate {
                replicate: r,
                source: Box::new(e),
            })
        })
        .collect();
    let mut w = Welford::new();
    for v in values {
        w.push(v?);
    }
    Ok(w)
}

/// A per-realization functional whose expectation the harness estimates.
#[derive(Debug, Clone, PartialEq)]
pub enum Statistic {
    /// Riesz `s`-energy over ordered pairs.
    RieszEnergy { s: f64 },
    /// Squared spherical-cap discrepancy (Stolarsky).
    CapL2Sq,
    /// Squared periodic `L²` discrepancy on the torus (closed pairwise form).
    PeriodicL2Sq,
    /// Squared ball discrepancy on the torus, spectral sum to `|k| ≤ k_max`.
    BallL2Sq { k_max: usize },
    /// `|Σ e^{2πi⟨k,x⟩}|²` on the torus or `Σ_m |Σ Y_ℓ^m|²` on `S²`.
    SpectralPower(Frequency),
    /// `W₂²` to uniform on `T¹`.
    W2CircleSq,
    /// Squared smoothing bound on `S²` or `T²`; `None` uses the ensemble's
    /// preset `t`.
    W2BoundSq { t: Option<f64> },
}

/// Registered statistic names.
pub const STATISTICS: &[&str] = &[
    "riesz-energy",
    "cap-l2-sq",
    "periodic-l2-sq",
    "ball-l2-sq",
    "spectral-power",
    "w2-circle-sq",
    "w2-bound-sq",
];

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::RieszEnergy { s } => write!(f, "riesz-energy(s={s})"),
            Statistic::CapL2Sq => f.write_str("cap-l2-sq"),
            Statistic::PeriodicL2Sq => f.write_str("periodic-l2-sq"),
            Statistic::BallL2Sq { k_max } => write!(f, "ball-l2-sq(K={k_max})"),
            Statistic::SpectralPower(Frequency::Lattice(k)) => {
                let parts: Vec<String> = k.iter().map(i64::to_string).collect();
                write!(f, "spectral-power(k=[{}])", parts.join(","))
            }
            Statistic::SpectralPower(Frequency::Degree(l)) => write!(f, "spectral-power(l={l})"),
            Statistic::W2CircleSq => f.write_str("w2-circle-sq"),
            Statistic::W2BoundSq { t: Some(t) } => write!(f, "w2-bound-sq(t={t})"),
            Statistic::W2BoundSq { t: None } => f.write_str("w2-bound-sq(t=preset)"),
        }
    }
}

fn preset_for(spec: &EnsembleSpec) -> Option<Preset> {
    match *spec {
        EnsembleSpec::HarmonicSphere { d: 2, .. } => Some(Preset::HarmonicSphere),
        EnsembleSpec::HarmonicTorus { d: 2, .. } => Some(Preset::HarmonicTorus),
        EnsembleSpec::Spherical { .. } => Some(Preset::Spherical),
        _ => None,
    }
}

/// A statistic bound to an ensemble, with any per-run tables precomputed.
struct Evaluator {
    stat: Statistic,
    manifold: Manifold,
    ball_table: Vec<f64>,
    bound_t: f64,
    bound_cutoff: usize,
}

impl Evaluator {
    fn new(spec: &EnsembleSpec, stat: &Statistic) -> Result<Self> {
        let manifold = spec.manifold();
        let need = |ok: bool, what: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                domain(format!("{stat} needs {what}, got {manifold}"))
            }
        };
        let mut ev = Evaluator {
            stat: stat.clone(),
            manifold,
            ball_table: Vec::new(),
            bound_t: 0.0,
            bound_cutoff: 0,
        };
        match stat {
            Statistic::RieszEnergy { .. } => {}
            Statistic::CapL2Sq => need(matches!(manifold, Manifold::Sphere(_)), "a sphere")?,
            Statistic::PeriodicL2Sq => need(matches!(manifold, Manifold::Torus(_)), "a torus")?,
            Statistic::BallL2Sq { k_max } => {
                need(matches!(manifold, Manifold::Torus(_)), "a torus")?;
                if *k_max == 0 {
                    return domain("K_max >= 1 required");
                }
                ev.ball_table = disc::ball_coefficients(manifold.dim(), k_max * k_max)?;
            }
            Statistic::SpectralPower(Frequency::Lattice(k)) => {
                need(manifold == Manifold::Torus(k.len()), "a torus of matching dimension")?
            }
            Statistic::SpectralPower(Frequency::Degree(l)) => {
                need(manifold == Manifold::Sphere(2), "S^2")?;
                if *l == 0 {
                    return domain("degree >= 1 required");
                }
            }
            Statistic::W2CircleSq => need(manifold == Manifold::Torus(1), "T^1")?,
            Statistic::W2BoundSq { t } => {
                need(
                    manifold == Manifold::Sphere(2) || manifold == Manifold::Torus(2),
                    "S^2 or T^2",
                )?;
                let t = match (t, preset_for(spec)) {
                    (Some(t), _) => *t,
                    (None, Some(p)) => p.t(spec.point_count()),
                    (None, None) => return domain(format!("no preset t for {spec}; pass t")),
                };
                if !(t > 0.0) {
                    return domain("t > 0 required");
                }
                ev.bound_t = t;
                ev.bound_cutoff = match (manifold, spec) {
                    (Manifold::Sphere(_), EnsembleSpec::HarmonicSphere { l, .. }) => {
                        transport::default_sphere_cutoff(t, *l)
                    }
                    (Manifold::Sphere(_), _) => transport::default_sphere_cutoff(t, 0),
                    _ => transport::default_torus_cutoff(t),
                };
            }
        }
        Ok(ev)
    }

    fn eval(&self, points: &PointSet) -> Result<f64> {
        match &self.stat {
            Statistic::RieszEnergy { s } => energy::discrete_energy(points, *s),
            Statistic::CapL2Sq => disc::cap_l2_sq(points),
            Statistic::PeriodicL2Sq => disc::periodic_l2_exact(points),
            Statistic::BallL2Sq { k_max } => {
                Ok(disc::ball_l2_with_table(points, *k_max, &self.ball_table)?.sq)
            }
            Statistic::SpectralPower(Frequency::Lattice(k)) => {
                Ok(disc::exponential_sum(points, k)?.power)
            }
            Statistic::SpectralPower(Frequency::Degree(l)) => {
                Ok(transport::sphere_spectral_power(points, *l)?.power)
            }
            Statistic::W2CircleSq => transport::w2_circle_sq_exact(points),
            Statistic::W2BoundSq { .. } => {
                let b = match self.manifold {
                    Manifold::Sphere(_) => {
                        transport::w2_upper_bound_sphere(points, self.bound_t, self.bound_cutoff)?
                    }
                    _ => transport::w2_upper_bound_torus2(points, self.bound_t, self.bound_cutoff)?,
                };
                Ok(b.bound * b.bound)
            }
        }
    }
}

/// The theory value for `E stat(X)` under `spec`, when one is known.
pub fn theory_for(spec: &EnsembleSpec, stat: &Statistic) -> Result<Option<TheoryValue>> {
    use EnsembleSpec as E;
    let n = spec.point_count();
    let manifold = spec.manifold();
    let v = match (stat, *spec) {
        (Statistic::RieszEnergy { s }, E::HarmonicSphere { d, l }) => {
            Some(energy::harmonic_sphere_expected_energy_exact(d, l, *s)?)
        }
        (Statistic::RieszEnergy { s }, E::Spherical { n }) => {
            Some(energy::spherical_expected_energy(n, *s)?)
        }
        (Statistic::RieszEnergy { s }, E::IidUniform { manifold: Manifold::Sphere(d), n }) => {
            Some(energy::iid_expected_energy(d, n, *s)?)
        }
        (Statistic::CapL2Sq, _) => match theory_for(spec, &Statistic::RieszEnergy { s: -1.0 })? {
            Some(e) => {
                let d = manifold.dim();
                let i = energy::continuous_energy_constant(-1.0, d)?.value;
                let nf = n as f64;
                let v = disc::stolarsky_constant(d) * (i * nf * nf - e.value) / (nf * nf);
                Some(TheoryValue { value: v, ..e })
            }
            None => None,
        },
        (Statistic::PeriodicL2Sq, E::HarmonicTorus { d, t }) => {
            Some(disc::expected_periodic_l2_exact(d, t)?)
        }
        (Statistic::PeriodicL2Sq, E::IidUniform { manifold: Manifold::Torus(d), n }) => {
            Some(disc::iid_expected_periodic_l2(d, n)?)
        }
        (Statistic::BallL2Sq { k_max }, E::HarmonicTorus { d, t }) => {
            Some(disc::expected_ball_l2_exact_sum(d, t, *k_max)?)
        }
        (Statistic::BallL2Sq { k_max }, E::IidUniform { manifold: Manifold::Torus(d), n }) => {
            Some(disc::iid_expected_ball_l2(d, n, *k_max)?)
        }
        (Statistic::SpectralPower(Frequency::Lattice(k)), E::HarmonicTorus { d, t }) => {
            Some(disc::torus_variance(d, t, k)?)
        }
        (Statistic::SpectralPower(Frequency::Lattice(k)), E::IidUniform { .. }) => {
            let zero = k.iter().all(|&x| x == 0);
            let nf = n as f64;
            Some(TheoryValue::exact(if zero { nf * nf } else { nf }, "N >= 1"))
        }
        (Statistic::SpectralPower(Frequency::Degree(l)), E::HarmonicSphere { d: 2, l: big_l }) => {
            Some(transport::harmonic_sphere_spectral_variance_exact(big_l, *l)?)
        }
        (Statistic::SpectralPower(Frequency::Degree(l)), E::Spherical { n }) => {
            Some(transport::spherical_spectral_variance_exact(n, *l)?)
        }
        (Statistic::SpectralPower(Frequency::Degree(l)), E::IidUniform { n, .. }) => {
            Some(TheoryValue::exact((2 * l + 1) as f64 * n as f64 / (4.0 * PI), "N >= 1"))
        }
        (Statistic::W2CircleSq, E::HarmonicTorus { d: 1, t }) => {
            Some(transport::expected_w2_circle_harmonic(t))
        }
        (Statistic::W2CircleSq, E::IidUniform { n, .. }) => {
            let v = disc::iid_expected_periodic_l2(1, n)?;
            Some(TheoryValue::exact(v.value / 2.0, "N >= 1"))
        }
        (Statistic::W2BoundSq { t }, _) => match preset_for(spec) {
            Some(p) if t.is_none() || *t == Some(p.t(n)) => {
                let c = p.constant();
                Some(TheoryValue::upper_bound(c * c / n as f64, "preset t"))
            }
            _ => None,
        },
        _ => None,
    };
    Ok(v)
}

/// Monte Carlo estimate of `E stat(X)` over `replicates` independent
/// realizations of `spec`, compared with theory where available.
///
/// # Errors
///
/// Invalid statistic/ensemble combinations, fewer than two replicates, and
/// sampling failures (wrapped with the replicate index).
pub fn estimate(
    spec: &EnsembleSpec,
    stat: &Statistic,
    replicates: usize,
    seed: u64,
) -> Result<McEstimate> {
    estimate_with(spec, stat, replicates, seed, sample)
}

/// [`estimate`] with a caller-chosen sampler.
pub fn estimate_with<S>(
    spec: &EnsembleSpec,
    stat: &Statistic,
    replicates: usize,
    seed: u64,
    sampler: S,
) -> Result<McEstimate>
where
    S: Fn(&EnsembleSpec, &mut ChaCha20Rng) -> Result<PointSet> + Sync,
{
    spec.validate()?;
    if replicates < 2 {
        return domain("replicates >= 2 required");
    }
    let ev = Evaluator::new(spec, stat)?;
    let w = run_replicates(replicates, seed, |rng| ev.eval(&sampler(spec, rng)?))?;
    let label = match stat {
        Statistic::W2BoundSq { .. } => format!("w2-bound-sq(t={})", ev.bound_t),
        _ => stat.to_string(),
    };
    let mut est = McEstimate::from_welford(label, &w, Some(seed));
    est.ensemble = Some(*spec);
    Ok(match theory_for(spec, stat)? {
        Some(t) => est.with_theory(t),
        None => est,
    })
}

#[derive(Serialize)]
struct TheoryRef<'a> {
    value: Sig17,
    kind: &'a str,
}

#[derive(Serialize)]
struct EstimateJson<'a> {
    statistic: &'a str,
    ensemble: Option<serde_json::Value>,
    replicates: u64,
    seed: Option<u64>,
    mean: Sig17,
    stderr: Sig17,
    theory: Option<TheoryRef<'a>>,
    z: Option<Sig17>,
}

impl McEstimate {
    /// The result record as one line of JSON, every real printed to 17
    /// significant digits.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&EstimateJson {
            statistic: &self.statistic,
            ensemble: self.ensemble.as_ref().map(EnsembleSpec::to_json),
            replicates: self.replicates,
            seed: self.seed,
            mean: Sig17(self.mean),
            stderr: Sig17(self.stderr),
            theory: self.theory.as_ref().map(|t| TheoryRef {
                value: Sig17(t.value),
                kind: t.kind.as_str(),
            }),
            z: self.z.map(Sig17),
        })
        .expect("estimate serializes")
    }
}

#[derive(Serialize)]
struct TheoryJson<'a> {
    value: Sig17,
    kind: &'a str,
    valid_range: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_order: Option<&'a str>,
}

impl TheoryValue {
    /// `{"value", "kind", "valid_range", "error_order"?}` as one line of JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&TheoryJson {
            value: Sig17(self.value),
            kind: self.kind.as_str(),
            valid_range: &self.valid_range,
            error_order: self.error_order.as_deref(),
        })
        .expect("theory value serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.25, 0.0];
        let mut w = Welford::new();
        xs.iter().for_each(|&x| w.push(x));
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((w.mean() - mean).abs() < 1e-15);
        assert!((w.variance() - var).abs() < 1e-13);
        assert!((w.stderr() - (var / 6.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn z_scores() {
        assert_eq!(z_score(1.0, 0.5, 0.0), 2.0);
        assert_eq!(z_score(1.0, 0.0, 1.0), 0.0);
        assert!(z_score(1.0, 0.0, 2.0).is_infinite());
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: u64 = replicate_rng(5, 0).random();
        let b: u64 = replicate_rng(5, 1).random();
        let c: u64 = replicate_rng(5, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let f = |rng: &mut ChaCha20Rng| -> Result<f64> { Ok(rng.random::<f64>().powi(2)) };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(5).build().unwrap();
        let a = one.install(|| run_replicates(1000, 3, f).unwrap());
        let b = many.install(|| run_replicates(1000, 3, f).unwrap());
        assert_eq!(a.mean().to_bits(), b.mean().to_bits());
        assert_eq!(a.stderr().to_bits(), b.stderr().to_bits());
    }

    #[test]
    fn failing_replicate_is_named() {
        let err = run_replicates(10, 1, |rng| {
            if rng.random::<f64>() < 2.0 {
                Err(Error::Numeric("boom".into()))
            } else {
                Ok(0.0)
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Replicate { replicate: 0, .. }));
    }

    #[test]
    fn periodic_estimate_matches_exact() {
        let spec = EnsembleSpec::HarmonicTorus { d: 1, t: 1 };
        let est = estimate(&spec, &Statistic::PeriodicL2Sq, 2000, 42).unwrap();
        let want = disc::expected_periodic_l2_exact(1, 1).unwrap().value;
        assert_eq!(est.theory.as_ref().unwrap().value, want);
        assert!(est.z_abs().unwrap() <= 4.0, "{est:?}");
    }

    #[test]
    fn iid_energy_estimate() {
        let spec = EnsembleSpec::IidUniform {
            manifold: Manifold::Sphere(2),
            n: 8,
        };
        let est = estimate(&spec, &Statistic::RieszEnergy { s: -1.0 }, 2000, 7).unwrap();
        let t = est.theory.as_ref().unwrap().value;
        assert!((t - 56.0 * 4.0 / 3.0).abs() < 1e-12);
        assert!(est.z_abs().unwrap() <= 4.0, "{est:?}");
    }

    #[test]
    fn estimates_are_reproducible() {
        let spec = EnsembleSpec::HarmonicSphere { d: 2, l: 2 };
        let stat = Statistic::CapL2Sq;
        let a = estimate(&spec, &stat, 50, 3).unwrap().to_json();
        let b = estimate(&spec, &stat, 50, 3).unwrap().to_json();
        assert_eq!(a, b);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = one.install(|| estimate(&spec, &stat, 50, 3).unwrap().to_json());
        assert_eq!(a, c);
        assert_ne!(a, estimate(&spec, &stat, 50, 4).unwrap().to_json());
    }

    #[test]
    fn json_schema() {
        let spec = EnsembleSpec::HarmonicTorus { d: 1, t: 2 };
        let est = estimate(&spec, &Statistic::W2CircleSq, 10, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&est.to_json()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in ["statistic", "ensemble", "replicates", "seed", "mean", "stderr", "theory", "z"] {
            assert!(keys.contains(&k), "{k}");
        }
        assert_eq!(v["statistic"], "w2-circle-sq");
        assert_eq!(v["ensemble"]["T"], 2);
        assert_eq!(v["theory"]["kind"], "exact-closed-form");
        assert_eq!(v["replicates"], 10);
        assert!(est.to_json().contains(&crate::fmt::sig17(est.mean)));
        let none = estimate(&spec, &Statistic::SpectralPower(Frequency::Lattice(vec![3])), 5, 1)
            .unwrap();
        assert!(none.theory.is_some());
        let spec = EnsembleSpec::HarmonicSphere { d: 3, l: 1 };
        let plain = estimate(&spec, &Statistic::CapL2Sq, 5, 1).unwrap();
        assert!(plain.theory.is_some());
        let e = estimate(&spec, &Statistic::PeriodicL2Sq, 5, 1);
        assert!(matches!(e, Err(Error::Domain(_))));
        assert!(estimate(&spec, &Statistic::CapL2Sq, 1, 1).is_err());
    }

    #[test]
    fn upper_bound_has_no_z() {
        let spec = EnsembleSpec::HarmonicTorus { d: 2, t: 1 };
        let est = estimate(&spec, &Statistic::W2BoundSq { t: None }, 20, 1).unwrap();
        assert_eq!(est.theory.as_ref().unwrap().kind, TheoryKind::UpperBound);
        assert!(est.z.is_none());
        assert!(est.to_json().contains("\"z\":null"));
    }
}
