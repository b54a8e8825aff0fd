//! Command-line front end: `sample`, `stat`, `theory` and `verify`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::discrepancy::{self as disc, Frequency};
use crate::energy;
use crate::ensembles::{self, EnsembleSpec};
use crate::error::{Error, Result};
use crate::fmt::{sig17, Sig17};
use crate::geometry::{Manifold, PointSet};
use crate::mc::{self, replicate_rng, Statistic};
use crate::theory::TheoryValue;
use crate::transport::{self, Preset};
use crate::verify::{self, Suite};

#[derive(Debug, Parser)]
#[command(name = "dppkit", version, about = "Determinantal point processes on spheres and tori")]
pub struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one realization and write it as CSV.
    Sample(SampleArgs),
    /// Evaluate a statistic on a CSV point set, or estimate its mean over an ensemble.
    Stat(StatArgs),
    /// Evaluate a closed-form or quadrature expectation.
    Theory(TheoryArgs),
    /// Run the verification grid.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleKind {
    HarmonicSphere,
    HarmonicTorus,
    Spherical,
    IidSphere,
    IidTorus,
}

#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    #[arg(long, value_enum)]
    pub ensemble: Option<EnsembleKind>,
    /// Dimension of the sphere or torus.
    #[arg(long)]
    pub d: Option<usize>,
    /// Degree cutoff of the harmonic sphere ensemble.
    #[arg(long = "L")]
    pub degree: Option<usize>,
    /// Frequency box of the harmonic torus ensemble.
    #[arg(long = "T")]
    pub box_size: Option<usize>,
    /// Number of points (spherical and i.i.d. ensembles).
    #[arg(long = "N")]
    pub n: Option<usize>,
}

impl EnsembleArgs {
    pub fn spec(&self) -> Result<EnsembleSpec> {
        let kind = self
            .ensemble
            .ok_or_else(|| Error::Usage("--ensemble is required".into()))?;
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| Error::Usage(format!("--{flag} is required for this ensemble")))
        };
        let spec = match kind {
            EnsembleKind::HarmonicSphere => EnsembleSpec::HarmonicSphere {
                d: self.d.unwrap_or(2),
                l: need(self.degree, "L")?,
            },
            EnsembleKind::HarmonicTorus => EnsembleSpec::HarmonicTorus {
                d: need(self.d, "d")?,
                t: need(self.box_size, "T")?,
            },
            EnsembleKind::Spherical => {
                if self.d.is_some_and(|d| d != 2) {
                    return Err(Error::Usage("the spherical ensemble lives on S^2".into()));
                }
                EnsembleSpec::Spherical { n: need(self.n, "N")? }
            }
            EnsembleKind::IidSphere => EnsembleSpec::IidUniform {
                manifold: Manifold::Sphere(need(self.d, "d")?),
                n: need(self.n, "N")?,
            },
            EnsembleKind::IidTorus => EnsembleSpec::IidUniform {
                manifold: Manifold::Torus(need(self.d, "d")?),
                n: need(self.n, "N")?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct StatArgs {
    /// riesz-energy, cap-l2[-sq], periodic-l2[-sq], ball-l2[-sq],
    /// spectral-power, w2-circle[-sq], w2-bound[-sq]
    #[arg(long)]
    pub statistic: String,
    /// CSV point set to evaluate.
    #[arg(long, conflicts_with = "mc")]
    pub input: Option<PathBuf>,
    /// Estimate the ensemble mean by Monte Carlo instead.
    #[arg(long)]
    pub mc: bool,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Riesz exponent.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Heat-kernel time of the smoothing bound.
    #[arg(long = "t")]
    pub time: Option<f64>,
    /// Lattice frequency, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Option<Vec<i64>>,
    /// Spherical harmonic degree.
    #[arg(long)]
    pub ell: Option<usize>,
    /// Ball discrepancy cutoff |k| <= K.
    #[arg(long, default_value_t = 64)]
    pub k_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Formula name; `theory list` prints them all.
    pub formula: String,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long = "L")]
    pub degree: Option<usize>,
    #[arg(long = "T")]
    pub box_size: Option<usize>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "t")]
    pub time: Option<f64>,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Option<Vec<i64>>,
    #[arg(long, default_value_t = 64)]
    pub k_max: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// fast or full
    pub suite: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Only these criteria (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u32>>,
    /// Print every check, not only the summary line.
    #[arg(short, long)]
    pub verbose: bool,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut out = std::io::stdout();
    match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Usage(_) | Error::UnknownStatistic(_)) {
                2
            } else {
                1
            }
        }
    }
}

/// Runs a parsed command, writing its output to `out`.
pub fn run(cli: Cli, out: &mut (dyn Write + Send)) -> Result<i32> {
    match cli.threads {
        Some(0) => Err(Error::Usage("--threads must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Resource(e.to_string()))?;
            pool.install(|| dispatch(cli.command, out))
        }
        None => dispatch(cli.command, out),
    }
}

fn dispatch(command: Command, out: &mut (dyn Write + Send)) -> Result<i32> {
    match command {
        Command::Sample(a) => cmd_sample(&a, out),
        Command::Stat(a) => cmd_stat(&a, out),
        Command::Theory(a) => cmd_theory(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    }
}

fn cmd_sample(a: &SampleArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let spec = a.ensemble.spec()?;
    let mut rng = replicate_rng(a.seed, 0);
    let points = ensembles::sample(&spec, &mut rng)?.with_meta(spec.to_string(), Some(a.seed));
    match &a.output {
        Some(path) => points.save(path)?,
        None => points.write_csv(&mut *out)?,
    }
    Ok(0)
}

/// A statistic of one point set, including the unsquared variants.
#[derive(Debug, Clone)]
enum SetStatistic {
    Squared(Statistic),
    Root(Statistic),
}

fn parse_statistic(a: &StatArgs) -> Result<SetStatistic> {
    let name = a.statistic.as_str();
    let (base, root) = match name.strip_suffix("-sq") {
        Some(b) => (b, false),
        None => (name, true),
    };
    let stat = match base {
        "riesz-energy" => {
            let s = a
                .s
                .ok_or_else(|| Error::Usage("riesz-energy needs --s".into()))?;
            return Ok(SetStatistic::Squared(Statistic::RieszEnergy { s }));
        }
        "spectral-power" => {
            let f = match (&a.k, a.ell) {
                (Some(k), None) => Frequency::Lattice(k.clone()),
                (None, Some(l)) => Frequency::Degree(l),
                _ => return Err(Error::Usage("spectral-power needs exactly one of --k, --ell".into())),
            };
            return Ok(SetStatistic::Squared(Statistic::SpectralPower(f)));
        }
        "cap-l2" => Statistic::CapL2Sq,
        "periodic-l2" => Statistic::PeriodicL2Sq,
        "ball-l2" => Statistic::BallL2Sq { k_max: a.k_max },
        "w2-circle" => Statistic::W2CircleSq,
        "w2-bound" => Statistic::W2BoundSq { t: a.time },
        _ => return Err(Error::UnknownStatistic(name.to_string())),
    };
    Ok(if root {
        SetStatistic::Root(stat)
    } else {
        SetStatistic::Squared(stat)
    })
}

#[derive(Serialize)]
struct PointsRef {
    manifold: &'static str,
    d: usize,
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Serialize)]
struct SetValueJson<'a> {
    statistic: &'a str,
    points: PointsRef,
    value: Sig17,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_bound: Option<Sig17>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoff: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<Sig17>,
}

struct SetValue {
    label: String,
    value: f64,
    tail_bound: Option<f64>,
    cutoff: Option<u64>,
    t: Option<f64>,
}

impl SetValue {
    fn plain(label: String, value: f64) -> Self {
        Self {
            label,
            value,
            tail_bound: None,
            cutoff: None,
            t: None,
        }
    }
}

fn smoothing_bound(points: &PointSet, t: Option<f64>) -> Result<transport::SmoothingBound> {
    let n = points.len();
    match points.manifold() {
        Manifold::Sphere(2) => match t {
            Some(t) => transport::w2_upper_bound_sphere(points, t, transport::default_sphere_cutoff(t, 0)),
            None => {
                let lo = 0.01 / n as f64;
                let spectrum =
                    transport::SphereSpectrum::new(points, transport::default_sphere_cutoff(lo, 0))?;
                transport::minimize_log_t(lo, 1.0, |t| spectrum.bound(t))
            }
        },
        Manifold::Torus(2) => match t {
            Some(t) => transport::w2_upper_bound_torus2(points, t, transport::default_torus_cutoff(t)),
            None => {
                let lo = 0.01 / n as f64;
                let spectrum =
                    transport::TorusSpectrum::new(points, transport::default_torus_cutoff(lo))?;
                transport::minimize_log_t(lo, 1.0, |t| spectrum.bound(t))
            }
        },
        m => Err(Error::Domain(format!("smoothing bound needs S^2 or T^2, got {m}"))),
    }
}

fn evaluate_set(points: &PointSet, stat: &SetStatistic) -> Result<SetValue> {
    let (inner, root) = match stat {
        SetStatistic::Squared(s) => (s, false),
        SetStatistic::Root(s) => (s, true),
    };
    let finish = |sq: f64| if root { sq.max(0.0).sqrt() } else { sq };
    let label = match (inner, root) {
        (Statistic::W2BoundSq { t: None }, r) => {
            if r { "w2-bound(t=optimal)" } else { "w2-bound-sq(t=optimal)" }.to_string()
        }
        (s, true) => s.to_string().replacen("-sq", "", 1),
        (s, false) => s.to_string(),
    };
    Ok(match inner {
        Statistic::RieszEnergy { s } => SetValue::plain(label, energy::discrete_energy(points, *s)?),
        Statistic::CapL2Sq => SetValue::plain(label, finish(disc::cap_l2_sq(points)?)),
        Statistic::PeriodicL2Sq => SetValue::plain(label, finish(disc::periodic_l2_exact(points)?)),
        Statistic::BallL2Sq { k_max } => {
            let r = disc::ball_l2(points, *k_max)?;
            SetValue {
                label,
                value: finish(r.sq),
                tail_bound: Some(r.tail),
                cutoff: Some(r.cutoff as u64),
                t: None,
            }
        }
        Statistic::SpectralPower(Frequency::Lattice(k)) => {
            SetValue::plain(label, disc::exponential_sum(points, k)?.power)
        }
        Statistic::SpectralPower(Frequency::Degree(l)) => {
            SetValue::plain(label, transport::sphere_spectral_power(points, *l)?.power)
        }
        Statistic::W2CircleSq => {
            let w = transport::w2_circle_quantile(points)?;
            SetValue::plain(label, if root { w } else { w * w })
        }
        Statistic::W2BoundSq { t } => {
            let b = smoothing_bound(points, *t)?;
            SetValue {
                label,
                value: if root { b.bound } else { b.bound * b.bound },
                tail_bound: Some(b.tail_bound),
                cutoff: Some(b.cutoff as u64),
                t: Some(b.t),
            }
        }
    })
}

fn cmd_stat(a: &StatArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let stat = parse_statistic(a)?;
    if a.mc {
        let SetStatistic::Squared(stat) = stat else {
            return Err(Error::Usage(format!(
                "--mc estimates squared statistics; use {}-sq",
                a.statistic
            )));
        };
        let spec = a.ensemble.spec()?;
        let est = mc::estimate(&spec, &stat, a.replicates, a.seed)?;
        match a.format {
            Format::Json => writeln!(out, "{}", est.to_json())?,
            Format::Csv => {
                writeln!(out, "statistic,ensemble,replicates,seed,mean,stderr,theory,z")?;
                let opt = |v: Option<f64>| v.map(sig17).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    est.statistic,
                    spec,
                    est.replicates,
                    a.seed,
                    sig17(est.mean),
                    sig17(est.stderr),
                    opt(est.theory.as_ref().map(|t| t.value)),
                    opt(est.z)
                )?;
            }
        }
        return Ok(0);
    }
    let path = a
        .input
        .as_ref()
        .ok_or_else(|| Error::Usage("stat needs --input <csv> or --mc".into()))?;
    let points = PointSet::load(path)?;
    let v = evaluate_set(&points, &stat)?;
    let m = points.manifold();
    match a.format {
        Format::Json => {
            let json = serde_json::to_string(&SetValueJson {
                statistic: &v.label,
                points: PointsRef {
                    manifold: m.name(),
                    d: m.dim(),
                    n: points.len(),
                },
                value: Sig17(v.value),
                tail_bound: v.tail_bound.map(Sig17),
                cutoff: v.cutoff,
                t: v.t.map(Sig17),
            })
            .expect("value serializes");
            writeln!(out, "{json}")?;
        }
        Format::Csv => {
            writeln!(out, "statistic,manifold,d,N,value")?;
            writeln!(
                out,
                "{},{},{},{},{}",
                v.label,
                m.name(),
                m.dim(),
                points.len(),
                sig17(v.value)
            )?;
        }
    }
    Ok(0)
}

/// Names accepted by `theory`, with their parameters.
pub const FORMULAS: &[(&str, &str)] = &[
    ("I", "--s --d: continuous Riesz energy constant"),
    ("C", "--s --d: second-order energy constant"),
    ("kappa", "--d: constant term at s = -1"),
    ("harmonic-energy", "--d --L --s: exact E E_s, harmonic sphere ensemble"),
    ("harmonic-energy-asymptotic", "--d --N --s"),
    ("az-energy", "--N --s: exact E E_s, spherical ensemble"),
    ("iid-energy", "--d --N --s"),
    ("stolarsky-constant", "--d"),
    ("cap-harmonic", "--d --L: exact E D_cap^2"),
    ("cap-harmonic-asymptotic", "--d --N"),
    ("cap-spherical", "--N"),
    ("torus-variance", "--d --T --k"),
    ("periodic", "--d --T: exact E D_per^2"),
    ("periodic-1d", "--T"),
    ("periodic-asymptotic", "--d --N"),
    ("periodic-iid", "--d --N"),
    ("ball", "--d --T --k-max: E D_ball^2 summed to |k| <= K"),
    ("ball-asymptotic", "--d --N"),
    ("ball-iid", "--d --N --k-max"),
    ("w2-circle", "--T: exact E W2^2 on the circle"),
    ("w2-circle-asymptotic", "--N"),
    ("heat-trace", "--t: sum over l >= 1 of (2l+1) e^{-t l(l+1)} / (4 pi l(l+1))"),
    ("sphere-variance", "--L --ell: harmonic ensemble on S^2"),
    ("sphere-variance-bound", "--L --ell"),
    ("spherical-variance", "--N --ell"),
    ("spherical-variance-bound", "--N --ell"),
    ("w2-preset-t-sphere", "--N: preset heat-kernel time, harmonic sphere ensemble"),
    ("w2-preset-t-torus", "--N: preset heat-kernel time, harmonic torus ensemble"),
    ("w2-preset-t-spherical", "--N: preset heat-kernel time, spherical ensemble"),
];

fn cmd_theory(a: &TheoryArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| Error::Usage(format!("{} needs --{flag}", a.formula)))
    };
    let s = || {
        a.s.ok_or_else(|| Error::Usage(format!("{} needs --s", a.formula)))
    };
    let d = || need(a.d, "d");
    let l = || need(a.degree, "L");
    let t = || need(a.box_size, "T");
    let n = || need(a.n, "N");
    let ell = || need(a.ell, "ell");
    let v: TheoryValue = match a.formula.as_str() {
        "list" => {
            for (name, help) in FORMULAS {
                writeln!(out, "{name:<28} {help}")?;
            }
            return Ok(0);
        }
        "I" => energy::continuous_energy_constant(s()?, d()?)?,
        "C" => {
            let c = energy::harmonic_sphere_energy_constants(s()?, d()?)?;
            TheoryValue::exact(c.c, "s < 0")
        }
        "kappa" => {
            let d = d()?;
            energy::harmonic_sphere_energy_constants(-1.0, d)?;
            TheoryValue::exact(energy::kappa(d), "d >= 1")
        }
        "harmonic-energy" => energy::harmonic_sphere_expected_energy_exact(a.d.unwrap_or(2), l()?, s()?)?,
        "harmonic-energy-asymptotic" => {
            energy::harmonic_sphere_expected_energy_asymptotic(a.d.unwrap_or(2), n()?, s()?)?
        }
        "az-energy" => energy::spherical_expected_energy(n()?, s()?)?,
        "iid-energy" => energy::iid_expected_energy(d()?, n()?, s()?)?,
        "stolarsky-constant" => TheoryValue::exact(disc::stolarsky_constant(d()?), "d >= 1"),
        "cap-harmonic" => disc::expected_cap_discrepancy_harmonic_exact(a.d.unwrap_or(2), l()?)?,
        "cap-harmonic-asymptotic" => disc::expected_cap_discrepancy_harmonic(a.d.unwrap_or(2), n()?)?,
        "cap-spherical" => disc::expected_cap_discrepancy_spherical(n()?)?,
        "torus-variance" => {
            let k = a
                .k
                .as_ref()
                .ok_or_else(|| Error::Usage("torus-variance needs --k".into()))?;
            disc::torus_variance(a.d.unwrap_or(k.len()), t()?, k)?
        }
        "periodic" => disc::expected_periodic_l2_exact(d()?, t()?)?,
        "periodic-1d" => disc::expected_periodic_l2_1d(t()?),
        "periodic-asymptotic" => disc::expected_periodic_l2_asymptotic(d()?, n()?)?,
        "periodic-iid" => disc::iid_expected_periodic_l2(d()?, n()?)?,
        "ball" => disc::expected_ball_l2_exact_sum(d()?, t()?, a.k_max)?,
        "ball-asymptotic" => disc::expected_ball_l2_asymptotic(d()?, n()?)?,
        "ball-iid" => disc::iid_expected_ball_l2(d()?, n()?, a.k_max)?,
        "w2-circle" => transport::expected_w2_circle_harmonic(t()?),
        "w2-circle-asymptotic" => transport::expected_w2_circle_harmonic_asymptotic(n()?)?,
        "heat-trace" => {
            let t = a
                .time
                .ok_or_else(|| Error::Usage("heat-trace needs --t".into()))?;
            if !(t > 0.0) {
                return Err(Error::Domain("t > 0 required".into()));
            }
            TheoryValue::exact(transport::heat_trace_sphere(t), "t > 0")
        }
        "sphere-variance" => transport::harmonic_sphere_spectral_variance_exact(l()?, ell()?)?,
        "sphere-variance-bound" => TheoryValue::upper_bound(
            transport::harmonic_sphere_spectral_variance_bound(l()?, ell()?),
            "l >= 1",
        ),
        "spherical-variance" => transport::spherical_spectral_variance_exact(n()?, ell()?)?,
        "spherical-variance-bound" => TheoryValue::upper_bound(
            transport::spherical_spectral_variance_bound(n()?, ell()?),
            "1 <= l <= sqrt(N)",
        ),
        "w2-preset-t-sphere" => TheoryValue::exact(Preset::HarmonicSphere.t(n()?), "N >= 1"),
        "w2-preset-t-torus" => TheoryValue::exact(Preset::HarmonicTorus.t(n()?), "N >= 1"),
        "w2-preset-t-spherical" => TheoryValue::exact(Preset::Spherical.t(n()?), "N >= 1"),
        other => {
            return Err(Error::Usage(format!(
                "unknown formula '{other}' (see `theory list`)"
            )))
        }
    };
    writeln!(out, "{}", v.to_json())?;
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let suite: Suite = a.suite.parse()?;
    let ids: Vec<u32> = a.only.clone().unwrap_or_else(|| verify::CRITERIA.to_vec());
    let mut failed = 0;
    writeln!(out, "verify {suite} --seed {}", a.seed)?;
    for id in ids {
        let report = verify::run_criterion(id, suite, a.seed)?;
        if a.verbose {
            write!(out, "{}", report.table())?;
        } else {
            writeln!(out, "{}", report.line())?;
            for c in report.checks.iter().filter(|c| !c.passed()) {
                writeln!(out, "     failing: {} = {:.6e} (limit {:.6e})", c.label, c.value, c.limit)?;
            }
        }
        out.flush()?;
        if !report.passed() {
            failed += 1;
        }
    }
    writeln!(out, "{failed} criteria failed")?;
    Ok(if failed == 0 { 0 } else { 1 })
}
