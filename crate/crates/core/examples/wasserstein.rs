//! W2 to the uniform measure: exact on the circle, smoothing bounds on
//! S^2 and T^2.

use dppkit::ensembles::{sample, EnsembleSpec};
use dppkit::mc::replicate_rng;
use dppkit::transport::{
    default_sphere_cutoff, expected_w2_circle_harmonic, minimize_log_t, w2_circle_fourier,
    w2_circle_quantile, w2_upper_bound_sphere, w2_upper_bound_torus2, default_torus_cutoff, Preset,
    SphereSpectrum,
};

fn main() -> dppkit::Result<()> {
    let mut rng = replicate_rng(3, 0);

    let circle = sample(&EnsembleSpec::HarmonicTorus { d: 1, t: 10 }, &mut rng)?;
    let f = w2_circle_fourier(&circle, 1e-7)?;
    println!(
        "circle N=21: W2 quantile {:.10}, Fourier {:.10}; E W2^2 = {:.3e}",
        w2_circle_quantile(&circle)?,
        f.sq.sqrt(),
        expected_w2_circle_harmonic(10).value
    );

    let spec = EnsembleSpec::HarmonicSphere { d: 2, l: 7 };
    let pts = sample(&spec, &mut rng)?;
    let n = pts.len();
    let t = Preset::HarmonicSphere.t(n);
    let b = w2_upper_bound_sphere(&pts, t, default_sphere_cutoff(t, 7))?;
    println!("{spec}: bound at preset t {:.4}, sqrt(N) x bound = {:.3}", b.bound, b.bound * (n as f64).sqrt());
    let lo = 0.05 / n as f64;
    let spectrum = SphereSpectrum::new(&pts, default_sphere_cutoff(lo, 7))?;
    let best = minimize_log_t(lo, 1.0, |t| spectrum.bound(t))?;
    println!("  optimized t = {:.3e}: bound {:.4}", best.t, best.bound);

    let spec = EnsembleSpec::HarmonicTorus { d: 2, t: 3 };
    let pts = sample(&spec, &mut rng)?;
    let t = Preset::HarmonicTorus.t(pts.len());
    let b = w2_upper_bound_torus2(&pts, t, default_torus_cutoff(t))?;
    println!("{spec}: bound at preset t {:.4}", b.bound);
    Ok(())
}
