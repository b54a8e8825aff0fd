//! Spherical-cap discrepancy: Stolarsky's identity against direct
//! Monte Carlo integration over caps.

use dppkit::discrepancy::{
    cap_discrepancy_mc, cap_l2_sq, expected_cap_discrepancy_harmonic_exact,
    expected_cap_discrepancy_spherical,
};
use dppkit::ensembles::{sample, EnsembleSpec};
use dppkit::mc::replicate_rng;

fn main() -> dppkit::Result<()> {
    let mut rng = replicate_rng(11, 0);
    let spec = EnsembleSpec::HarmonicSphere { d: 2, l: 3 };
    let pts = sample(&spec, &mut rng)?;
    let exact = cap_l2_sq(&pts)?;
    let mc = cap_discrepancy_mc(&pts, 50_000, &mut rng)?;
    println!("D_cap^2 of one {spec} sample");
    println!("  Stolarsky   {exact:.8}");
    println!("  Monte Carlo {:.8} +- {:.8}", mc.mean, mc.stderr);
    println!(
        "E D_cap^2: harmonic L=3 {:.8}, spherical N=16 {:.8}",
        expected_cap_discrepancy_harmonic_exact(2, 3)?.value,
        expected_cap_discrepancy_spherical(16)?.value
    );
    Ok(())
}
