//! Riesz energies of sampled sets against the exact expectations.

use dppkit::energy::{
    continuous_energy_constant, discrete_energy, harmonic_sphere_expected_energy_asymptotic,
    harmonic_sphere_expected_energy_exact, iid_expected_energy, spherical_expected_energy,
};
use dppkit::ensembles::{sample, EnsembleSpec};
use dppkit::mc::replicate_rng;

fn main() -> dppkit::Result<()> {
    let s = -1.0;
    println!("I(s=-1, d=2) = {}", continuous_energy_constant(s, 2)?.value);

    let mut rng = replicate_rng(7, 0);
    for l in [2usize, 4, 8] {
        let spec = EnsembleSpec::HarmonicSphere { d: 2, l };
        let n = spec.point_count();
        let pts = sample(&spec, &mut rng)?;
        println!(
            "L={l:2} N={n:3}  sample {:12.4}  E harmonic {:12.4}  asymptotic {:12.4}  E iid {:12.4}",
            discrete_energy(&pts, s)?,
            harmonic_sphere_expected_energy_exact(2, l, s)?.value,
            harmonic_sphere_expected_energy_asymptotic(2, n, s)?.value,
            iid_expected_energy(2, n, s)?.value,
        );
    }
    for n in [2usize, 16, 64] {
        println!("spherical N={n:3}  E = {}", spherical_expected_energy(n, s)?.value);
    }
    Ok(())
}
