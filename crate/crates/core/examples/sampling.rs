//! Draw one realization of each ensemble and print the first few points.

use dppkit::ensembles::{sample, sample_projection_dpp, EnsembleSpec};
use dppkit::mc::replicate_rng;

fn main() -> dppkit::Result<()> {
    let mut rng = replicate_rng(2024, 0);
    let specs = [
        EnsembleSpec::HarmonicSphere { d: 2, l: 4 },
        EnsembleSpec::HarmonicTorus { d: 2, t: 2 },
        EnsembleSpec::Spherical { n: 20 },
    ];
    for spec in &specs {
        let pts = sample(spec, &mut rng)?;
        println!("{spec}: {} points", pts.len());
        for p in pts.points().take(3) {
            println!("  {p:.6?}");
        }
    }

    // The spherical ensemble can also be drawn through its kernel.
    let pts = sample_projection_dpp(&EnsembleSpec::Spherical { n: 20 }, &mut rng)?;
    println!("spherical via kernel: {} points", pts.len());

    print!("{}", sample(&EnsembleSpec::HarmonicTorus { d: 1, t: 2 }, &mut rng)?.to_csv_string());
    Ok(())
}
