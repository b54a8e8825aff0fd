//! Reproducible Monte Carlo estimates checked against theory.

use dppkit::discrepancy::Frequency;
use dppkit::ensembles::EnsembleSpec;
use dppkit::mc::{estimate, Statistic};

fn main() -> dppkit::Result<()> {
    let runs = [
        (EnsembleSpec::HarmonicTorus { d: 1, t: 1 }, Statistic::PeriodicL2Sq),
        (EnsembleSpec::HarmonicSphere { d: 2, l: 4 }, Statistic::RieszEnergy { s: -1.0 }),
        (EnsembleSpec::Spherical { n: 16 }, Statistic::CapL2Sq),
        (
            EnsembleSpec::HarmonicTorus { d: 2, t: 2 },
            Statistic::SpectralPower(Frequency::Lattice(vec![1, 1])),
        ),
        (EnsembleSpec::HarmonicSphere { d: 2, l: 3 }, Statistic::SpectralPower(Frequency::Degree(1))),
    ];
    for (spec, stat) in &runs {
        let est = estimate(spec, stat, 1000, 42)?;
        println!("{}", est.to_json());
    }
    Ok(())
}
