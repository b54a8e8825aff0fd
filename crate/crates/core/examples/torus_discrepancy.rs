//! Periodic (diaphony) and ball discrepancies on the torus.

use dppkit::discrepancy::{
    ball_l2, expected_ball_l2_exact_sum, expected_periodic_l2_exact, iid_expected_periodic_l2,
    periodic_l2, periodic_l2_exact,
};
use dppkit::ensembles::{sample, EnsembleSpec};
use dppkit::mc::replicate_rng;

fn main() -> dppkit::Result<()> {
    let mut rng = replicate_rng(5, 0);
    let spec = EnsembleSpec::HarmonicTorus { d: 2, t: 3 };
    let pts = sample(&spec, &mut rng)?;
    let spectral = periodic_l2(&pts, 1e-5)?;
    println!("{spec}, one sample");
    println!(
        "  periodic D^2: pairwise {:.10}, spectral {:.10} (K={}, tail <= {:.1e})",
        periodic_l2_exact(&pts)?,
        spectral.sq,
        spectral.cutoff,
        spectral.tail
    );
    let ball = ball_l2(&pts, 32)?;
    println!("  ball D^2 (|k| <= 32): {:.10}, tail ~ {:.1e}", ball.sq, ball.tail);

    for t in 1..=4usize {
        let n = (2 * t + 1).pow(2);
        println!(
            "T={t} N={n:2}  E periodic {:.3e} (iid {:.3e})  E ball {:.3e}",
            expected_periodic_l2_exact(2, t)?.value,
            iid_expected_periodic_l2(2, n)?.value,
            expected_ball_l2_exact_sum(2, t, 32)?.value
        );
    }
    Ok(())
}
