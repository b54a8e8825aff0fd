//! Gauss-Jacobi quadrature, Jacobi polynomials and the S^2 kernel.

use std::f64::consts::PI;

use dppkit::ensembles::HarmonicSphereKernel;
use dppkit::specfun::{gauss_jacobi_rule, jacobi_eval, jacobi_norm, legendre_eval, JacobiParams};

fn main() -> dppkit::Result<()> {
    let params = JacobiParams::new(1.0, 0.0)?;
    let rule = gauss_jacobi_rule(params, 16)?;
    for k in [0usize, 3, 10] {
        let q = rule.integrate(|t| jacobi_eval(params, k, t).powi(2));
        println!("||P_{k}^(1,0)||^2: quadrature {q:.15}, closed form {:.15}", jacobi_norm(params, k));
    }

    let kernel = HarmonicSphereKernel::new(2, 5)?;
    for t in [-1.0, 0.0, 0.5, 1.0] {
        let direct: f64 = (0..=5).map(|l| (2 * l + 1) as f64 * legendre_eval(l, t)).sum::<f64>() / (4.0 * PI);
        println!("K_5({t:4}) = {:.12} (Legendre sum {direct:.12})", kernel.eval(t));
    }
    Ok(())
}
