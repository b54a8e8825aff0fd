//! Random-matrix route to the spherical ensemble: eigenvalues of `A⁻¹B` for
//! independent complex Ginibre matrices, projected onto `S^2`.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::EnsembleSpec;
use crate::error::{Error, Result};
use crate::geometry::{stereographic_to_sphere, Manifold, PointSet};

const MAX_CONDITION: f64 = 1e14;
const EIGEN_RESIDUAL: f64 = 1e-8;

/// Entries with density `π⁻¹ e^{−|z|²}`: real and imaginary parts `N(0, 1/2)`.
fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid sd");
    DMatrix::from_fn(n, n, |_, _| Complex64::new(normal.sample(rng), normal.sample(rng)))
}

fn condition(a: &DMatrix<Complex64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Eigenvalues of `m`, each verified by `‖Mv − λv‖ ≤ 1e−8 ‖M‖` for an
/// eigenvector recovered from the Schur form.
fn verified_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let m_norm = m.norm();
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000 * n.max(10))
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let tiny = f64::EPSILON * m_norm.max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        // back substitution for (T − λI) y = 0 with y_k = 1
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for i in j + 1..=k {
                s += t[(j, i)] * y[i];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < tiny {
                den = Complex64::new(tiny, 0.0);
            }
            y[j] = -s / den;
        }
        let y = nalgebra::DVector::from_vec(y);
        let v = &q * y;
        let r = (&m * &v - &v * lambda).norm() / v.norm();
        if !(r <= EIGEN_RESIDUAL * m_norm) {
            return Err(Error::Numeric(format!(
                "eigenpair {k} residual {r:e} exceeds tolerance"
            )));
        }
        out.push(lambda);
    }
    Ok(out)
}

/// Samples the spherical ensemble with `n` points from the eigenvalues of
/// `A⁻¹B`, mapped by inverse stereographic projection.
///
/// # Errors
///
/// If `A` has condition number above `1e14` it is redrawn once; a second
/// failure is a [`Error::Singular`]. Eigensolver failures are numeric errors.
pub fn sample_spherical_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::Domain("N >= 1 required".into()));
    }
    let mut a = ginibre(n, rng);
    let b = ginibre(n, rng);
    if condition(&a) > MAX_CONDITION {
        a = ginibre(n, rng);
        if condition(&a) > MAX_CONDITION {
            return Err(Error::Singular("matrix A is numerically singular".into()));
        }
    }
    let m = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Singular("matrix A is singular".into()))?;
    let eig = verified_eigenvalues(m)?;
    let mut coords = Vec::with_capacity(3 * n);
    for z in eig {
        coords.extend(stereographic_to_sphere(z).into_coords());
    }
    let spec = EnsembleSpec::Spherical { n };
    Ok(PointSet::new(Manifold::Sphere(2), coords)?.with_meta(spec.to_string(), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn eigenvalues_of_known_matrix() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 3.0),
            ],
        );
        let mut e = verified_eigenvalues(m).unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((e[0] - Complex64::new(0.0, 3.0)).norm() < 1e-12);
        assert!((e[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn one_point_is_ratio_of_gaussians() {
        // With N = 1 the point is b/a; replay the same stream to compare.
        let mut r1 = ChaCha20Rng::seed_from_u64(8);
        let mut r2 = ChaCha20Rng::seed_from_u64(8);
        let s = sample_spherical_matrix(1, &mut r1).unwrap();
        let a = ginibre(1, &mut r2)[(0, 0)];
        let b = ginibre(1, &mut r2)[(0, 0)];
        let want = stereographic_to_sphere(b / a);
        for (x, y) in s.point(0).iter().zip(want.coords()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn sample_has_n_unit_points() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for n in [2usize, 16, 64] {
            let s = sample_spherical_matrix(n, &mut rng).unwrap();
            assert_eq!(s.len(), n);
        }
    }
}
