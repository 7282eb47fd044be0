use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::eig::herm_eig;
use crate::numerics::matrix::ComplexMatrix;

/// Eigenvalue-pair sums at or below this threshold make the equation
/// singular.
pub const PENCIL_TOL: f64 = 1e-12;

/// Symmetry class of the right-hand side, inherited by the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Hermitian,
    AntiHermitian,
}

/// Solves X A + A X = C for Hermitian positive-definite A and a
/// right-hand side with C^dag = +/-C.
///
/// Spectral method: with A = U Lambda U^dag, the transformed equation is
/// entrywise, X~_ij = C~_ij / (lambda_i + lambda_j), where C~ = U^dag C U.
/// The solution is re-symmetrized afterwards so it carries the (anti-)
/// Hermitian symmetry of C exactly.
pub fn sylvester_solve(a: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: c.dim(),
        });
    }
    let symmetry = classify_symmetry(c)?;
    let eig = herm_eig(a)?;
    let lambda = eig.eigenvalues();
    let n = a.dim();

    for i in 0..n {
        for j in 0..n {
            let sum = lambda[i] + lambda[j];
            if sum <= PENCIL_TOL {
                return Err(Error::SingularPencil { sum });
            }
        }
    }

    let u = eig.eigenvectors();
    let u_dag = u.adjoint();
    let c_tilde = &(&u_dag * c) * u;
    let x_tilde = ComplexMatrix::from_fn(n, |i, j| c_tilde[(i, j)] / (lambda[i] + lambda[j]));
    let x = &(u * &x_tilde) * &u_dag;

    Ok(match symmetry {
        Symmetry::Hermitian => x.hermitian_part(),
        Symmetry::AntiHermitian => x.anti_hermitian_part(),
    })
}

fn classify_symmetry(c: &ComplexMatrix) -> Result<Symmetry> {
    let norm = c.frob_norm();
    if norm == 0.0 {
        return Ok(Symmetry::Hermitian);
    }
    let herm = (c - &c.adjoint()).frob_norm() / norm;
    let anti = (c + &c.adjoint()).frob_norm() / norm;
    const TOL: f64 = 1e-9;
    if herm <= TOL {
        Ok(Symmetry::Hermitian)
    } else if anti <= TOL {
        Ok(Symmetry::AntiHermitian)
    } else {
        Err(Error::NoDefiniteSymmetry {
            hermitian: herm,
            anti_hermitian: anti,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

    fn residual(a: &ComplexMatrix, c: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
        (&(x * a) + &(a * x) - c.clone()).frob_norm()
    }

    #[test]
    fn identity_coefficient_halves() {
        let c = ComplexMatrix::from_fn(3, |i, j| {
            Complex64::new((i + j) as f64, (i as f64 - j as f64) * 0.5)
        })
        .hermitian_part();
        let x = sylvester_solve(&ComplexMatrix::identity(3), &c).unwrap();
        assert!((x - c.scale_re(0.5)).frob_norm() < 1e-14);
    }

    #[test]
    fn diagonal_entrywise() {
        let a = ComplexMatrix::diag(&[1.0, 2.0]);
        let c = ComplexMatrix::from_real(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let x = sylvester_solve(&a, &c).unwrap();
        assert_abs_diff_eq!(x[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(x[(0, 1)].re, 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x[(1, 0)].re, 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x[(1, 1)].re, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn random_residual_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 6;
        let g = ComplexMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let a = &g * &g.adjoint() + ComplexMatrix::identity(n).scale_re(0.3);
        let c = ComplexMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
        .hermitian_part();
        let x = sylvester_solve(&a, &c).unwrap();
        assert!(residual(&a, &c, &x) <= 1e-10 * c.frob_norm());
        // Hermitian symmetry inherited exactly
        assert_eq!((&x - &x.adjoint()).frob_norm(), 0.0);
    }

    #[test]
    fn anti_hermitian_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 4;
        let g = ComplexMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let a = &g * &g.adjoint() + ComplexMatrix::identity(n).scale_re(0.5);
        let k = ComplexMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
        .anti_hermitian_part();
        let x = sylvester_solve(&a, &k).unwrap();
        assert!(residual(&a, &k, &x) <= 1e-10 * k.frob_norm());
        assert_eq!((&x + &x.adjoint()).frob_norm(), 0.0);
    }

    #[test]
    fn rejects_mixed_symmetry() {
        let a = ComplexMatrix::identity(2);
        let mut c = ComplexMatrix::zeros(2);
        c[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            sylvester_solve(&a, &c),
            Err(Error::NoDefiniteSymmetry { .. })
        ));
    }

    #[test]
    fn rejects_singular_pencil() {
        let a = ComplexMatrix::diag(&[1.0, -1.0]);
        let c = ComplexMatrix::identity(2);
        assert!(matches!(
            sylvester_solve(&a, &c),
            Err(Error::SingularPencil { .. })
        ));
    }
}
