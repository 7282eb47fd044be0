use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::eig::herm_eig;
use crate::numerics::matrix::ComplexMatrix;

/// Eigenvalues in [-SQRT_CLIP_TOL, 0) are treated as round-off zeros by
/// [`sqrt_psd`]; anything below is a domain violation.
pub const SQRT_CLIP_TOL: f64 = 1e-12;

/// Matrix function of a Hermitian argument: U diag(f(lambda)) U^dag.
///
/// `f` may be complex-valued (e.g. lambda -> exp(-i lambda t)); domain
/// checking is up to the caller. See [`sqrt_psd`] and [`inv_power`] for
/// the checked real-valued variants.
pub fn herm_fn(a: &ComplexMatrix, f: impl Fn(f64) -> Complex64) -> Result<ComplexMatrix> {
    Ok(herm_eig(a)?.apply_fn(f))
}

/// Matrix function with a real-valued scalar function; the result is
/// re-symmetrized so it is Hermitian exactly.
pub fn herm_fn_real(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(herm_fn(a, |l| Complex64::new(f(l), 0.0))?.hermitian_part())
}

/// Principal square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-clip_tol, 0)` are clipped to zero; below that the
/// matrix is not PSD and a `DomainError` is returned.
pub fn sqrt_psd(a: &ComplexMatrix, clip_tol: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    if eig.min_eigenvalue() < -clip_tol {
        return Err(Error::DomainError {
            function: "sqrt",
            value: eig.min_eigenvalue(),
        });
    }
    Ok(eig
        .apply_fn(|l| Complex64::new(l.max(0.0).sqrt(), 0.0))
        .hermitian_part())
}

/// A^(-p) for Hermitian invertible A; errors if any |eigenvalue| <= tol.
pub fn inv_power(a: &ComplexMatrix, p: i32, tol: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    let min_abs = eig.min_abs_eigenvalue();
    if min_abs <= tol {
        return Err(Error::DomainError {
            function: "inv_power",
            value: min_abs,
        });
    }
    Ok(eig
        .apply_fn(|l| Complex64::new(l.powi(-p), 0.0))
        .hermitian_part())
}

/// Unitary exp(-i A t) for Hermitian A.
pub fn unitary_exp(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    herm_fn(a, |l| Complex64::from_polar(1.0, -l * t))
}
