use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::matrix::ComplexMatrix;

/// Relative Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

const OFF_DIAG_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Spectral factorization A = U diag(lambda) U^dag of a Hermitian matrix.
///
/// Eigenvalues are real and sorted ascending; the columns of `eigenvectors`
/// form the corresponding orthonormal basis.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn min_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(f64::INFINITY, |m, &l| m.min(l.abs()))
    }

    /// U diag(f(lambda)) U^dag.
    pub fn apply_fn(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let scaled = ComplexMatrix::from_fn(n, |i, j| u[(i, j)] * f(self.eigenvalues[j]));
        scaled.mul_ref(&u.adjoint())
    }

    /// U diag(lambda) U^dag; equals the input up to round-off.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| Complex64::new(l, 0.0))
    }

    /// Decomposition of A + c*I: same basis, shifted eigenvalues.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            eigenvalues: self.eigenvalues.iter().map(|l| l + c).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Each rotation annihilates one off-diagonal entry with a complex plane
/// rotation; sweeps repeat until the off-diagonal mass drops below
/// `1e-14 * |A|`. Deterministic and accurate to round-off for the small
/// dimensions this crate targets.
pub fn herm_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }

    let n = a.dim();
    let scale = a.frob_norm();
    // Symmetrize first so round-off asymmetry in the input cannot drift.
    let mut b = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    if scale > 0.0 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diag_norm(&b) <= OFF_DIAG_TOL * scale {
                converged = true;
                break;
            }
            for p in 0..n.saturating_sub(1) {
                for q in (p + 1)..n {
                    rotate(&mut b, &mut v, p, q);
                }
            }
        }
        if !converged && off_diag_norm(&b) > OFF_DIAG_TOL * scale {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[(i, i)].re.partial_cmp(&b[(j, j)].re).unwrap());

    let eigenvalues = order.iter().map(|&k| b[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diag_norm(b: &ComplexMatrix) -> f64 {
    let n = b.dim();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += b[(p, q)].norm_sqr();
        }
    }
    (2.0 * sum).sqrt()
}

/// One complex Jacobi rotation zeroing b[(p,q)]; accumulates into `v`.
fn rotate(b: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = b.dim();
    let apq = b[(p, q)];
    let r = apq.norm();
    if r < f64::MIN_POSITIVE {
        b[(p, q)] = Complex64::new(0.0, 0.0);
        b[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }

    // Peel the phase off b[(p,q)], then rotate the remaining real pair.
    let phase = apq / r;
    let phase_conj = phase.conj();
    let app = b[(p, p)].re;
    let aqq = b[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e12 {
        1.0 / (2.0 * theta)
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // b <- J^dag b J with the rotation acting on the (p,q) plane.
    for j in 0..n {
        let bjp = b[(j, p)];
        let bjq = b[(j, q)];
        b[(j, p)] = bjp.scale(c) - bjq * phase_conj.scale(s);
        b[(j, q)] = bjp.scale(s) + bjq * phase_conj.scale(c);
    }
    for j in 0..n {
        let bpj = b[(p, j)];
        let bqj = b[(q, j)];
        b[(p, j)] = bpj.scale(c) - bqj * phase.scale(s);
        b[(q, j)] = bpj.scale(s) + bqj * phase.scale(c);
    }
    b[(p, q)] = Complex64::new(0.0, 0.0);
    b[(q, p)] = Complex64::new(0.0, 0.0);
    b[(p, p)] = Complex64::new(b[(p, p)].re, 0.0);
    b[(q, q)] = Complex64::new(b[(q, q)].re, 0.0);

    for j in 0..n {
        let vjp = v[(j, p)];
        let vjq = v[(j, q)];
        v[(j, p)] = vjp.scale(c) - vjq * phase_conj.scale(s);
        v[(j, q)] = vjp.scale(s) + vjq * phase_conj.scale(c);
    }
}
