//! The dynamic metric g_H(X,Y) = 1/2 tr(X^dag H^-2 Y + Y^dag H^-2 X) on the
//! purification sphere, the horizontal/vertical decomposition it induces,
//! the inherited base metric on faithful densities (Bures when H = I), and
//! frame/volume machinery for phase-volume checks.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::error::{Error, Result};
use crate::numerics::{inv_power, sylvester_solve, ComplexMatrix};
use crate::states::{DensityMatrix, Hamiltonian, Purification, TangentVector, STATE_TOL};

/// Two tangent vectors must sit over base points this close to be paired.
const BASE_MATCH_TOL: f64 = 1e-10;

/// Gram-Schmidt drops candidate vectors below this norm.
const FRAME_NORM_TOL: f64 = 1e-12;

/// Riemannian metric on the purification sphere induced by an invertible
/// Hamiltonian. The inverse power is 2 for the dynamic metric proper; other
/// powers are a diagnostic knob for fault-injection studies (the flow stays
/// an isometry of any H-function metric, so only curvature-sensitive checks
/// notice the difference).
#[derive(Debug, Clone)]
pub struct DynamicMetric {
    h: Hamiltonian,
    weight: ComplexMatrix,
    inverse_power: u32,
}

impl DynamicMetric {
    pub fn new(h: Hamiltonian) -> Self {
        let weight = h.inv2().clone();
        Self {
            h,
            weight,
            inverse_power: 2,
        }
    }

    /// Metric weighted by H^-p instead of H^-2.
    pub fn with_inverse_power(h: Hamiltonian, power: u32) -> Self {
        let weight = inv_power(h.matrix(), power as i32, STATE_TOL)
            .expect("Hamiltonian is invertible by construction");
        Self {
            h,
            weight,
            inverse_power: power,
        }
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.h
    }

    pub fn inverse_power(&self) -> u32 {
        self.inverse_power
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// The ambient bilinear form Re tr(A^dag H^-2 B), defined for any two
    /// matrices regardless of base point.
    pub fn ambient_inner(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
        if a.dim() != self.dim() || b.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        Ok(a.frob_inner(&self.weight.mul_ref(b))?.re)
    }

    /// g_H(X,Y) for two tangent vectors at the same base point.
    pub fn g_total(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        let separation = x.base_separation(y);
        if separation > BASE_MATCH_TOL {
            return Err(Error::BasePointMismatch { separation });
        }
        self.ambient_inner(x.matrix(), y.matrix())
    }

    /// Ambient g_H length of W - V; preserved exactly by the flow and a
    /// lower bound for geodesic distance on the sphere.
    pub fn chord_distance(&self, w: &Purification, v: &Purification) -> Result<f64> {
        let diff = w.matrix() - v.matrix();
        Ok(self.ambient_inner(&diff, &diff)?.max(0.0).sqrt())
    }

    /// Decomposes a tangent vector into its vertical part W*A (A
    /// anti-Hermitian, tangent to the fibre) and the g_H-orthogonal
    /// horizontal remainder.
    ///
    /// The gauge generator A solves A M + M A = -K with M = W^dag H^-2 W and
    /// K = X^dag H^-2 W - W^dag H^-2 X, so one Sylvester solve replaces a
    /// least-squares system over the fibre directions.
    pub fn split(&self, x: &TangentVector) -> Result<(TangentVector, TangentVector)> {
        let w = x.base();
        if !w.is_invertible() {
            return Err(Error::SingularBase {
                sigma_min: w.sigma_min(),
            });
        }
        let wm = w.matrix();
        let weighted_w = self.weight.mul_ref(wm);
        let m = wm.adjoint().mul_ref(&weighted_w).hermitian_part();
        let k = (x.matrix().adjoint().mul_ref(&weighted_w)
            - wm.adjoint().mul_ref(&self.weight.mul_ref(x.matrix())))
        .anti_hermitian_part();
        let a = sylvester_solve(&m, &(-&k))?;
        let vertical = wm.mul_ref(&a);
        let horizontal = x.matrix() - &vertical;
        Ok((
            TangentVector::attach(w.clone(), vertical),
            TangentVector::attach(w.clone(), horizontal),
        ))
    }

    /// Residual of the horizontality condition X^dag H^-2 W = W^dag H^-2 X,
    /// relative to |X|.
    pub fn horizontality_defect(&self, x: &TangentVector) -> f64 {
        let wm = x.base().matrix();
        let k = x.matrix().adjoint().mul_ref(&self.weight.mul_ref(wm))
            - wm.adjoint().mul_ref(&self.weight.mul_ref(x.matrix()));
        let scale = x.matrix().frob_norm();
        if scale == 0.0 {
            0.0
        } else {
            k.frob_norm() / scale
        }
    }

    /// Horizontal lift of a base tangent Y (Hermitian, traceless) at rho to
    /// the purification W over rho: Wdot = H G_Y H^-1 W, with G_Y the unique
    /// Hermitian solution of
    /// H^-1 Y H^-1 = G_Y (H^-1 rho H^-1) + (H^-1 rho H^-1) G_Y.
    pub fn horizontal_lift(
        &self,
        rho: &DensityMatrix,
        y: &ComplexMatrix,
        w: &Purification,
    ) -> Result<TangentVector> {
        check_base_tangent(y)?;
        if !rho.is_strictly_positive() {
            return Err(Error::NotStrictlyPositive {
                min_eigenvalue: rho.min_eigenvalue(),
            });
        }
        let projected = w.matrix().mul_ref(&w.matrix().adjoint());
        let defect = (&projected - rho.matrix()).frob_norm();
        if defect > STATE_TOL {
            return Err(Error::BaseMismatch { defect });
        }
        let g = self.lift_generator(rho, y)?;
        let wdot = self
            .h
            .matrix()
            .mul_ref(&g)
            .mul_ref(self.h.inv())
            .mul_ref(w.matrix());
        Ok(TangentVector::attach(w.clone(), wdot))
    }

    fn lift_generator(&self, rho: &DensityMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let hinv = self.h.inv();
        let a = hinv.mul_ref(rho.matrix()).mul_ref(hinv).hermitian_part();
        let c = hinv.mul_ref(y).mul_ref(hinv).hermitian_part();
        sylvester_solve(&a, &c)
    }

    /// The metric inherited on the base manifold of faithful densities:
    /// g(Y,Z) = 1/2 tr(H^-1 G_Y H^-1 Z). Equals g_total of the horizontal
    /// lifts over any purification of rho.
    pub fn base_metric(
        &self,
        rho: &DensityMatrix,
        y: &ComplexMatrix,
        z: &ComplexMatrix,
    ) -> Result<f64> {
        check_base_tangent(y)?;
        check_base_tangent(z)?;
        if !rho.is_strictly_positive() {
            return Err(Error::NotStrictlyPositive {
                min_eigenvalue: rho.min_eigenvalue(),
            });
        }
        let g = self.lift_generator(rho, y)?;
        let hinv = self.h.inv();
        let value = hinv.mul_ref(&g).mul_ref(hinv).mul_ref(z).trace();
        Ok(0.5 * value.re)
    }

    /// A g_H-orthonormal basis of the tangent space at W, built by
    /// Gram-Schmidt from the seeded-shuffled coordinate directions of the
    /// ambient matrix space projected onto the tangent space.
    pub fn frame(&self, w: &Purification, seed: u64) -> Result<Frame> {
        if !w.is_invertible() {
            return Err(Error::SingularBase {
                sigma_min: w.sigma_min(),
            });
        }
        let n = self.dim();
        let wanted = 2 * n * n - 1;
        let mut candidates = Vec::with_capacity(2 * n * n);
        for a in 0..n {
            for b in 0..n {
                let mut real_dir = ComplexMatrix::zeros(n);
                real_dir[(a, b)] = Complex64::new(1.0, 0.0);
                let mut imag_dir = ComplexMatrix::zeros(n);
                imag_dir[(a, b)] = Complex64::new(0.0, 1.0);
                candidates.push(real_dir);
                candidates.push(imag_dir);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        candidates.shuffle(&mut rng);

        let mut vectors: Vec<TangentVector> = Vec::with_capacity(wanted);
        for candidate in candidates {
            if vectors.len() == wanted {
                break;
            }
            let radial = w.matrix().frob_inner(&candidate)?.re;
            let mut x = candidate - w.matrix().scale_re(radial);
            // two orthogonalization passes keep the frame orthonormal to
            // round-off even for nearly dependent candidates
            for _ in 0..2 {
                for e in &vectors {
                    let coeff = self.ambient_inner(e.matrix(), &x)?;
                    x = x - e.matrix().scale_re(coeff);
                }
            }
            let norm = self.ambient_inner(&x, &x)?.max(0.0).sqrt();
            if norm < FRAME_NORM_TOL {
                continue;
            }
            vectors.push(TangentVector::attach(
                w.clone(),
                x.scale_re(1.0 / norm),
            ));
        }
        if vectors.len() < wanted {
            return Err(Error::DegenerateFrame {
                built: vectors.len(),
                wanted,
            });
        }
        Ok(Frame {
            base: w.clone(),
            vectors,
        })
    }
}

/// Checks that a base-manifold tangent is Hermitian and traceless.
fn check_base_tangent(y: &ComplexMatrix) -> Result<()> {
    let defect = y.hermitian_defect();
    if defect > STATE_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let trace = y.trace().norm();
    if trace > STATE_TOL * y.frob_norm().max(1.0) {
        return Err(Error::NotTangent { residual: trace });
    }
    Ok(())
}

/// The Bures metric on faithful densities: 1/2 tr(G_Y Z) with G_Y the
/// unique Hermitian solution of Y = G_Y rho + rho G_Y. This is the base
/// metric of the dynamic metric at H = I.
pub fn bures_metric(rho: &DensityMatrix, y: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    check_base_tangent(y)?;
    check_base_tangent(z)?;
    if !rho.is_strictly_positive() {
        return Err(Error::NotStrictlyPositive {
            min_eigenvalue: rho.min_eigenvalue(),
        });
    }
    let g = sylvester_solve(rho.matrix(), y)?;
    Ok(0.5 * g.mul_ref(z).trace().re)
}

/// A g_H-orthonormal frame of the tangent space at a bundle point.
#[derive(Debug, Clone)]
pub struct Frame {
    base: Purification,
    vectors: Vec<TangentVector>,
}

impl Frame {
    pub fn base(&self) -> &Purification {
        &self.base
    }

    pub fn vectors(&self) -> &[TangentVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Images of the frame vectors under left multiplication, e.g. by a
    /// flow propagator; returned as ambient matrices.
    pub fn pushed_by(&self, u: &ComplexMatrix) -> Vec<ComplexMatrix> {
        self.vectors
            .iter()
            .map(|v| u.mul_ref(v.matrix()))
            .collect()
    }

    /// The frame vectors as ambient matrices.
    pub fn images(&self) -> Vec<ComplexMatrix> {
        self.vectors.iter().map(|v| v.matrix().clone()).collect()
    }
}

/// Determinant of the Gram matrix [g_H(v_i, v_j)] of a list of ambient
/// matrices; its square root is the volume distortion of the frame.
pub fn gram_det(metric: &DynamicMetric, vectors: &[ComplexMatrix]) -> Result<f64> {
    let m = vectors.len();
    let mut gram = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let v = metric.ambient_inner(&vectors[i], &vectors[j])?;
            gram[i * m + j] = v;
            gram[j * m + i] = v;
        }
    }
    Ok(det_lu(gram, m))
}

/// Determinant by LU with partial pivoting.
fn det_lu(mut a: Vec<f64>, m: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..m {
        let mut pivot = col;
        for row in (col + 1)..m {
            if a[row * m + col].abs() > a[pivot * m + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * m + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..m {
                a.swap(col * m + j, pivot * m + j);
            }
            det = -det;
        }
        let d = a[col * m + col];
        det *= d;
        for row in (col + 1)..m {
            let factor = a[row * m + col] / d;
            if factor == 0.0 {
                continue;
            }
            for j in col..m {
                a[row * m + j] -= factor * a[col * m + j];
            }
        }
    }
    det
}
