//! Bundle ingredients for mixed-state geometry: density matrices, their
//! purifications W with tr(WW^dag) = 1, the projection pi(W) = WW^dag, the
//! unitary fibre action W -> Wu, and the canonical section tau(rho) = sqrt(rho).
//!
//! All types are immutable after validation; every invariant is checked on
//! construction with a single tolerance, [`STATE_TOL`].

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, sqrt_psd, ComplexMatrix, EigenDecomposition};

/// Uniform validation tolerance for state invariants.
pub const STATE_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace operator. The
/// `strictly_positive` flag records whether the state is faithful
/// (all eigenvalues >= `STATE_TOL`), i.e. whether it lies in the open
/// cone where the bundle machinery applies.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    min_eigenvalue: f64,
    strictly_positive: bool,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = (&matrix - &matrix.adjoint()).frob_norm();
        if defect > STATE_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let eig = herm_eig(&matrix)?;
        let min_eigenvalue = eig.min_eigenvalue();
        if min_eigenvalue < -STATE_TOL {
            return Err(Error::NotPositiveSemiDefinite {
                min_eigenvalue,
            });
        }
        Ok(Self {
            matrix,
            min_eigenvalue,
            strictly_positive: min_eigenvalue >= STATE_TOL,
        })
    }

    /// For spectrum-preserving transforms (unitary conjugation) where the
    /// invariants carry over from an already validated state.
    pub(crate) fn from_validated(
        matrix: ComplexMatrix,
        min_eigenvalue: f64,
        strictly_positive: bool,
    ) -> Self {
        Self {
            matrix,
            min_eigenvalue,
            strictly_positive,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    /// Purity tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.matrix.frob_inner(&self.matrix).expect("same dim").re
    }
}

/// A point W of the purification sphere tr(WW^dag) = 1. The `invertible`
/// flag marks membership in the total space of the principal bundle
/// (det W != 0), where the fibre action is free.
#[derive(Debug, Clone)]
pub struct Purification {
    matrix: ComplexMatrix,
    sigma_min: f64,
    invertible: bool,
}

impl Purification {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let norm_sq = matrix.frob_norm().powi(2);
        if (norm_sq - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { norm: norm_sq });
        }
        let gram = matrix.adjoint().mul_ref(&matrix).hermitian_part();
        let sigma_min = herm_eig(&gram)?.min_eigenvalue().max(0.0).sqrt();
        Ok(Self {
            matrix,
            sigma_min,
            invertible: sigma_min >= STATE_TOL,
        })
    }

    pub(crate) fn from_parts(matrix: ComplexMatrix, sigma_min: f64, invertible: bool) -> Self {
        Self {
            matrix,
            sigma_min,
            invertible,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible
    }
}

/// Tangent vector to the purification sphere at a base point W: a matrix X
/// with Re tr(W^dag X) = 0.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: Purification,
    matrix: ComplexMatrix,
}

impl TangentVector {
    pub fn new(base: Purification, matrix: ComplexMatrix) -> Result<Self> {
        let residual = base
            .matrix()
            .frob_inner(&matrix)?
            .re
            .abs();
        if residual > 1e-9 * matrix.frob_norm().max(f64::MIN_POSITIVE) {
            return Err(Error::NotTangent { residual });
        }
        Ok(Self { base, matrix })
    }

    /// Attaches without the tangency check, for constructions where
    /// tangency holds identically (gauge directions, horizontal lifts,
    /// pushforwards of tangents).
    pub(crate) fn attach(base: Purification, matrix: ComplexMatrix) -> Self {
        Self { base, matrix }
    }

    pub fn base(&self) -> &Purification {
        &self.base
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Frobenius separation of the two base points; zero when attached at
    /// the same W.
    pub fn base_separation(&self, other: &TangentVector) -> f64 {
        (self.base.matrix() - other.base.matrix()).frob_norm()
    }
}

/// How the invertibility shift H -> H + c*I is chosen on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftPolicy {
    /// Shift by c = 1 + |lambda_min| only when some |eigenvalue| < STATE_TOL.
    Auto,
    /// Shift by exactly the given c (0 demands H already invertible).
    Fixed(f64),
}

/// Hermitian invertible generator of the dynamics, stored with the shift
/// applied and with cached eigendecomposition and inverse powers.
///
/// Shifting changes the metric and purification phases but not the
/// projected evolution: phases cancel in WW^dag.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
    shift: f64,
    eig: EigenDecomposition,
    inv: ComplexMatrix,
    inv2: ComplexMatrix,
}

impl Hamiltonian {
    /// Builds with `ShiftPolicy::Auto`.
    pub fn new(h: ComplexMatrix) -> Result<Self> {
        Self::with_policy(h, ShiftPolicy::Auto)
    }

    pub fn with_policy(h: ComplexMatrix, policy: ShiftPolicy) -> Result<Self> {
        let defect = h.hermitian_defect();
        if defect > STATE_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let eig_raw = herm_eig(&h)?;
        let shift = match policy {
            ShiftPolicy::Auto => {
                if eig_raw.min_abs_eigenvalue() < STATE_TOL {
                    1.0 + eig_raw.min_eigenvalue().abs()
                } else {
                    0.0
                }
            }
            ShiftPolicy::Fixed(c) => c,
        };
        let eig = eig_raw.shifted(shift);
        let min_abs = eig.min_abs_eigenvalue();
        if min_abs < STATE_TOL {
            return Err(Error::SingularHamiltonian {
                min_abs_eigenvalue: min_abs,
            });
        }
        let matrix = if shift == 0.0 {
            h
        } else {
            let id = ComplexMatrix::identity(h.dim());
            h + id.scale_re(shift)
        };
        let inv = eig
            .apply_fn(|l| Complex64::new(1.0 / l, 0.0))
            .hermitian_part();
        let inv2 = eig
            .apply_fn(|l| Complex64::new(1.0 / (l * l), 0.0))
            .hermitian_part();
        Ok(Self {
            matrix,
            shift,
            eig,
            inv,
            inv2,
        })
    }

    /// The effective (shifted) operator.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenvalues of the shifted operator, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        self.eig.eigenvalues()
    }

    /// Eigenbasis of the shifted operator (columns).
    pub fn basis(&self) -> &ComplexMatrix {
        self.eig.eigenvectors()
    }

    pub fn inv(&self) -> &ComplexMatrix {
        &self.inv
    }

    pub fn inv2(&self) -> &ComplexMatrix {
        &self.inv2
    }

    /// Propagator exp(-iHt) from the cached spectrum; exactly the identity
    /// at t = 0.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        if t == 0.0 {
            return ComplexMatrix::identity(self.dim());
        }
        self.eig.apply_fn(|l| Complex64::from_polar(1.0, -l * t))
    }
}

/// The bundle projection pi(W) = WW^dag. Always lands on a valid density;
/// strict positivity of the image is exactly invertibility of W.
pub fn project(w: &Purification) -> DensityMatrix {
    let rho = w.matrix().mul_ref(&w.matrix().adjoint()).hermitian_part();
    DensityMatrix {
        matrix: rho,
        min_eigenvalue: w.sigma_min().powi(2),
        strictly_positive: w.is_invertible(),
    }
}

/// The canonical section tau(rho) = sqrt(rho), the unique PSD square root.
/// Boundary states yield a non-invertible purification.
pub fn section(rho: &DensityMatrix) -> Result<Purification> {
    let root = sqrt_psd(rho.matrix(), STATE_TOL)?;
    let norm_sq = root.frob_norm().powi(2);
    if (norm_sq - 1.0).abs() > STATE_TOL {
        return Err(Error::NotNormalized { norm: norm_sq });
    }
    Ok(Purification::from_parts(
        root,
        rho.min_eigenvalue().max(0.0).sqrt(),
        rho.is_strictly_positive(),
    ))
}

/// As [`section`], but demands membership in the invertible total space.
pub fn section_strict(rho: &DensityMatrix) -> Result<Purification> {
    if !rho.is_strictly_positive() {
        return Err(Error::NotStrictlyPositive {
            min_eigenvalue: rho.min_eigenvalue(),
        });
    }
    section(rho)
}

/// Right fibre action W -> Wu for unitary u; leaves the projection fixed.
pub fn fibre_act(w: &Purification, u: &ComplexMatrix) -> Result<Purification> {
    if u.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: u.dim(),
        });
    }
    let defect = (&u.adjoint().mul_ref(u) - &ComplexMatrix::identity(u.dim())).frob_norm();
    if defect > STATE_TOL {
        return Err(Error::NotUnitary { defect });
    }
    // Singular values are unitarily invariant, so the flags carry over.
    Ok(Purification::from_parts(
        w.matrix().mul_ref(u),
        w.sigma_min(),
        w.is_invertible(),
    ))
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Seeded random density: GG^dag normalized by its trace; the strictly
/// positive variant mixes in 1e-3 * I before normalizing.
pub fn random_density(n: usize, seed: u64, strictly_positive: bool) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(n, &mut rng);
    let mut rho = g.mul_ref(&g.adjoint());
    if strictly_positive {
        rho = rho + ComplexMatrix::identity(n).scale_re(1e-3);
    }
    let rho = rho.scale_re(1.0 / rho.trace().re).hermitian_part();
    DensityMatrix::new(rho).expect("random density construction is valid")
}

/// Seeded random point of the purification sphere: Gaussian matrix scaled
/// to unit Frobenius norm.
pub fn random_purification(n: usize, seed: u64) -> Purification {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(n, &mut rng);
    Purification::new(g.scale_re(1.0 / g.frob_norm())).expect("normalized by construction")
}

/// Seeded random tangent at W: ambient Gaussian minus its radial component,
/// X = G - Re tr(W^dag G) * W.
pub fn random_tangent(w: &Purification, seed: u64) -> TangentVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(w.dim(), &mut rng);
    let radial = w.matrix().frob_inner(&g).expect("same dim").re;
    let x = g - w.matrix().scale_re(radial);
    TangentVector::new(w.clone(), x).expect("tangent by construction")
}

/// Seeded random Hermitian matrix (G + G^dag)/2.
pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gaussian_matrix(n, &mut rng).hermitian_part()
}

/// Seeded random unitary exp(iA) for random Hermitian A.
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let a = random_hermitian(n, seed);
    crate::numerics::herm_fn(&a, |l| Complex64::from_polar(1.0, l)).expect("A is Hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn project_scaled_identity() {
        let w = Purification::new(ComplexMatrix::identity(2).scale_re(FRAC_1_SQRT_2)).unwrap();
        let rho = project(&w);
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert!(rho.is_strictly_positive());
    }

    #[test]
    fn project_off_diagonal_purification() {
        let w = Purification::new(
            ComplexMatrix::from_real(2, &[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap(),
        )
        .unwrap();
        let rho = project(&w);
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn project_has_unit_trace() {
        for seed in 0..5 {
            let w = random_purification(4, seed);
            let rho = project(&w);
            assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn section_diagonal() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[0.25, 0.75])).unwrap();
        let tau = section(&rho).unwrap();
        assert_abs_diff_eq!(tau.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(tau.matrix()[(1, 1)].re, 0.8660254, epsilon = 1e-7);
    }

    #[test]
    fn section_maximally_mixed() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[0.5, 0.5])).unwrap();
        let tau = section(&rho).unwrap();
        let expected = ComplexMatrix::identity(2).scale_re(FRAC_1_SQRT_2);
        assert!((tau.matrix() - &expected).frob_norm() < 1e-12);
    }

    #[test]
    fn section_round_trip() {
        for seed in 0..5 {
            let rho = random_density(5, seed, true);
            let tau = section(&rho).unwrap();
            let back = project(&tau);
            assert!((back.matrix() - rho.matrix()).frob_norm() <= 1e-10);
        }
    }

    #[test]
    fn section_strict_rejects_boundary() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        assert!(!rho.is_strictly_positive());
        assert!(matches!(
            section_strict(&rho),
            Err(Error::NotStrictlyPositive { .. })
        ));
        // the plain section still works on the boundary
        let tau = section(&rho).unwrap();
        assert!(!tau.is_invertible());
    }

    #[test]
    fn fibre_action_global_phase() {
        let w = random_purification(3, 9);
        let phase = ComplexMatrix::identity(3).scale(Complex64::from_polar(1.0, 0.7));
        let wu = fibre_act(&w, &phase).unwrap();
        let d = (project(&wu).matrix() - project(&w).matrix()).frob_norm();
        assert!(d <= 1e-12);
    }

    #[test]
    fn fibre_action_column_swap() {
        let a = 0.6_f64;
        let b = (1.0 - a * a).sqrt();
        let w = Purification::new(ComplexMatrix::diag(&[a, b])).unwrap();
        let pauli_x = ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let wu = fibre_act(&w, &pauli_x).unwrap();
        assert_abs_diff_eq!(wu.matrix()[(0, 1)].re, a, epsilon = 1e-14);
        assert_abs_diff_eq!(wu.matrix()[(1, 0)].re, b, epsilon = 1e-14);
        let d = (project(&wu).matrix() - project(&w).matrix()).frob_norm();
        assert!(d <= 1e-13);
    }

    #[test]
    fn fibre_action_random_unitary() {
        for seed in 0..5 {
            let w = random_purification(4, seed);
            let u = random_unitary(4, 100 + seed);
            let wu = fibre_act(&w, &u).unwrap();
            let d = (project(&wu).matrix() - project(&w).matrix()).frob_norm();
            assert!(d <= 1e-12, "projection moved by {d}");
            assert_abs_diff_eq!(wu.matrix().frob_norm().powi(2), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn fibre_action_rejects_non_unitary() {
        let w = random_purification(2, 1);
        let not_u = ComplexMatrix::diag(&[1.0, 2.0]);
        assert!(matches!(
            fibre_act(&w, &not_u),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn free_action_on_invertible_points() {
        // a unitary noticeably away from the identity moves every
        // invertible W by a noticeable amount
        for seed in 0..5 {
            let w = random_purification(3, seed);
            assert!(w.is_invertible());
            let u = random_unitary(3, 50 + seed);
            let u_dist = (&u - &ComplexMatrix::identity(3)).frob_norm();
            assert!(u_dist > 1e-8);
            let moved = (fibre_act(&w, &u).unwrap().matrix() - w.matrix()).frob_norm();
            assert!(moved > 1e-12);
            assert!(moved >= 0.5 * w.sigma_min() * u_dist);
        }
    }

    #[test]
    fn random_generators_are_deterministic() {
        let a = random_density(4, 7, true);
        let b = random_density(4, 7, true);
        assert_eq!(a.matrix().entries(), b.matrix().entries());
        let w1 = random_purification(3, 5);
        let w2 = random_purification(3, 5);
        assert_eq!(w1.matrix().entries(), w2.matrix().entries());
    }

    #[test]
    fn random_density_strictly_positive() {
        for seed in 0..5 {
            let rho = random_density(4, seed, true);
            assert!(rho.min_eigenvalue() > 0.0);
            assert!(rho.is_strictly_positive());
        }
    }

    #[test]
    fn random_tangent_is_tangent() {
        for seed in 0..5 {
            let w = random_purification(4, seed);
            let x = random_tangent(&w, 1000 + seed);
            let residual = w.matrix().frob_inner(x.matrix()).unwrap().re.abs();
            assert!(residual <= 1e-12 * x.matrix().frob_norm());
        }
    }

    #[test]
    fn density_validation_rejects_bad_trace() {
        let m = ComplexMatrix::diag(&[0.6, 0.6]);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn density_validation_rejects_negative() {
        let m = ComplexMatrix::diag(&[1.5, -0.5]);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(Error::NotPositiveSemiDefinite { .. })
        ));
    }

    #[test]
    fn hamiltonian_auto_shift_only_when_singular() {
        let h = Hamiltonian::new(ComplexMatrix::diag(&[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(h.shift(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.eigenvalues()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.eigenvalues()[1], 2.0, epsilon = 1e-12);

        let h2 = Hamiltonian::new(ComplexMatrix::diag(&[-2.0, 1.0])).unwrap();
        assert_eq!(h2.shift(), 0.0);
    }

    #[test]
    fn hamiltonian_fixed_shift_validation() {
        assert!(matches!(
            Hamiltonian::with_policy(ComplexMatrix::diag(&[0.0, 1.0]), ShiftPolicy::Fixed(0.0)),
            Err(Error::SingularHamiltonian { .. })
        ));
        let h = Hamiltonian::with_policy(ComplexMatrix::diag(&[0.0, 1.0]), ShiftPolicy::Fixed(2.0))
            .unwrap();
        assert_abs_diff_eq!(h.eigenvalues()[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn hamiltonian_inverse_caches() {
        let h = Hamiltonian::new(random_hermitian(4, 3) + ComplexMatrix::identity(4).scale_re(3.0))
            .unwrap();
        let id = ComplexMatrix::identity(4);
        assert!((h.matrix().mul_ref(h.inv()) - id.clone()).frob_norm() < 1e-11);
        let h2inv2 = h.matrix().mul_ref(h.matrix()).mul_ref(h.inv2());
        assert!((h2inv2 - id).frob_norm() < 1e-10);
    }

    #[test]
    fn tangent_rejects_radial() {
        let w = random_purification(3, 2);
        let radial = w.matrix().clone();
        assert!(matches!(
            TangentVector::new(w, radial),
            Err(Error::NotTangent { .. })
        ));
    }
}
