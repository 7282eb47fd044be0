use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major storage.
///
/// This is the universal carrier of the crate: bundle points `W`, tangent
/// vectors `X`, density operators and observables are all values of this
/// type. Dimensions stay small (n <= 32), so all kernels are naive
/// O(n^3) loops.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds an `n x n` matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                cols: if n == 0 { 0 } else { data.len() / n },
            });
        }
        let m = Self { n, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// Matrix from real row-major entries (imaginary parts zero).
    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        let data = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(n, data)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Frobenius inner product tr(A^dag B), conjugate-linear in `self`.
    pub fn frob_inner(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Frobenius norm sqrt(tr(A^dag A)).
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Relative Hermiticity defect |A - A^dag| / |A| (0 for the zero matrix).
    pub fn hermitian_defect(&self) -> f64 {
        let norm = self.frob_norm();
        if norm == 0.0 {
            return 0.0;
        }
        (self - &self.adjoint()).frob_norm() / norm
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Hermitian part (A + A^dag)/2.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    /// Anti-Hermitian part (A - A^dag)/2.
    pub fn anti_hermitian_part(&self) -> Self {
        (self - &self.adjoint()).scale_re(0.5)
    }

    pub(crate) fn mul_ref(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

macro_rules! elementwise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, other: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.n, other.n, "elementwise op dimension mismatch");
                ComplexMatrix {
                    n: self.n,
                    data: self
                        .data
                        .iter()
                        .zip(other.data.iter())
                        .map(|(a, b)| a $op b)
                        .collect(),
                }
            }
        }
        impl $trait for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, other: ComplexMatrix) -> ComplexMatrix {
                (&self).$method(&other)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.mul_ref(other)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, other: ComplexMatrix) -> ComplexMatrix {
        self.mul_ref(&other)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

/// Frobenius inner product tr(A^dag B).
pub fn frob_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    a.frob_inner(b)
}

/// Frobenius norm sqrt(tr(A^dag A)).
pub fn frob_norm(a: &ComplexMatrix) -> f64 {
    a.frob_norm()
}
