//! Dense complex matrices with the invariants the rest of the crate relies
//! on: square shape, finite entries, and (for [`HermitianMatrix`]) a checked
//! self-adjointness bound.

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Dense dynamic complex matrix (nalgebra storage).
pub type CMat = DMatrix<C64>;

/// Relative tolerance for the Hermitian deviation check.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must have positive dimension")]
    Empty,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: CMat,
}

impl ComplexMatrix {
    pub fn new(data: CMat) -> Result<Self, MatrixError> {
        if data.nrows() != data.ncols() {
            return Err(MatrixError::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        if data.nrows() == 0 {
            return Err(MatrixError::Empty);
        }
        for row in 0..data.nrows() {
            for col in 0..data.ncols() {
                let v = data[(row, col)];
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(MatrixError::NonFinite { row, col });
                }
            }
        }
        Ok(Self { data })
    }

    /// Wraps a matrix produced internally from already-validated inputs.
    pub(crate) fn from_dmatrix_unchecked(data: CMat) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: CMat::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: CMat::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Result<Self, MatrixError> {
        Self::new(CMat::from_fn(dim, dim, f))
    }

    /// Real diagonal matrix.
    pub fn diagonal(entries: &[f64]) -> Self {
        let d = entries.len();
        Self {
            data: CMat::from_fn(d, d, |r, c| {
                if r == c {
                    C64::new(entries[r], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_dmatrix(&self) -> &CMat {
        &self.data
    }

    pub fn into_dmatrix(self) -> CMat {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            data: self.data.map(|v| v * c),
        }
    }

    pub fn trace(&self) -> C64 {
        let mut t = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            t += self.data[(i, i)];
        }
        t
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn commutator(a: &Self, b: &Self) -> Result<Self, MatrixError> {
        if a.dim() != b.dim() {
            return Err(MatrixError::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        Ok(Self {
            data: &a.data * &b.data - &b.data * &a.data,
        })
    }

    /// Deviation from self-adjointness in the max-entry norm.
    pub fn hermitian_deviation(&self) -> f64 {
        let adj = self.data.adjoint();
        (&self.data - adj).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Deviation of `self` from being unitary, `max |U*U - I|`.
    pub fn unitary_deviation(&self) -> f64 {
        let d = self.dim();
        let gram = self.data.adjoint() * &self.data;
        let mut dev: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let expected = if r == c { 1.0 } else { 0.0 };
                dev = dev.max((gram[(r, c)] - C64::new(expected, 0.0)).norm());
            }
        }
        dev
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

/// Complex matrix whose deviation from self-adjointness passed the
/// `HERMITIAN_TOL * (1 + max_abs)` gate at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, MatrixError> {
        let deviation = matrix.hermitian_deviation();
        let tolerance = HERMITIAN_TOL * (1.0 + matrix.max_abs());
        if deviation > tolerance {
            return Err(MatrixError::NotHermitian {
                deviation,
                tolerance,
            });
        }
        Ok(Self { inner: matrix })
    }

    /// Replaces the matrix by its Hermitian part `(M + M*)/2`. Useful to
    /// absorb rounding drift after long products of unitaries.
    pub fn symmetrize(matrix: &ComplexMatrix) -> Self {
        let adj = matrix.adjoint();
        let sym = (matrix + &adj).scale(C64::new(0.5, 0.0));
        Self { inner: sym }
    }

    pub fn from_real_diagonal(entries: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::diagonal(entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_square() {
        let m = CMat::zeros(2, 3);
        assert!(matches!(
            ComplexMatrix::new(m),
            Err(MatrixError::NotSquare { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::new(m),
            Err(MatrixError::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn hermitian_gate() {
        let ok = ComplexMatrix::from_fn(2, |r, c| {
            if r == c {
                C64::new(1.0, 0.0)
            } else if r < c {
                C64::new(0.5, 0.25)
            } else {
                C64::new(0.5, -0.25)
            }
        })
        .unwrap();
        assert!(HermitianMatrix::new(ok).is_ok());

        let bad = ComplexMatrix::from_fn(2, |r, c| C64::new((r + 2 * c) as f64, 0.0)).unwrap();
        assert!(matches!(
            HermitianMatrix::new(bad),
            Err(MatrixError::NotHermitian { .. })
        ));
    }

    #[test]
    fn commutator_of_pauli_matrices() {
        let sx = ComplexMatrix::from_fn(2, |r, c| {
            if r != c {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let sz = ComplexMatrix::diagonal(&[1.0, -1.0]);
        let comm = ComplexMatrix::commutator(&sx, &sz).unwrap();
        assert!((comm.max_abs() - 2.0).abs() < 1e-15);
    }
}
