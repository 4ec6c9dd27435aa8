//! Double operator integrals over finite atomic spectral measures.
//!
//! In the joint eigenbasis of a [`SpectralTuple`] the double operator
//! integral of a bounded kernel is entrywise multiplication by the kernel
//! evaluated at pairs of joint eigenvalues — a Schur multiplier. Kernel
//! products therefore compose exactly, which the rest of the crate exploits
//! heavily.
//!
//! Two indices carrying equal joint eigenvalue vectors belong to the same
//! spectral atom, so such pairs are evaluated with the kernel's diagonal
//! convention even when the indices differ.

use crate::matrix::{CMat, ComplexMatrix, MatrixError, C64};
use crate::spectral::SpectralTuple;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DoiError {
    #[error("kernel arity {kernel} does not match tuple arity {tuple}")]
    ArityMismatch { kernel: usize, tuple: usize },
    #[error("matrix dimension {matrix} does not match tuple dimension {tuple}")]
    DimensionMismatch { matrix: usize, tuple: usize },
    #[error("coordinate index {j} out of range 1..={n}")]
    IndexOutOfRange { j: usize, n: usize },
    #[error("mollification needs an odd node count >= 3, got {0}")]
    BadQuadratureNodes(usize),
    #[error("mollification width must be positive, got {0}")]
    BadMollificationWidth(f64),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

type Kernel2n = Arc<dyn Fn(&[f64], &[f64]) -> C64 + Send + Sync>;
type Diagonal = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;

/// Bounded kernel on `R^n x R^n` with an explicit diagonal convention.
#[derive(Clone)]
pub struct ScalarSymbol2n {
    arity: usize,
    off_diagonal: Kernel2n,
    diagonal: Diagonal,
}

impl std::fmt::Debug for ScalarSymbol2n {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarSymbol2n")
            .field("arity", &self.arity)
            .finish()
    }
}

impl ScalarSymbol2n {
    /// Kernel with a constant value on the diagonal.
    pub fn new(
        arity: usize,
        off_diagonal: impl Fn(&[f64], &[f64]) -> C64 + Send + Sync + 'static,
        diagonal_value: C64,
    ) -> Self {
        Self {
            arity,
            off_diagonal: Arc::new(off_diagonal),
            diagonal: Arc::new(move |_| diagonal_value),
        }
    }

    /// Kernel whose diagonal value depends on the base point (indicator
    /// kernels of product sets need this).
    pub fn with_diagonal_fn(
        arity: usize,
        off_diagonal: impl Fn(&[f64], &[f64]) -> C64 + Send + Sync + 'static,
        diagonal: impl Fn(&[f64]) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            arity,
            off_diagonal: Arc::new(off_diagonal),
            diagonal: Arc::new(diagonal),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Constant kernel 1 (the identity multiplier).
    pub fn one(arity: usize) -> Self {
        Self::new(arity, |_, _| C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    }

    /// Diagonal indicator.
    pub fn delta(arity: usize) -> Self {
        Self::new(arity, |_, _| C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    /// Indicator of `||xi - xi~||_2 > radius` (vanishes on a neighbourhood
    /// of the diagonal).
    pub fn radial_cutoff(arity: usize, radius: f64) -> Self {
        Self::new(
            arity,
            move |a: &[f64], b: &[f64]| {
                let dist = euclidean_distance(a, b);
                if dist > radius {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            },
            C64::new(0.0, 0.0),
        )
    }

    /// Evaluates the kernel; equal points take the diagonal convention.
    pub fn eval(&self, a: &[f64], b: &[f64]) -> C64 {
        if a == b {
            (self.diagonal)(a)
        } else {
            (self.off_diagonal)(a, b)
        }
    }

    /// Pointwise product, combining the diagonal conventions.
    pub fn pointwise_product(&self, other: &Self) -> Result<Self, DoiError> {
        if self.arity != other.arity {
            return Err(DoiError::ArityMismatch {
                kernel: other.arity,
                tuple: self.arity,
            });
        }
        let (la, lb) = (self.off_diagonal.clone(), other.off_diagonal.clone());
        let (da, db) = (self.diagonal.clone(), other.diagonal.clone());
        Ok(Self {
            arity: self.arity,
            off_diagonal: Arc::new(move |x: &[f64], y: &[f64]| la(x, y) * lb(x, y)),
            diagonal: Arc::new(move |x: &[f64]| da(x) * db(x)),
        })
    }
}

fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Real function on `R^n` with a declared Lipschitz bound with respect to
/// the `l1` norm.
#[derive(Clone)]
pub struct LipschitzFunction {
    arity: usize,
    declared_lip: f64,
    label: String,
    eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for LipschitzFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LipschitzFunction")
            .field("arity", &self.arity)
            .field("label", &self.label)
            .field("declared_lip", &self.declared_lip)
            .finish()
    }
}

impl LipschitzFunction {
    pub fn new(
        arity: usize,
        label: impl Into<String>,
        declared_lip: f64,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            arity,
            declared_lip,
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn from_arc(
        arity: usize,
        label: impl Into<String>,
        declared_lip: f64,
        eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    ) -> Self {
        Self {
            arity,
            declared_lip,
            label: label.into(),
            eval,
        }
    }

    /// One-variable absolute value.
    pub fn abs() -> Self {
        Self::new(1, "abs", 1.0, |xi: &[f64]| xi[0].abs())
    }

    /// Coordinate function `xi_j` (1-based `j`).
    pub fn coordinate(j: usize, arity: usize) -> Result<Self, DoiError> {
        if j == 0 || j > arity {
            return Err(DoiError::IndexOutOfRange { j, n: arity });
        }
        Ok(Self::new(arity, format!("xi_{j}"), 1.0, move |xi: &[f64]| {
            xi[j - 1]
        }))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn declared_lip(&self) -> f64 {
        self.declared_lip
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        assert_eq!(xi.len(), self.arity, "argument arity mismatch");
        (self.eval)(xi)
    }

    /// Largest sampled quotient `|f(a) - f(b)| / ||a - b||_1` over pairs.
    pub fn sampled_quotient(&self, pairs: &[(Vec<f64>, Vec<f64>)]) -> f64 {
        pairs
            .iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (self.eval(a) - self.eval(b)).abs() / l1_distance(a, b))
            .fold(0.0, f64::max)
    }
}

/// Difference and divided-difference kernels of a Lipschitz function:
/// `psi(a, b) = f(a) - f(b)` and `phi(a, b) = psi(a, b) / ||a - b||_2` off
/// the diagonal, both vanishing on it.
pub fn divided_difference_symbols(f: &LipschitzFunction) -> (ScalarSymbol2n, ScalarSymbol2n) {
    let arity = f.arity();
    let psi_f = f.clone();
    let psi = ScalarSymbol2n::new(
        arity,
        move |a: &[f64], b: &[f64]| C64::new(psi_f.eval(a) - psi_f.eval(b), 0.0),
        C64::new(0.0, 0.0),
    );
    let phi_f = f.clone();
    let phi = ScalarSymbol2n::new(
        arity,
        move |a: &[f64], b: &[f64]| {
            C64::new((phi_f.eval(a) - phi_f.eval(b)) / euclidean_distance(a, b), 0.0)
        },
        C64::new(0.0, 0.0),
    );
    (psi, phi)
}

/// Coordinate variants `psi_j(a, b) = a_j - b_j` and its divided
/// difference (1-based `j`).
pub fn direction_symbols(
    j: usize,
    arity: usize,
) -> Result<(ScalarSymbol2n, ScalarSymbol2n), DoiError> {
    if j == 0 || j > arity {
        return Err(DoiError::IndexOutOfRange { j, n: arity });
    }
    let psi = ScalarSymbol2n::new(
        arity,
        move |a: &[f64], b: &[f64]| C64::new(a[j - 1] - b[j - 1], 0.0),
        C64::new(0.0, 0.0),
    );
    let phi = ScalarSymbol2n::new(
        arity,
        move |a: &[f64], b: &[f64]| {
            C64::new((a[j - 1] - b[j - 1]) / euclidean_distance(a, b), 0.0)
        },
        C64::new(0.0, 0.0),
    );
    Ok((psi, phi))
}

fn check_compat(s: &SpectralTuple, phi: &ScalarSymbol2n, x: &ComplexMatrix) -> Result<(), DoiError> {
    if phi.arity() != s.operators() {
        return Err(DoiError::ArityMismatch {
            kernel: phi.arity(),
            tuple: s.operators(),
        });
    }
    if x.dim() != s.dim() {
        return Err(DoiError::DimensionMismatch {
            matrix: x.dim(),
            tuple: s.dim(),
        });
    }
    Ok(())
}

/// Double operator integral: Schur multiplication by
/// `phi(lambda^(a), lambda^(b))` in the joint eigenbasis.
pub fn doi_apply(
    s: &SpectralTuple,
    phi: &ScalarSymbol2n,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix, DoiError> {
    check_compat(s, phi, x)?;
    let d = s.dim();
    let mut in_basis = s.to_eigenbasis(x).into_dmatrix();
    for a in 0..d {
        for b in 0..d {
            in_basis[(a, b)] *= phi.eval(s.eig(a), s.eig(b));
        }
    }
    Ok(s.from_eigenbasis(&ComplexMatrix::from_dmatrix_unchecked(in_basis)))
}

/// Removes the block-diagonal part relative to the atoms of `s`:
/// `x - I_delta(x)`.
pub fn offdiag_project(s: &SpectralTuple, x: &ComplexMatrix) -> Result<ComplexMatrix, DoiError> {
    let diagonal_part = doi_apply(s, &ScalarSymbol2n::delta(s.operators()), x)?;
    Ok(x - &diagonal_part)
}

/// Pairing `tau(z I_phi(y))`: the integral of `phi` against the finite
/// trace measure attached to `(z, y)`.
pub fn trace_pairing(
    z: &ComplexMatrix,
    phi: &ScalarSymbol2n,
    y: &ComplexMatrix,
    s: &SpectralTuple,
) -> Result<C64, DoiError> {
    if z.dim() != s.dim() {
        return Err(DoiError::DimensionMismatch {
            matrix: z.dim(),
            tuple: s.dim(),
        });
    }
    let applied = doi_apply(s, phi, y)?;
    Ok((z * &applied).trace())
}

/// Snaps a value to the nearest integer when it is within rounding noise,
/// otherwise floors it. Keeps grid-aligned eigenvalues on their bin even
/// when `k/m` is not exactly representable.
pub(crate) fn floor_with_snap(t: f64) -> i64 {
    let nearest = t.round();
    if (t - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest as i64
    } else {
        t.floor() as i64
    }
}

/// Replaces every joint eigenvalue coordinate by the left endpoint of its
/// `1/m` bin, keeping the basis. The moved distance is below `1/m`.
pub fn discretize_measure(s: &SpectralTuple, m: u32) -> SpectralTuple {
    assert!(m >= 1, "resolution must be positive");
    let eigs = s
        .eigs()
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| floor_with_snap(v * m as f64) as f64 / m as f64)
                .collect()
        })
        .collect();
    SpectralTuple::from_parts(s.basis().clone(), eigs)
        .expect("basis was already validated")
}

/// Gaussian mollification `f_k = G_k * f` by tensor composite Simpson on a
/// window of `+/- 8 / sqrt(width)` per axis around the evaluation point.
/// The declared Lipschitz bound carries over (convolution against a
/// probability density).
pub fn mollify_function(
    f: &LipschitzFunction,
    width: f64,
    quad_points: usize,
) -> Result<LipschitzFunction, DoiError> {
    if !(width > 0.0) {
        return Err(DoiError::BadMollificationWidth(width));
    }
    if quad_points < 3 || quad_points % 2 == 0 {
        return Err(DoiError::BadQuadratureNodes(quad_points));
    }
    let arity = f.arity();
    let half_window = 8.0 / width.sqrt();
    let step = 2.0 * half_window / (quad_points - 1) as f64;
    let amplitude = (width / std::f64::consts::PI).sqrt();

    // 1-D nodes and Simpson weights combined with the Gaussian factor.
    let mut offsets = Vec::with_capacity(quad_points);
    let mut weights = Vec::with_capacity(quad_points);
    for i in 0..quad_points {
        let eta = -half_window + i as f64 * step;
        let simpson = if i == 0 || i == quad_points - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        offsets.push(eta);
        weights.push(simpson * step / 3.0 * amplitude * (-width * eta * eta).exp());
    }

    let inner = f.clone();
    let label = format!("mollified({}, width={width})", f.label());
    let declared = f.declared_lip();
    let eval = move |xi: &[f64]| -> f64 {
        let mut shifted = vec![0.0; arity];
        let mut index = vec![0usize; arity];
        let mut total = 0.0;
        loop {
            let mut weight = 1.0;
            for (axis, &i) in index.iter().enumerate() {
                weight *= weights[i];
                shifted[axis] = xi[axis] - offsets[i];
            }
            total += weight * inner.eval(&shifted);
            // advance the multi-index
            let mut axis = 0;
            loop {
                if axis == arity {
                    return total;
                }
                index[axis] += 1;
                if index[axis] < quad_points {
                    break;
                }
                index[axis] = 0;
                axis += 1;
            }
        }
    };
    Ok(LipschitzFunction::new(arity, label, declared, eval))
}

/// Builds the full kernel table `phi(lambda^(a), lambda^(b))` for
/// inspection and tests.
pub fn kernel_table(s: &SpectralTuple, phi: &ScalarSymbol2n) -> Result<ComplexMatrix, DoiError> {
    if phi.arity() != s.operators() {
        return Err(DoiError::ArityMismatch {
            kernel: phi.arity(),
            tuple: s.operators(),
        });
    }
    let d = s.dim();
    let mut table = CMat::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            table[(a, b)] = phi.eval(s.eig(a), s.eig(b));
        }
    }
    Ok(ComplexMatrix::from_dmatrix_unchecked(table))
}

/// Reference value for the Gaussian first absolute moment: the mollified
/// absolute value at zero, `1 / sqrt(width pi)`.
pub fn gaussian_abs_moment(width: f64) -> f64 {
    1.0 / (width * std::f64::consts::PI).sqrt()
}
