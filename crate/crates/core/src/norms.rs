//! Schatten norms and rearrangement functionals of finite matrices.
//!
//! The decreasing rearrangement of a `d x d` matrix is realized as the step
//! function `t -> s_{floor(t)+1}` on `[0, d)` (zero beyond), where `s_1 >=
//! ... >= s_d` are the singular values. All functionals below are derived
//! from that convention.

use crate::matrix::{ComplexMatrix, MatrixError, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NormError {
    #[error("Schatten order must satisfy p >= 1, got {0}")]
    InvalidOrder(f64),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Schatten exponent `p` in `[1, inf]` together with its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOrder {
    p: f64,
}

impl NormOrder {
    pub fn new(p: f64) -> Result<Self, NormError> {
        if p.is_nan() || p < 1.0 {
            return Err(NormError::InvalidOrder(p));
        }
        Ok(Self { p })
    }

    pub fn infinity() -> Self {
        Self { p: f64::INFINITY }
    }

    pub fn value(&self) -> f64 {
        self.p
    }

    pub fn is_infinite(&self) -> bool {
        self.p.is_infinite()
    }

    /// Conjugate exponent `p'` with `1/p + 1/p' = 1`; `1 <-> inf`.
    pub fn conjugate(&self) -> Self {
        if self.p.is_infinite() {
            Self { p: 1.0 }
        } else if self.p == 1.0 {
            Self::infinity()
        } else {
            Self {
                p: self.p / (self.p - 1.0),
            }
        }
    }
}

/// Nonincreasing, nonnegative singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularProfile {
    values: Vec<f64>,
}

/// Bisection width for locating the critical point of a ratio segment.
const SEGMENT_BISECTION_TOL: f64 = 1e-10;

impl SingularProfile {
    pub fn new(mut values: Vec<f64>) -> Self {
        // SVD output carries rounding noise; sort defensively and clamp
        // negative dust to zero so the invariants hold exactly.
        values.sort_by(|a, b| b.total_cmp(a));
        for v in &mut values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Self { values }
    }

    pub fn of_matrix(x: &ComplexMatrix) -> Self {
        let svd = x.as_dmatrix().clone().svd(false, false);
        Self::new(svd.singular_values.iter().copied().collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&s| s == 0.0)
    }

    /// `(sum_i s_i^p)^(1/p)`; the largest singular value for `p = inf`.
    pub fn schatten(&self, p: NormOrder) -> f64 {
        let top = self.values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0.0;
        }
        if p.is_infinite() {
            return top;
        }
        let pv = p.value();
        if pv == 1.0 {
            return self.values.iter().sum();
        }
        if pv == 2.0 {
            return self.values.iter().map(|s| s * s).sum::<f64>().sqrt();
        }
        // Scale by the top singular value so large p cannot overflow.
        let sum: f64 = self.values.iter().map(|s| (s / top).powf(pv)).sum();
        top * sum.powf(1.0 / pv)
    }

    /// `sup_t t mu_t = max_k k s_k` under the step convention.
    pub fn weak_l1(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, s)| (i + 1) as f64 * s)
            .fold(0.0, f64::max)
    }

    /// `int_0^t mu_s ds` for the step rearrangement (affine between integers).
    pub fn partial_integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let d = self.values.len();
        let whole = (t.floor() as usize).min(d);
        let mut acc: f64 = self.values[..whole].iter().sum();
        if whole < d && (t - whole as f64) > 0.0 {
            acc += (t - whole as f64) * self.values[whole];
        }
        acc
    }

    /// `sup_{t>0} (int_0^t mu) / log(1+t)`.
    ///
    /// On each segment `[k, k+1)` the numerator is affine, so the ratio has
    /// at most one interior critical point; it is bracketed by bisection and
    /// the global value is the maximum over all segment maxima. Beyond
    /// `t = d` the numerator is constant and the ratio decreases, so the
    /// right endpoint of the last segment covers that tail.
    pub fn m1_infinity(&self) -> f64 {
        let d = self.values.len();
        if d == 0 || self.is_zero() {
            return 0.0;
        }
        let ratio = |t: f64| -> f64 {
            if t <= 0.0 {
                // limit t -> 0+ equals s_1
                self.values[0]
            } else {
                self.partial_integral(t) / (1.0 + t).ln()
            }
        };
        let mut best = 0.0f64;
        let mut prefix = 0.0f64;
        for k in 0..d {
            let slope = self.values[k];
            let left = k as f64;
            let right = (k + 1) as f64;
            best = best.max(ratio(left)).max(ratio(right));
            if slope > 0.0 {
                // Critical points of (prefix + slope (t-k)) / log(1+t) solve
                // slope (1+t) log(1+t) = prefix + slope (t-k); the left side
                // minus the right is nondecreasing in t, so a sign change on
                // the segment brackets a unique root.
                let margin = |t: f64| {
                    slope * (1.0 + t) * (1.0 + t).ln() - (prefix + slope * (t - left))
                };
                let (mut lo, mut hi) = (left, right);
                if margin(lo) < 0.0 && margin(hi) > 0.0 {
                    while hi - lo > SEGMENT_BISECTION_TOL {
                        let mid = 0.5 * (lo + hi);
                        if margin(mid) < 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    best = best.max(ratio(0.5 * (lo + hi)));
                }
            }
            prefix += slope;
        }
        best
    }
}

/// Schatten `p`-norm of a matrix.
pub fn schatten_norm(x: &ComplexMatrix, p: NormOrder) -> f64 {
    SingularProfile::of_matrix(x).schatten(p)
}

/// Singular profile plus the weak-`L1` and `M_{1,inf}` functionals.
pub fn rearrangement_norms(x: &ComplexMatrix) -> (SingularProfile, f64, f64) {
    let profile = SingularProfile::of_matrix(x);
    let weak = profile.weak_l1();
    let m1inf = profile.m1_infinity();
    (profile, weak, m1inf)
}

/// Samples `p -> (p - 1) ||x||_p` along a grid of exponents.
///
/// For a finite matrix `||x||_p -> ||x||_1` as `p -> 1`, so the sampled
/// functional tends to zero; the infinite-dimensional equivalence this
/// functional mirrors is displayed for illustration only.
pub fn zeta_profile(x: &ComplexMatrix, p_grid: &[f64]) -> Result<Vec<(f64, f64)>, NormError> {
    let profile = SingularProfile::of_matrix(x);
    let mut out = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        if p <= 1.0 {
            return Err(NormError::InvalidOrder(p));
        }
        let order = NormOrder::new(p)?;
        out.push((p, (p - 1.0) * profile.schatten(order)));
    }
    Ok(out)
}

/// `tau(x y)`.
pub fn trace_product(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<C64, MatrixError> {
    if x.dim() != y.dim() {
        return Err(MatrixError::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok((x * y).trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;

    fn profile(values: &[f64]) -> SingularProfile {
        SingularProfile::new(values.to_vec())
    }

    #[test]
    fn conjugate_orders() {
        let p = NormOrder::new(4.0).unwrap();
        assert!((p.conjugate().value() - 4.0 / 3.0).abs() < 1e-15);
        assert!(NormOrder::new(1.0).unwrap().conjugate().is_infinite());
        assert_eq!(NormOrder::infinity().conjugate().value(), 1.0);
        assert!(NormOrder::new(0.5).is_err());
    }

    #[test]
    fn nilpotent_has_unit_norm_for_every_p() {
        let x = ComplexMatrix::from_fn(2, |r, c| {
            if r == 0 && c == 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .unwrap();
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert!((schatten_norm(&x, NormOrder::new(p).unwrap()) - 1.0).abs() < 1e-12);
        }
        assert!((schatten_norm(&x, NormOrder::infinity()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_hilbert_schmidt_norm() {
        let x = ComplexMatrix::identity(3);
        let got = schatten_norm(&x, NormOrder::new(2.0).unwrap());
        assert!((got - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn frobenius_matches_trace_oracle() {
        // || x ||_2^2 = trace(x* x), evaluated without the SVD path.
        let x = ComplexMatrix::from_fn(5, |r, c| {
            C64::new(
                ((3 * r + c) % 7) as f64 * 0.31 - 1.0,
                ((r + 2 * c) % 5) as f64 * 0.17 - 0.3,
            )
        })
        .unwrap();
        let direct = schatten_norm(&x, NormOrder::new(2.0).unwrap());
        let oracle = (&x.adjoint() * &x).trace().re.sqrt();
        assert!((direct - oracle).abs() <= 1e-12 * oracle.max(1.0));
    }

    #[test]
    fn weak_norm_examples() {
        assert!((profile(&[1.0]).weak_l1() - 1.0).abs() < 1e-15);
        assert!((profile(&[1.0, 1.0]).weak_l1() - 2.0).abs() < 1e-15);
        assert!((profile(&[4.0, 1.0]).weak_l1() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn m1_infinity_frozen_values() {
        // Rank one, s = (1): the per-segment maximization peaks at t = 1.
        let got = profile(&[1.0]).m1_infinity();
        assert!((got - 1.0 / 2f64.ln()).abs() < 1e-10, "got {got}");
        // s = (1, 1): maximum at t = 2.
        let got = profile(&[1.0, 1.0]).m1_infinity();
        assert!((got - 2.0 / 3f64.ln()).abs() < 1e-10, "got {got}");
        // s = (4, 1): maximum at the segment boundary t = 1.
        let got = profile(&[4.0, 1.0]).m1_infinity();
        assert!((got - 4.0 / 2f64.ln()).abs() < 1e-10, "got {got}");
    }

    #[test]
    fn zeta_profile_identity_and_zero() {
        let x = ComplexMatrix::identity(2);
        let rows = zeta_profile(&x, &[1.01]).unwrap();
        let expected = 0.01 * 2f64.powf(1.0 / 1.01);
        assert!((rows[0].1 - expected).abs() < 1e-12);
        assert!((rows[0].1 - 0.01986).abs() < 5e-5);

        let zero = ComplexMatrix::zeros(3);
        for (_, v) in zeta_profile(&zero, &[1.5, 1.1, 1.01]).unwrap() {
            assert_eq!(v, 0.0);
        }
        assert!(zeta_profile(&x, &[0.9]).is_err());
    }

    #[test]
    fn zeta_profile_monotone_near_one() {
        let x = ComplexMatrix::diagonal(&[2.0, 1.0, 0.5]);
        let rows = zeta_profile(&x, &[1.1, 1.05, 1.01, 1.001]).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
    }

    #[test]
    fn zero_matrix_norms() {
        let (profile, weak, m1inf) = rearrangement_norms(&ComplexMatrix::zeros(4));
        assert!(profile.is_zero());
        assert_eq!(weak, 0.0);
        assert_eq!(m1inf, 0.0);
    }
}
