//! Explicit multiplier symbols on `R^{n+1}` with independent oracles.
//!
//! The closed forms below are built from the scalar sign profile of the
//! Hilbert symbol, an `l1/l2` cone profile, and the Riesz symbol. Each
//! closed form ships with a companion computed by a genuinely different
//! route (exact sign integration, sign-restricted kernel sums, adaptive
//! quadrature of the dilation integral) so the two can be cross-checked on
//! random points.
//!
//! Conventions: `sign(0) = 0`; values on the measure-zero branch
//! boundaries (`|mu| = ||xi||_1`, `xi_1 = 0`) take the closure of the
//! smooth-region formula, and identities are only asserted off those null
//! sets.

use crate::matrix::C64;
use crate::quad::{adaptive_simpson, composite_simpson};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymbolError {
    #[error("coordinate index {j} out of range 1..={n}")]
    IndexOutOfRange { j: usize, n: usize },
    #[error("{label}: {flag} flag violated at {point:?}: deviation {deviation:.3e}")]
    FlagViolation {
        label: String,
        flag: &'static str,
        point: Vec<f64>,
        deviation: f64,
    },
}

/// `sign` with the `sign(0) = 0` convention.
pub fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn l1(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v.abs()).sum()
}

fn l2(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Hilbert symbol `i sign(xi_1)`.
pub fn eval_hilbert(xi: &[f64]) -> C64 {
    C64::new(0.0, sign0(xi[0]))
}

/// Riesz symbol `i xi_j / ||xi||_2` (1-based `j`), zero at the origin.
pub fn eval_riesz(j: usize, xi: &[f64]) -> C64 {
    let norm = l2(xi);
    if norm == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::new(0.0, xi[j - 1] / norm)
}

/// `i mu / ||xi||_1` inside the cone `|mu| <= ||xi||_1`, `i sign(mu)`
/// outside.
pub fn eval_k(xi: &[f64], mu: f64) -> C64 {
    let norm = l1(xi);
    if norm > 0.0 && mu.abs() <= norm {
        C64::new(0.0, mu / norm)
    } else {
        C64::new(0.0, sign0(mu))
    }
}

/// Exact piecewise value of `(1/2) int_{-1}^{1} sign(t sigma + mu) dt`,
/// obtained by locating the single sign-change root.
fn half_sign_integral(sigma: f64, mu: f64) -> f64 {
    if sigma == 0.0 {
        return sign0(mu);
    }
    let root = -mu / sigma;
    let clamped = root.clamp(-1.0, 1.0);
    // sign(t sigma + mu) is -sign(sigma) left of the root, +sign(sigma)
    // right of it.
    0.5 * sign0(sigma) * ((1.0 - clamped) - (clamped + 1.0))
}

/// Half-plane weight `(sign(z) + 1) / 2`, taking the value 1/2 on the wall.
fn half_indicator(z: f64) -> f64 {
    0.5 * (sign0(z) + 1.0)
}

fn sign_patterns(n: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..(1usize << n)).map(move |mask| {
        (0..n)
            .map(|j| if mask & (1 << j) == 0 { 1.0 } else { -1.0 })
            .collect()
    })
}

/// Oracle for [`eval_k`]: sums sign-restricted kernels whose radial part is
/// integrated exactly as a piecewise sign integral.
pub fn eval_k_quadrature(xi: &[f64], mu: f64) -> C64 {
    let n = xi.len();
    let mut total = 0.0;
    for eps in sign_patterns(n) {
        let weight: f64 = xi
            .iter()
            .zip(&eps)
            .map(|(x, e)| half_indicator(e * x))
            .product();
        if weight == 0.0 {
            continue;
        }
        let sigma: f64 = xi.iter().zip(&eps).map(|(x, e)| e * x).sum();
        total += weight * half_sign_integral(sigma, mu);
    }
    C64::new(0.0, total)
}

/// Second oracle for [`eval_k`]: sums the closed sign-restricted kernels
/// directly (the restriction forces the flipped coordinate sum to equal
/// `||xi||_1`).
pub fn eval_k_eps_sum(xi: &[f64], mu: f64) -> C64 {
    let n = xi.len();
    let norm = l1(xi);
    let mut total = 0.0;
    for eps in sign_patterns(n) {
        if xi.iter().zip(&eps).any(|(x, e)| e * x < 0.0) {
            continue;
        }
        let zeros = xi.iter().filter(|x| **x == 0.0).count();
        let factor = 0.5f64.powi(zeros as i32);
        let value = if norm > 0.0 && mu.abs() <= norm {
            mu / norm
        } else {
            sign0(mu)
        };
        total += factor * value;
    }
    C64::new(0.0, total)
}

/// `i ||xi||_1 / ||xi||_2` inside the open cone `|mu| < ||xi||_1`, zero
/// outside; the wall takes the first-branch value.
pub fn eval_r(xi: &[f64], mu: f64) -> C64 {
    let norm1 = l1(xi);
    if norm1 == 0.0 {
        return C64::new(0.0, 0.0);
    }
    if mu.abs() <= norm1 {
        C64::new(0.0, norm1 / l2(xi))
    } else {
        C64::new(0.0, 0.0)
    }
}

/// Oracle for [`eval_r`]: the sum of sign-restricted products of half-plane
/// weights. Agrees with the closed form off the null sets `xi_j = 0` and
/// `|mu| = ||xi||_1`.
pub fn eval_r_product(xi: &[f64], mu: f64) -> C64 {
    let n = xi.len();
    let norm2 = l2(xi);
    if norm2 == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let mut total = 0.0;
    for eps in sign_patterns(n) {
        let weight: f64 = xi
            .iter()
            .zip(&eps)
            .map(|(x, e)| half_indicator(e * x))
            .product();
        if weight == 0.0 {
            continue;
        }
        let dot: f64 = xi.iter().zip(&eps).map(|(x, e)| e * x).sum();
        let bracket = half_indicator(mu) * half_indicator(dot - mu)
            + half_indicator(-mu) * half_indicator(dot + mu);
        total += weight * bracket * dot / norm2;
    }
    C64::new(0.0, total)
}

/// Directional symbol `i K R r_j` (1-based `j`). Equals
/// `(mu / ||xi||_2)(xi_j / ||xi||_2)` inside the open cone
/// `|mu| < ||xi||_1` and vanishes outside the closed cone.
pub fn eval_m1j(j: usize, xi: &[f64], mu: f64) -> C64 {
    C64::new(0.0, 1.0) * eval_k(xi, mu) * eval_r(xi, mu) * eval_riesz(j, xi)
}

const BUMP_LO: f64 = 0.5;
const BUMP_HI: f64 = 0.75;
const BUMP_CELLS: usize = 10_000;

/// Smooth density on `[1/2, 3/4]` with unit mass, plus a tabulated
/// antiderivative with monotone cubic interpolation.
#[derive(Debug, Clone)]
pub struct BumpProfile {
    normalization: f64,
    step: f64,
    /// `S` at the table nodes; strictly scaled so the last entry is 1.
    cumulative: Vec<f64>,
    /// Monotone (Fritsch-Carlson limited) endpoint slopes for the table.
    slopes: Vec<f64>,
}

fn bump_raw(t: f64) -> f64 {
    if t <= BUMP_LO || t >= BUMP_HI {
        return 0.0;
    }
    (-1.0 / ((t - BUMP_LO) * (BUMP_HI - t))).exp()
}

/// Builds the standard bump `s(t) = c exp(-1/((t - 1/2)(3/4 - t)))` with
/// `c` fixed so the total mass over `[0, 1]` is one.
pub fn make_bump() -> BumpProfile {
    let step = (BUMP_HI - BUMP_LO) / BUMP_CELLS as f64;
    let mut cumulative = Vec::with_capacity(BUMP_CELLS + 1);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for cell in 0..BUMP_CELLS {
        let a = BUMP_LO + cell as f64 * step;
        acc += composite_simpson(bump_raw, a, a + step, 5);
        cumulative.push(acc);
    }
    let total = acc;
    let normalization = 1.0 / total;
    for v in &mut cumulative {
        *v /= total;
    }
    *cumulative.last_mut().unwrap() = 1.0;

    // Fritsch-Carlson slopes: harmonic mean of adjacent secants keeps the
    // interpolant monotone for monotone data.
    let m = cumulative.len();
    let secant = |i: usize| (cumulative[i + 1] - cumulative[i]) / step;
    let mut slopes = vec![0.0; m];
    slopes[0] = secant(0);
    slopes[m - 1] = secant(m - 2);
    for i in 1..m - 1 {
        let (a, b) = (secant(i - 1), secant(i));
        slopes[i] = if a * b > 0.0 { 2.0 * a * b / (a + b) } else { 0.0 };
    }

    BumpProfile {
        normalization,
        step,
        cumulative,
        slopes,
    }
}

static SHARED_BUMP: OnceLock<Arc<BumpProfile>> = OnceLock::new();

impl BumpProfile {
    /// Process-wide cached instance.
    pub fn shared() -> Arc<BumpProfile> {
        SHARED_BUMP.get_or_init(|| Arc::new(make_bump())).clone()
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Density `s(t)`.
    pub fn density(&self, t: f64) -> f64 {
        self.normalization * bump_raw(t)
    }

    /// Antiderivative `S(t) = int_0^t s`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        if t <= BUMP_LO {
            return 0.0;
        }
        if t >= BUMP_HI {
            return 1.0;
        }
        let pos = (t - BUMP_LO) / self.step;
        let cell = (pos.floor() as usize).min(self.cumulative.len() - 2);
        let u = pos - cell as f64;
        let (y0, y1) = (self.cumulative[cell], self.cumulative[cell + 1]);
        let (m0, m1) = (self.slopes[cell] * self.step, self.slopes[cell + 1] * self.step);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
    }

    pub fn support(&self) -> (f64, f64) {
        (BUMP_LO, BUMP_HI)
    }
}

/// Smooth even homogeneous directional symbol. By region:
/// zero when `||xi||_1 <= |mu| / 2`, the divided-difference product
/// `mu xi_j / ||xi||_2^2` when `|mu| <= ||xi||_1`, and the bump
/// antiderivative of the cone ratio in between.
pub fn eval_mj(j: usize, xi: &[f64], mu: f64, bump: &BumpProfile) -> C64 {
    let norm1 = l1(xi);
    assert!(
        norm1 != 0.0 || mu != 0.0,
        "smooth directional symbol is undefined at the origin"
    );
    if norm1 == 0.0 {
        return C64::new(0.0, 0.0);
    }
    if mu == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let ratio = norm1 / mu.abs();
    let factor = if ratio >= BUMP_HI {
        1.0
    } else if ratio <= BUMP_LO {
        return C64::new(0.0, 0.0);
    } else {
        bump.antiderivative(ratio)
    };
    let norm2sq = xi.iter().map(|v| v * v).sum::<f64>();
    // Grouping the divided-difference quotient first keeps the value exactly
    // scale-invariant whenever the products scale exactly.
    C64::new(factor * ((mu * xi[j - 1]) / norm2sq), 0.0)
}

/// Oracle for [`eval_mj`]: adaptive quadrature of the dilation integral
/// `int_0^1 s(lambda) (1/lambda) m_1(xi, lambda mu) dlambda`, with the
/// directional kernel evaluated through the closed sign/cone composition.
///
/// The density varies over tens of orders of magnitude near its support
/// endpoints and the kernel truncates the integrand at a cone wall, so the
/// adaptive pass starts from a fixed panel subdivision fine enough to see
/// both features.
pub fn eval_mj_quadrature(j: usize, xi: &[f64], mu: f64, bump: &BumpProfile) -> C64 {
    if mu == 0.0 || l1(xi) == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let integrand = |lambda: f64| {
        let density = bump.density(lambda);
        if density == 0.0 {
            return 0.0;
        }
        density * eval_m1j(j, xi, lambda * mu).re / lambda
    };
    const PANELS: usize = 64;
    let width = (BUMP_HI - BUMP_LO) / PANELS as f64;
    let mut value = 0.0;
    for panel in 0..PANELS {
        let a = BUMP_LO + panel as f64 * width;
        value += adaptive_simpson(&integrand, a, a + width, 1e-9 / PANELS as f64, 40);
    }
    C64::new(value, 0.0)
}

/// Region label for the smooth directional symbol.
pub fn mj_region(xi: &[f64], mu: f64) -> &'static str {
    let norm1 = l1(xi);
    if mu == 0.0 {
        return "full";
    }
    let ratio = norm1 / mu.abs();
    if ratio >= BUMP_HI {
        "full"
    } else if ratio <= BUMP_LO {
        "vanishing"
    } else {
        "transition"
    }
}

/// Region label for the cone symbols (`interior` when `|mu| <= ||xi||_1`).
pub fn cone_region(xi: &[f64], mu: f64) -> &'static str {
    if mu.abs() <= l1(xi) {
        "interior"
    } else {
        "exterior"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Bounded symbol on `R^dim` with declared parity/homogeneity flags.
#[derive(Clone)]
pub struct MultiplierSymbol {
    dim: usize,
    parity: Option<Parity>,
    homogeneous: bool,
    label: String,
    eval: Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>,
}

impl std::fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("parity", &self.parity)
            .field("homogeneous", &self.homogeneous)
            .finish()
    }
}

impl MultiplierSymbol {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        parity: Option<Parity>,
        homogeneous: bool,
        eval: Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>,
    ) -> Self {
        Self {
            dim,
            parity,
            homogeneous,
            label: label.into(),
            eval,
        }
    }

    pub fn hilbert(dim: usize) -> Self {
        Self::new(
            dim,
            "hilbert",
            Some(Parity::Odd),
            true,
            Arc::new(|w: &[f64]| eval_hilbert(w)),
        )
    }

    pub fn riesz(j: usize, dim: usize) -> Result<Self, SymbolError> {
        if j == 0 || j > dim {
            return Err(SymbolError::IndexOutOfRange { j, n: dim });
        }
        Ok(Self::new(
            dim,
            format!("riesz_{j}"),
            Some(Parity::Odd),
            true,
            Arc::new(move |w: &[f64]| eval_riesz(j, w)),
        ))
    }

    /// The cone-truncated sign symbol on `R^{n+1}` (last coordinate `mu`).
    pub fn truncated_sign(n: usize) -> Self {
        Self::new(
            n + 1,
            "k",
            Some(Parity::Odd),
            true,
            Arc::new(move |w: &[f64]| eval_k(&w[..n], w[n])),
        )
    }

    /// The cone indicator scaled by `||xi||_1 / ||xi||_2` on `R^{n+1}`.
    pub fn cone_ratio(n: usize) -> Self {
        Self::new(
            n + 1,
            "r",
            Some(Parity::Even),
            true,
            Arc::new(move |w: &[f64]| eval_r(&w[..n], w[n])),
        )
    }

    /// Sharp directional symbol `i K R r_j` on `R^{n+1}`.
    pub fn directional(j: usize, n: usize) -> Result<Self, SymbolError> {
        if j == 0 || j > n {
            return Err(SymbolError::IndexOutOfRange { j, n });
        }
        Ok(Self::new(
            n + 1,
            format!("m1_{j}"),
            Some(Parity::Even),
            true,
            Arc::new(move |w: &[f64]| eval_m1j(j, &w[..n], w[n])),
        ))
    }

    /// Smooth even homogeneous directional symbol on `R^{n+1}`.
    pub fn smooth_directional(
        j: usize,
        n: usize,
        bump: Arc<BumpProfile>,
    ) -> Result<Self, SymbolError> {
        if j == 0 || j > n {
            return Err(SymbolError::IndexOutOfRange { j, n });
        }
        Ok(Self::new(
            n + 1,
            format!("m_{j}"),
            Some(Parity::Even),
            true,
            Arc::new(move |w: &[f64]| eval_mj(j, &w[..n], w[n], &bump)),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn eval(&self, w: &[f64]) -> C64 {
        assert_eq!(w.len(), self.dim, "argument dimension mismatch");
        (self.eval)(w)
    }

    /// Samples random points and verifies the declared parity and
    /// homogeneity flags within `tol` (relative).
    pub fn check_flags(&self, seed: u64, samples: usize, tol: f64) -> Result<(), SymbolError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let w: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let value = self.eval(&w);
            let scale = 1.0 + value.norm();
            if let Some(parity) = self.parity {
                let neg: Vec<f64> = w.iter().map(|v| -v).collect();
                let mirrored = self.eval(&neg);
                let expected = match parity {
                    Parity::Even => value,
                    Parity::Odd => -value,
                };
                let deviation = (mirrored - expected).norm();
                if deviation > tol * scale {
                    return Err(SymbolError::FlagViolation {
                        label: self.label.clone(),
                        flag: "parity",
                        point: w,
                        deviation,
                    });
                }
            }
            if self.homogeneous {
                for lambda in [0.5, 2.0, rng.gen_range(0.1..5.0)] {
                    let scaled: Vec<f64> = w.iter().map(|v| lambda * v).collect();
                    let deviation = (self.eval(&scaled) - value).norm();
                    if deviation > tol * scale {
                        return Err(SymbolError::FlagViolation {
                            label: self.label.clone(),
                            flag: "homogeneity",
                            point: w,
                            deviation,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Restriction of a symbol to the integer lattice, with the zero frequency
/// forced to vanish.
#[derive(Debug, Clone)]
pub struct DiscreteSymbol {
    inner: MultiplierSymbol,
}

impl DiscreteSymbol {
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn label(&self) -> &str {
        self.inner.label()
    }

    pub fn eval_int(&self, k: &[i64]) -> C64 {
        assert_eq!(k.len(), self.inner.dim(), "frequency dimension mismatch");
        if k.iter().all(|&v| v == 0) {
            return C64::new(0.0, 0.0);
        }
        let w: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        self.inner.eval(&w)
    }
}

pub fn restrict_discrete(symbol: MultiplierSymbol) -> DiscreteSymbol {
    DiscreteSymbol { inner: symbol }
}
