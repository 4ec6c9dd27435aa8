//! Transference of Schur multipliers to Fourier multipliers on the torus.
//!
//! A matrix `y` that is off-diagonal for a grid-aligned spectral tuple is
//! lifted to an operator-valued trigonometric polynomial `h_y(theta) =
//! u(theta) y u(theta)*`, where the unitary path `u` winds each spectral
//! bin at a rate determined by the bin index and a snapped (exactly
//! rational) grid function. Acting on `h_y` with the discrete restriction
//! of the smooth directional symbol then reproduces, frequency by
//! frequency, the product of divided-difference double operator integrals
//! applied to `y` — an identity these routines expose and check.
//!
//! The torus is `[0, 1)^{n+1}` with integer frequencies; grid values are
//! carried as integer numerators over `m N` so frequencies are computed
//! without floating-point equality hazards.

use crate::doi::{self, doi_apply, DoiError, LipschitzFunction, ScalarSymbol2n};
use crate::matrix::{CMat, ComplexMatrix, C64};
use crate::norms::{schatten_norm, NormOrder};
use crate::spectral::SpectralTuple;
use crate::symbols::{restrict_discrete, BumpProfile, DiscreteSymbol, MultiplierSymbol, SymbolError};
use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransferenceError {
    #[error("joint eigenvalue {value} at index {index} is not on the 1/{resolution} grid")]
    OffGridEigenvalue {
        index: usize,
        value: f64,
        resolution: u32,
    },
    #[error("matrix has mass {mass:.3e} inside a spectral bin; it must be off-diagonal for the grouped bin projections")]
    NotOffDiagonal { mass: f64 },
    #[error("grid function value missing for occupied bin {bin:?}")]
    MissingBinValue { bin: Vec<i64> },
    #[error("grid pair {a:?}, {b:?} violates the Lipschitz bound: |dv| = {dv} > {bound}")]
    LipschitzGridViolation {
        a: Vec<i64>,
        b: Vec<i64>,
        dv: i64,
        bound: i64,
    },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Doi(#[from] DoiError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Finitely supported frequency-to-matrix-coefficient map on `Z^dim`.
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    dim: usize,
    mat_dim: usize,
    coeffs: BTreeMap<Vec<i64>, ComplexMatrix>,
}

impl TrigPolynomial {
    pub fn new(dim: usize, mat_dim: usize) -> Self {
        Self {
            dim,
            mat_dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mat_dim(&self) -> usize {
        self.mat_dim
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.coeffs.keys()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, freq: &[i64]) -> Option<&ComplexMatrix> {
        self.coeffs.get(freq)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<i64>, &ComplexMatrix)> {
        self.coeffs.iter()
    }

    /// Adds `mat` into the coefficient at `freq` (colliding frequencies
    /// accumulate, which is the honest Fourier coefficient).
    pub fn accumulate(&mut self, freq: Vec<i64>, mat: &ComplexMatrix) {
        assert_eq!(freq.len(), self.dim, "frequency dimension mismatch");
        assert_eq!(mat.dim(), self.mat_dim, "coefficient dimension mismatch");
        match self.coeffs.get_mut(&freq) {
            Some(existing) => *existing = &*existing + mat,
            None => {
                self.coeffs.insert(freq, mat.clone());
            }
        }
    }

    /// Drops coefficients that are exactly zero.
    pub fn prune(&mut self) {
        self.coeffs.retain(|_, mat| !mat.is_zero());
    }

    /// Evaluates `sum_K c_K exp(2 pi i K . theta)` at a torus point.
    pub fn eval(&self, theta: &[f64]) -> ComplexMatrix {
        assert_eq!(theta.len(), self.dim, "torus point dimension mismatch");
        let mut acc = CMat::zeros(self.mat_dim, self.mat_dim);
        for (freq, mat) in &self.coeffs {
            let phase: f64 = freq
                .iter()
                .zip(theta)
                .map(|(&k, &t)| k as f64 * t)
                .sum::<f64>()
                * std::f64::consts::TAU;
            let factor = C64::new(phase.cos(), phase.sin());
            acc += mat.as_dmatrix().map(|v| v * factor);
        }
        ComplexMatrix::from_dmatrix_unchecked(acc)
    }

    /// Largest entrywise difference over the union of supports.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let zero = ComplexMatrix::zeros(self.mat_dim);
        let mut worst = 0.0f64;
        for freq in self.coeffs.keys().chain(other.coeffs.keys()) {
            let a = self.coeffs.get(freq).unwrap_or(&zero);
            let b = other.coeffs.get(freq).unwrap_or(&zero);
            worst = worst.max((a - b).max_abs());
        }
        worst
    }
}

/// Function on the `1/m` grid with values recorded as exact integer
/// numerators over `m N`.
#[derive(Debug, Clone)]
pub struct GridFunction {
    resolution: u32,
    denominator: u32,
    values: BTreeMap<Vec<i64>, i64>,
}

impl GridFunction {
    pub fn new(resolution: u32, denominator: u32) -> Self {
        assert!(resolution >= 1 && denominator >= 1);
        Self {
            resolution,
            denominator,
            values: BTreeMap::new(),
        }
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    pub fn insert(&mut self, bin: Vec<i64>, numerator: i64) {
        self.values.insert(bin, numerator);
    }

    /// Integer numerator of the value at `bin` (over `m N`).
    pub fn numerator(&self, bin: &[i64]) -> Option<i64> {
        self.values.get(bin).copied()
    }

    pub fn value(&self, bin: &[i64]) -> Option<f64> {
        self.numerator(bin)
            .map(|v| v as f64 / (self.resolution as f64 * self.denominator as f64))
    }

    pub fn bins(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.values.keys()
    }

    /// Checks `|v_k - v_k'| <= N ||k - k'||_1` for every pair of occupied
    /// bins, the exact-rational form of a unit Lipschitz bound.
    pub fn validate_lipschitz(&self) -> Result<(), TransferenceError> {
        let bins: Vec<&Vec<i64>> = self.values.keys().collect();
        for (i, a) in bins.iter().enumerate() {
            for b in bins.iter().skip(i + 1) {
                let dv = self.values[*a] - self.values[*b];
                let dist: i64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum();
                let bound = self.denominator as i64 * dist;
                if dv.abs() > bound {
                    return Err(TransferenceError::LipschitzGridViolation {
                        a: (*a).clone(),
                        b: (*b).clone(),
                        dv: dv.abs(),
                        bound,
                    });
                }
            }
        }
        Ok(())
    }

    /// Random grid function satisfying the exact Lipschitz bound, built by
    /// assigning each bin a value from the (always nonempty) interval
    /// allowed by the previously assigned bins.
    pub fn sample_lipschitz(
        bins: &[Vec<i64>],
        resolution: u32,
        denominator: u32,
        rng: &mut impl Rng,
    ) -> Self {
        let mut g = GridFunction::new(resolution, denominator);
        let n_big = denominator as i64;
        let mut assigned: Vec<(Vec<i64>, i64)> = Vec::new();
        for bin in bins {
            if g.values.contains_key(bin) {
                continue;
            }
            let (lo, hi) = if assigned.is_empty() {
                (-(n_big * 4), n_big * 4)
            } else {
                let mut lo = i64::MIN / 4;
                let mut hi = i64::MAX / 4;
                for (other, v) in &assigned {
                    let dist: i64 = bin
                        .iter()
                        .zip(other.iter())
                        .map(|(x, y)| (x - y).abs())
                        .sum();
                    lo = lo.max(v - n_big * dist);
                    hi = hi.min(v + n_big * dist);
                }
                (lo, hi)
            };
            let v = rng.gen_range(lo..=hi);
            g.values.insert(bin.clone(), v);
            assigned.push((bin.clone(), v));
        }
        g
    }

    /// Divided-difference kernel of the grid data: `(g(xi) - g(xi~)) /
    /// ||xi - xi~||_2` with bins recovered by rounding `m xi`. Unoccupied
    /// bins evaluate to zero.
    pub fn divided_difference_symbol(&self, arity: usize) -> ScalarSymbol2n {
        let g = self.clone();
        ScalarSymbol2n::new(
            arity,
            move |a: &[f64], b: &[f64]| {
                let (va, vb) = match (g.value_at_point(a), g.value_at_point(b)) {
                    (Some(va), Some(vb)) => (va, vb),
                    _ => return C64::new(0.0, 0.0),
                };
                let dist = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                C64::new((va - vb) / dist, 0.0)
            },
            C64::new(0.0, 0.0),
        )
    }

    fn value_at_point(&self, xi: &[f64]) -> Option<f64> {
        let bin: Vec<i64> = xi
            .iter()
            .map(|&v| doi::floor_with_snap(v * self.resolution as f64))
            .collect();
        self.value(&bin)
    }
}

/// Snaps a Lipschitz function onto the `(1/(mN)) Z` grid of values.
///
/// At every listed grid point `k/m` the snapped function takes the value
/// `floor(N f(k/m)) / N`; away from the grid point bumps it agrees with
/// `f`. The correction bumps have disjoint supports of radius `1/(2m)`,
/// so the declared bound grows by at most `(1/N) Lip(B_m)`.
pub fn snap_function(
    f: &LipschitzFunction,
    resolution: u32,
    denominator: u32,
    grid_points: &[Vec<i64>],
) -> (LipschitzFunction, GridFunction) {
    let m = resolution as f64;
    let n_den = denominator as f64;
    let arity = f.arity();

    let mut g = GridFunction::new(resolution, denominator);
    let mut corrections: Vec<(Vec<f64>, f64)> = Vec::new();
    for bin in grid_points {
        if g.numerator(bin).is_some() {
            continue;
        }
        let point: Vec<f64> = bin.iter().map(|&k| k as f64 / m).collect();
        let value = f.eval(&point);
        let snapped_int = (n_den * value).floor() as i64;
        // numerator over mN: floor(N f) / N = m floor(N f) / (m N)
        g.insert(bin.clone(), resolution as i64 * snapped_int);
        let correction = snapped_int as f64 / n_den - value;
        if correction != 0.0 {
            corrections.push((point, correction));
        }
    }

    let bump_lip = smooth_box_lipschitz() * 2.0 * m;
    let declared = f.declared_lip() + bump_lip / n_den;
    let inner = f.clone();
    let half_width = 1.0 / (2.0 * m);
    let label = format!("snapped({}, m={resolution}, N={denominator})", f.label());
    let snapped = LipschitzFunction::new(arity, label, declared, move |xi: &[f64]| {
        let mut value = inner.eval(xi);
        for (point, correction) in &corrections {
            let mut bump = 1.0;
            for (x, p) in xi.iter().zip(point) {
                let t = (x - p) / half_width;
                if t.abs() >= 1.0 {
                    bump = 0.0;
                    break;
                }
                bump *= smooth_box(t);
            }
            if bump != 0.0 {
                value += correction * bump;
            }
        }
        value
    });
    (snapped, g)
}

/// Smooth bump on `(-1, 1)` with value 1 at the origin.
fn smooth_box(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Upper bound for `sup |d/dt smooth_box|`, computed once by a grid scan.
fn smooth_box_lipschitz() -> f64 {
    use std::sync::OnceLock;
    static BOUND: OnceLock<f64> = OnceLock::new();
    *BOUND.get_or_init(|| {
        let mut worst = 0.0f64;
        let steps = 200_000;
        let mut prev = smooth_box(-1.0);
        for i in 1..=steps {
            let t = -1.0 + 2.0 * i as f64 / steps as f64;
            let cur = smooth_box(t);
            worst = worst.max((cur - prev).abs() / (2.0 / steps as f64));
            prev = cur;
        }
        worst * 1.001
    })
}

/// Maps each basis index of `s` to its integer bin, requiring every joint
/// eigenvalue to sit exactly on the `1/m` grid.
pub fn occupied_bins(
    s: &SpectralTuple,
    resolution: u32,
) -> Result<Vec<Vec<i64>>, TransferenceError> {
    let m = resolution as f64;
    let mut bins = Vec::with_capacity(s.dim());
    for (index, row) in s.eigs().iter().enumerate() {
        let mut bin = Vec::with_capacity(row.len());
        for &v in row {
            let scaled = v * m;
            let nearest = scaled.round();
            if (scaled - nearest).abs() > 1e-9 * nearest.abs().max(1.0) {
                return Err(TransferenceError::OffGridEigenvalue {
                    index,
                    value: v,
                    resolution,
                });
            }
            bin.push(nearest as i64);
        }
        bins.push(bin);
    }
    Ok(bins)
}

/// Lifts `y` to the trigonometric polynomial of `u(theta) y u(theta)*`.
///
/// The coefficient at frequency `(N (k - k~), mN (g(k/m) - g(k~/m)))`
/// accumulates the compression of `y` between the bins `k` and `k~`.
/// Requires `y` off-diagonal for the grouped bin projections and all
/// eigenvalues of `s` on the grid.
pub fn build_hy(
    s: &SpectralTuple,
    g: &GridFunction,
    y: &ComplexMatrix,
) -> Result<TrigPolynomial, TransferenceError> {
    let d = s.dim();
    if y.dim() != d {
        return Err(TransferenceError::DimensionMismatch {
            left: y.dim(),
            right: d,
        });
    }
    let n = s.operators();
    let bins = occupied_bins(s, g.resolution())?;
    let y_basis = s.to_eigenbasis(y);

    // Off-diagonal gate: no mass within a bin.
    let mut mass = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            if bins[a] == bins[b] {
                mass = mass.max(y_basis.get(a, b).norm());
            }
        }
    }
    if mass > 1e-12 * (1.0 + y.max_abs()) {
        return Err(TransferenceError::NotOffDiagonal { mass });
    }

    let numerators: Vec<i64> = bins
        .iter()
        .map(|bin| {
            g.numerator(bin)
                .ok_or_else(|| TransferenceError::MissingBinValue { bin: bin.clone() })
        })
        .collect::<Result<_, _>>()?;

    let n_den = g.denominator() as i64;
    let mut h = TrigPolynomial::new(n + 1, d);
    for a in 0..d {
        for b in 0..d {
            if bins[a] == bins[b] {
                continue;
            }
            let entry = y_basis.get(a, b);
            if entry == C64::new(0.0, 0.0) {
                continue;
            }
            let mut freq: Vec<i64> = bins[a]
                .iter()
                .zip(&bins[b])
                .map(|(ka, kb)| n_den * (ka - kb))
                .collect();
            freq.push(numerators[a] - numerators[b]);
            // Compression p_k y p_k~ restricted to this entry, expressed in
            // the original basis.
            let mut piece = CMat::zeros(d, d);
            piece[(a, b)] = entry;
            let piece = s.from_eigenbasis(&ComplexMatrix::from_dmatrix_unchecked(piece));
            h.accumulate(freq, &piece);
        }
    }
    h.prune();
    Ok(h)
}

/// Multiplies each coefficient by the discrete symbol at its frequency.
pub fn apply_torus_multiplier(mbar: &DiscreteSymbol, h: &TrigPolynomial) -> TrigPolynomial {
    assert_eq!(mbar.dim(), h.dim(), "symbol/polynomial dimension mismatch");
    let mut out = TrigPolynomial::new(h.dim(), h.mat_dim());
    for (freq, mat) in h.coeffs() {
        let factor = mbar.eval_int(freq);
        if factor == C64::new(0.0, 0.0) {
            continue;
        }
        out.accumulate(freq.clone(), &mat.scale(factor));
    }
    out.prune();
    out
}

/// Both sides of the transference identity plus their coefficientwise gap.
#[derive(Debug)]
pub struct TransferenceCheck {
    pub lhs: TrigPolynomial,
    pub rhs: TrigPolynomial,
    pub max_error: f64,
}

/// Computes the discrete multiplier action on the lift of `y` (lhs) and
/// the lift of the composed divided-difference double operator integrals
/// (rhs). The two agree coefficient by coefficient: the multiplier value
/// at an occupied frequency reduces, through homogeneity, to the same
/// divided-difference product the Schur kernels produce. Requires the
/// exact-rational Lipschitz bound on `g` so the cone region of the symbol
/// covers every occupied frequency.
pub fn check_transference(
    s: &SpectralTuple,
    g: &GridFunction,
    y: &ComplexMatrix,
    j: usize,
    bump: Arc<BumpProfile>,
) -> Result<TransferenceCheck, TransferenceError> {
    let n = s.operators();
    g.validate_lipschitz()?;
    let h_y = build_hy(s, g, y)?;

    let symbol = MultiplierSymbol::smooth_directional(j, n, bump)?;
    let mbar = restrict_discrete(symbol);
    let lhs = apply_torus_multiplier(&mbar, &h_y);

    let phi_g = g.divided_difference_symbol(n);
    let (_, phi_j) = doi::direction_symbols(j, n)?;
    let inner = doi_apply(s, &phi_j, y)?;
    let composed = doi_apply(s, &phi_g, &inner)?;
    let rhs = build_hy(s, g, &composed)?;

    let max_error = lhs.max_coeff_diff(&rhs);
    Ok(TransferenceCheck {
        lhs,
        rhs,
        max_error,
    })
}

/// `( average over the uniform grid of ||h(theta)||_p^p )^{1/p}`; the
/// essential sup over the grid for `p = inf`.
pub fn torus_lp_norm(h: &TrigPolynomial, p: NormOrder, grid_per_axis: usize) -> f64 {
    assert!(grid_per_axis >= 1);
    let dims = h.dim();
    let total = (grid_per_axis as u64).pow(dims as u32);
    let mut index = vec![0usize; dims];
    let mut theta = vec![0.0f64; dims];
    let mut acc = 0.0f64;
    let mut sup = 0.0f64;
    for _ in 0..total {
        for (t, &i) in theta.iter_mut().zip(&index) {
            *t = i as f64 / grid_per_axis as f64;
        }
        let value = h.eval(&theta);
        let norm = schatten_norm(&value, p);
        if p.is_infinite() {
            sup = sup.max(norm);
        } else {
            acc += norm.powf(p.value());
        }
        let mut axis = 0;
        while axis < dims {
            index[axis] += 1;
            if index[axis] < grid_per_axis {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
    if p.is_infinite() {
        sup
    } else {
        (acc / total as f64).powf(1.0 / p.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::spectral::SpectralTuple;
    use rand::Rng;

    /// Grid-aligned tuple with the given bins (n coordinates each) in a
    /// random shared eigenbasis.
    fn grid_tuple(bins: &[Vec<i64>], resolution: u32, rng: &mut impl Rng) -> SpectralTuple {
        let d = bins.len();
        let basis = sampling::random_unitary(d, rng);
        let eigs: Vec<Vec<f64>> = bins
            .iter()
            .map(|bin| bin.iter().map(|&k| k as f64 / resolution as f64).collect())
            .collect();
        SpectralTuple::from_parts(basis, eigs).unwrap()
    }

    fn bin_offdiag(s: &SpectralTuple, bins: &[Vec<i64>], rng: &mut impl Rng) -> ComplexMatrix {
        let d = s.dim();
        let mut in_basis = CMat::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                if bins[a] != bins[b] {
                    in_basis[(a, b)] =
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
        s.from_eigenbasis(&ComplexMatrix::from_dmatrix_unchecked(in_basis))
    }

    #[test]
    fn snap_identity_on_integer_grid() {
        let f = LipschitzFunction::coordinate(1, 1).unwrap();
        let grid: Vec<Vec<i64>> = vec![vec![0], vec![1], vec![2]];
        let (f_n, g) = snap_function(&f, 1, 2, &grid);
        for k in 0..3i64 {
            // values already in (1/2)Z: corrections vanish
            assert_eq!(g.numerator(&[k]), Some(2 * k));
            assert!((f_n.eval(&[k as f64]) - k as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn snap_irrational_value() {
        let f = LipschitzFunction::new(1, "slope", 1.0, |xi: &[f64]| xi[0] / 2f64.sqrt());
        let (f_n, g) = snap_function(&f, 1, 10, &[vec![1]]);
        // floor(10 / sqrt 2) / 10 = 0.7 exactly, numerator 7 over 10.
        assert_eq!(g.numerator(&[1]), Some(7));
        assert!((g.value(&[1]).unwrap() - 0.7).abs() < 1e-15);
        assert!((f_n.eval(&[1.0]) - 0.7).abs() < 1e-12);
        let expected_correction = 0.7 - 1.0 / 2f64.sqrt();
        assert!((expected_correction + 0.007_106_781_186_547_573).abs() < 1e-15);
        // Away from the bump support the function is untouched.
        assert!((f_n.eval(&[3.0]) - 3.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sampled_grid_functions_are_lipschitz() {
        let mut rng = sampling::rng_from_seed(3);
        for _ in 0..20 {
            let bins: Vec<Vec<i64>> = (0..6)
                .map(|_| vec![rng.gen_range(-4..4), rng.gen_range(-4..4)])
                .collect();
            let g = GridFunction::sample_lipschitz(&bins, 4, 8, &mut rng);
            g.validate_lipschitz().unwrap();
        }
    }

    #[test]
    fn single_matrix_unit_lift() {
        let bins: Vec<Vec<i64>> = vec![vec![0], vec![1], vec![2]];
        let basis = ComplexMatrix::identity(3);
        let s = SpectralTuple::from_parts(
            basis,
            bins.iter()
                .map(|b| b.iter().map(|&k| k as f64).collect())
                .collect(),
        )
        .unwrap();
        // identity grid values: g(k) = k, numerator k over mN = 1.
        let mut g = GridFunction::new(1, 1);
        for bin in &bins {
            g.insert(bin.clone(), bin[0]);
        }
        let mut y_mat = CMat::zeros(3, 3);
        y_mat[(2, 0)] = C64::new(1.0, 0.0);
        let y = ComplexMatrix::new(y_mat).unwrap();
        let h = build_hy(&s, &g, &y).unwrap();
        assert_eq!(h.support_len(), 1);
        let freq = h.support().next().unwrap().clone();
        assert_eq!(freq, vec![2, 2]);
    }

    #[test]
    fn diagonal_input_rejected() {
        let mut rng = sampling::rng_from_seed(11);
        let bins: Vec<Vec<i64>> = vec![vec![0], vec![0], vec![1]];
        let s = grid_tuple(&bins, 1, &mut rng);
        let mut g = GridFunction::new(1, 1);
        g.insert(vec![0], 0);
        g.insert(vec![1], 1);
        // Mass between the two indices sharing bin 0.
        let mut in_basis = CMat::zeros(3, 3);
        in_basis[(0, 1)] = C64::new(1.0, 0.0);
        let y = s.from_eigenbasis(&ComplexMatrix::from_dmatrix_unchecked(in_basis));
        assert!(matches!(
            build_hy(&s, &g, &y),
            Err(TransferenceError::NotOffDiagonal { .. })
        ));
    }

    #[test]
    fn off_grid_eigenvalue_rejected() {
        let basis = ComplexMatrix::identity(2);
        let s = SpectralTuple::from_parts(basis, vec![vec![0.51], vec![1.0]]).unwrap();
        let g = GridFunction::new(1, 1);
        let y = ComplexMatrix::zeros(2);
        assert!(matches!(
            build_hy(&s, &g, &y),
            Err(TransferenceError::OffGridEigenvalue { .. })
        ));
    }

    #[test]
    fn lift_reproduces_unitary_conjugation() {
        let mut rng = sampling::rng_from_seed(17);
        let bins: Vec<Vec<i64>> = vec![vec![0, 1], vec![1, 0], vec![2, 2], vec![0, 3]];
        let s = grid_tuple(&bins, 2, &mut rng);
        let g = GridFunction::sample_lipschitz(&bins, 2, 4, &mut rng);
        let y = bin_offdiag(&s, &bins, &mut rng);
        let h = build_hy(&s, &g, &y).unwrap();

        let numerators: Vec<i64> = bins.iter().map(|b| g.numerator(b).unwrap()).collect();
        let n_den = g.denominator() as i64;
        for trial in 0..5 {
            let theta: Vec<f64> = (0..3)
                .map(|k| ((trial * 3 + k) as f64 * 0.173) % 1.0)
                .collect();
            // Direct conjugation by the unitary path.
            let d = s.dim();
            let mut u = CMat::zeros(d, d);
            for a in 0..d {
                let phase: f64 = bins[a]
                    .iter()
                    .zip(&theta[..2])
                    .map(|(&k, t)| (n_den * k) as f64 * t)
                    .sum::<f64>()
                    + numerators[a] as f64 * theta[2];
                u[(a, a)] = C64::new(
                    (std::f64::consts::TAU * phase).cos(),
                    (std::f64::consts::TAU * phase).sin(),
                );
            }
            let u = s.from_eigenbasis(&ComplexMatrix::from_dmatrix_unchecked(u));
            let direct = &(&u * &y) * &u.adjoint();
            let from_poly = h.eval(&theta);
            assert!(
                (&direct - &from_poly).max_abs() < 1e-12 * (1.0 + y.max_abs()),
                "trial {trial}"
            );
        }
    }

    #[test]
    fn norm_transport() {
        let mut rng = sampling::rng_from_seed(23);
        let bins: Vec<Vec<i64>> = vec![vec![0], vec![1], vec![3], vec![4]];
        let s = grid_tuple(&bins, 4, &mut rng);
        let g = GridFunction::sample_lipschitz(&bins, 4, 4, &mut rng);
        let y = bin_offdiag(&s, &bins, &mut rng);
        let h = build_hy(&s, &g, &y).unwrap();
        for p in [1.0, 1.5, 2.0, 4.0] {
            let order = NormOrder::new(p).unwrap();
            let want = schatten_norm(&y, order);
            for grid in [2usize, 3, 5] {
                let got = torus_lp_norm(&h, order, grid);
                assert!(
                    (got - want).abs() <= 1e-10 * want.max(1.0),
                    "p={p} grid={grid}: {got} vs {want}"
                );
            }
        }
        let got = torus_lp_norm(&h, NormOrder::infinity(), 3);
        let want = schatten_norm(&y, NormOrder::infinity());
        assert!((got - want).abs() <= 1e-10 * want.max(1.0));
    }

    #[test]
    fn constant_polynomial_norm() {
        let x = sampling::ginibre(4, &mut sampling::rng_from_seed(2));
        let mut h = TrigPolynomial::new(2, 4);
        h.accumulate(vec![0, 0], &x);
        let p = NormOrder::new(3.0).unwrap();
        assert!((torus_lp_norm(&h, p, 4) - schatten_norm(&x, p)).abs() < 1e-12);
        let zero = TrigPolynomial::new(2, 4);
        assert_eq!(torus_lp_norm(&zero, p, 4), 0.0);
    }

    #[test]
    fn multiplier_action_basics() {
        let mut rng = sampling::rng_from_seed(31);
        let bins: Vec<Vec<i64>> = vec![vec![0], vec![2]];
        let s = grid_tuple(&bins, 1, &mut rng);
        let mut g = GridFunction::new(1, 1);
        g.insert(vec![0], 0);
        g.insert(vec![2], 1);
        let y = bin_offdiag(&s, &bins, &mut rng);
        let mut h = build_hy(&s, &g, &y).unwrap();
        // Add a zero-frequency piece by hand; a unit multiplier away from
        // zero must delete exactly that coefficient.
        h.accumulate(vec![0, 0], &ComplexMatrix::identity(2));
        let one = MultiplierSymbol::new(
            2,
            "one",
            None,
            false,
            Arc::new(|_w: &[f64]| C64::new(1.0, 0.0)),
        );
        let acted = apply_torus_multiplier(&restrict_discrete(one), &h);
        assert!(acted.coeff(&[0, 0]).is_none());
        assert_eq!(acted.support_len(), h.support_len() - 1);
        for (freq, mat) in acted.coeffs() {
            assert!((mat - h.coeff(freq).unwrap()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn transference_identity_on_random_instance() {
        let mut rng = sampling::rng_from_seed(41);
        let bump = BumpProfile::shared();
        let bins: Vec<Vec<i64>> = vec![
            vec![0, 0],
            vec![1, 2],
            vec![3, 1],
            vec![0, 4],
            vec![2, 2],
            vec![1, 0],
        ];
        let s = grid_tuple(&bins, 4, &mut rng);
        let g = GridFunction::sample_lipschitz(&bins, 4, 8, &mut rng);
        let y = bin_offdiag(&s, &bins, &mut rng);
        for j in 1..=2 {
            let check = check_transference(&s, &g, &y, j, bump.clone()).unwrap();
            let scale = schatten_norm(&y, NormOrder::new(2.0).unwrap());
            assert!(
                check.max_error <= 1e-9 * scale,
                "j={j}: {:.3e}",
                check.max_error
            );
        }
    }

    #[test]
    fn transference_identity_flat_and_linear() {
        let mut rng = sampling::rng_from_seed(43);
        let bump = BumpProfile::shared();
        let bins: Vec<Vec<i64>> = vec![vec![0], vec![1], vec![2], vec![4]];
        let s = grid_tuple(&bins, 2, &mut rng);
        let y = bin_offdiag(&s, &bins, &mut rng);

        // Flat grid data: both sides vanish.
        let mut flat = GridFunction::new(2, 4);
        for bin in &bins {
            flat.insert(bin.clone(), 0);
        }
        let check = check_transference(&s, &flat, &y, 1, bump.clone()).unwrap();
        assert_eq!(check.lhs.support_len(), 0);
        assert_eq!(check.rhs.support_len(), 0);

        // Identity grid data: the multiplier acts as 1, both sides equal
        // the lift of y itself.
        let mut ident = GridFunction::new(2, 4);
        for bin in &bins {
            // g(k/m) = k/m: numerator over mN is N k.
            ident.insert(bin.clone(), 4 * bin[0]);
        }
        let check = check_transference(&s, &ident, &y, 1, bump).unwrap();
        let h_y = build_hy(&s, &ident, &y).unwrap();
        assert!(check.lhs.max_coeff_diff(&h_y) < 1e-12 * (1.0 + y.max_abs()));
        assert!(check.max_error < 1e-12 * (1.0 + y.max_abs()));
    }

    #[test]
    fn colliding_frequencies_stay_consistent() {
        // Two bin pairs with identical (dk, dv) share one frequency; the
        // multiplier treats the merged coefficient exactly like the kernel.
        let mut rng = sampling::rng_from_seed(47);
        let bump = BumpProfile::shared();
        let bins: Vec<Vec<i64>> = vec![vec![0], vec![1], vec![3], vec![4]];
        let s = grid_tuple(&bins, 2, &mut rng);
        let mut g = GridFunction::new(2, 2);
        // dv equal for the pairs (1,0) and (4,3).
        g.insert(vec![0], 0);
        g.insert(vec![1], 1);
        g.insert(vec![3], 3);
        g.insert(vec![4], 4);
        let y = bin_offdiag(&s, &bins, &mut rng);
        let h = build_hy(&s, &g, &y).unwrap();
        // Frequency (N dk, dv) = (2, 1) collects both pairs.
        assert!(h.coeff(&[2, 1]).is_some());
        let check = check_transference(&s, &g, &y, 1, bump).unwrap();
        assert!(check.max_error <= 1e-9 * (1.0 + y.max_abs()));
    }
}
