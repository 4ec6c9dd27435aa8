//! Ratio experiments estimating the operator Lipschitz constant on
//! Schatten classes.
//!
//! The central quantities are `||f(X) - f(Y)||_p / ||X - Y||_p` for
//! Hermitian pairs and `||[f(A), x]||_p / sum_j ||[A_j, x]||_p` for
//! commuting tuples. Ensembles generate seeded instances, a sweep records
//! the ratios together with the running lower envelope of the constant,
//! and a weak-type harness probes the `M_{1,inf}` bound near `p = 1`.
//!
//! The asymptotic behaviour of the constant is not reachable at these
//! matrix sizes; the sweep reports trends and an envelope fit against the
//! reference curve `p^2 / (p - 1)` instead.

use crate::doi::{self, doi_apply, DoiError, LipschitzFunction};
use crate::matrix::{CMat, ComplexMatrix, HermitianMatrix, MatrixError, C64};
use crate::norms::{schatten_norm, NormOrder, SingularProfile};
use crate::sampling;
use crate::spectral::{SpectralError, SpectralTuple};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("the two operators coincide; the ratio is undefined")]
    EqualOperators,
    #[error("x commutes with every operator of the tuple; the ratio is undefined")]
    TrivialCommutators,
    #[error("unknown ensemble `{0}`")]
    UnknownEnsemble(String),
    #[error("invalid sweep configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Doi(#[from] DoiError),
    #[error(transparent)]
    Norm(#[from] crate::norms::NormError),
}

/// Parameters identifying one experiment cell.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct RecordParams {
    pub n: usize,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p_grid: Vec<f64>,
    pub seed: u64,
    pub ensemble: String,
    pub function: String,
}

/// One experiment outcome; serializes losslessly to JSON and back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub kind: String,
    pub params: RecordParams,
    pub results: BTreeMap<String, f64>,
    pub unix_time_secs: u64,
    pub code_version: String,
}

impl ExperimentRecord {
    pub fn new(kind: impl Into<String>, params: RecordParams) -> Self {
        let unix_time_secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            kind: kind.into(),
            params,
            results: BTreeMap::new(),
            unix_time_secs,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn with_result(mut self, key: &str, value: f64) -> Self {
        self.results.insert(key.to_string(), value);
        self
    }
}

/// Reference growth curve `p^2 / (p - 1)`.
pub fn reference_bound(p: f64) -> f64 {
    p * p / (p - 1.0)
}

/// `||f(X) - f(Y)||_p / ||X - Y||_p` for a one-variable Lipschitz `f`.
pub fn lipschitz_ratio(
    f: &LipschitzFunction,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    p: NormOrder,
) -> Result<f64, ExperimentError> {
    let diff = x.as_matrix() - y.as_matrix();
    let denominator = schatten_norm(&diff, p);
    if denominator == 0.0 {
        return Err(ExperimentError::EqualOperators);
    }
    let fx = SpectralTuple::from_hermitian(x)?.apply_function(|xi| f.eval(xi));
    let fy = SpectralTuple::from_hermitian(y)?.apply_function(|xi| f.eval(xi));
    let numerator = schatten_norm(&(fx.as_matrix() - fy.as_matrix()), p);
    Ok(numerator / denominator)
}

/// Commutator ratio together with its two computation paths: functional
/// calculus and the factorization through divided-difference kernels.
#[derive(Debug, Clone, Copy)]
pub struct CommutatorRatio {
    pub ratio: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// Max-entry gap between `[f(A), x]` and the factored sum.
    pub dual_path_gap: f64,
}

/// `||[f(A), x]||_p / sum_j ||[A_j, x]||_p`, cross-checked against the
/// factored path `sum_j I_phi_f I_phi_j [A_j, x]`.
pub fn commutator_ratio(
    f: &LipschitzFunction,
    s: &SpectralTuple,
    x: &ComplexMatrix,
    p: NormOrder,
) -> Result<CommutatorRatio, ExperimentError> {
    let n = s.operators();
    let mut denominator = 0.0;
    let mut scale = 0.0f64;
    let mut commutators = Vec::with_capacity(n);
    for j in 0..n {
        let a_j = s.operator(j).into_matrix();
        scale = scale.max(a_j.max_abs());
        let comm = ComplexMatrix::commutator(&a_j, x)?;
        denominator += schatten_norm(&comm, p);
        commutators.push(comm);
    }
    // Exactly commuting inputs leave rounding dust in the commutators;
    // treat anything at that level as commuting.
    let noise_floor = 1e-11 * s.dim() as f64 * (1.0 + scale) * (1.0 + x.max_abs());
    if denominator <= noise_floor {
        return Err(ExperimentError::TrivialCommutators);
    }

    let fa = s.apply_function(|xi| f.eval(xi)).into_matrix();
    let direct = ComplexMatrix::commutator(&fa, x)?;
    let numerator = schatten_norm(&direct, p);

    let (_, phi_f) = doi::divided_difference_symbols(f);
    let mut factored = ComplexMatrix::zeros(s.dim());
    for (j, comm) in commutators.iter().enumerate() {
        let (_, phi_j) = doi::direction_symbols(j + 1, n)?;
        let inner = doi_apply(s, &phi_j, comm)?;
        factored = &factored + &doi_apply(s, &phi_f, &inner)?;
    }
    let dual_path_gap = (&direct - &factored).max_abs();

    Ok(CommutatorRatio {
        ratio: numerator / denominator,
        numerator,
        denominator,
        dual_path_gap,
    })
}

/// Doubles the space: `A_1 = diag(X, Y)` and `x` the block swap. The
/// commutator ratio of the embedded data equals the Lipschitz ratio of
/// `(X, Y)` because both norms pick up the same `2^{1/p}` factor.
pub fn block_embed(
    x: &HermitianMatrix,
    y: &HermitianMatrix,
) -> Result<(SpectralTuple, ComplexMatrix), ExperimentError> {
    let d = x.dim();
    if y.dim() != d {
        return Err(ExperimentError::Matrix(MatrixError::DimensionMismatch {
            left: d,
            right: y.dim(),
        }));
    }
    let mut block = CMat::zeros(2 * d, 2 * d);
    for r in 0..d {
        for c in 0..d {
            block[(r, c)] = x.as_matrix().get(r, c);
            block[(d + r, d + c)] = y.as_matrix().get(r, c);
        }
    }
    let a1 = HermitianMatrix::symmetrize(&ComplexMatrix::from_dmatrix_unchecked(block));
    let tuple = SpectralTuple::from_hermitian(&a1)?;

    let mut swap = CMat::zeros(2 * d, 2 * d);
    for r in 0..d {
        swap[(r, d + r)] = C64::new(1.0, 0.0);
        swap[(d + r, r)] = C64::new(1.0, 0.0);
    }
    Ok((tuple, ComplexMatrix::from_dmatrix_unchecked(swap)))
}

/// One sampled experiment instance.
#[derive(Debug, Clone)]
pub enum EnsembleInstance {
    /// Commuting tuple plus a test matrix; drives the commutator ratio.
    Commutator {
        tuple: SpectralTuple,
        x: ComplexMatrix,
        f: LipschitzFunction,
    },
    /// Hermitian pair; drives the Lipschitz ratio.
    Pair {
        x: HermitianMatrix,
        y: HermitianMatrix,
        f: LipschitzFunction,
    },
}

/// Named deterministic sampler of experiment instances. The sampler also
/// receives the Schatten exponent the instance will be measured at, so
/// adversarial families can tilt their test matrix to the exponent.
#[derive(Clone)]
pub struct Ensemble {
    name: String,
    n: usize,
    d: usize,
    sampler: Arc<dyn Fn(u64, f64) -> EnsembleInstance + Send + Sync>,
}

impl std::fmt::Debug for Ensemble {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ensemble")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("d", &self.d)
            .finish()
    }
}

impl Ensemble {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn sample(&self, seed: u64, p: f64) -> EnsembleInstance {
        (self.sampler)(seed, p)
    }
}

/// Library of one-variable test functions with unit Lipschitz bound.
fn scalar_function(index: usize) -> LipschitzFunction {
    match index % 4 {
        0 => LipschitzFunction::abs(),
        1 => LipschitzFunction::new(1, "relu", 1.0, |xi: &[f64]| xi[0].max(0.0)),
        2 => LipschitzFunction::new(1, "sin", 1.0, |xi: &[f64]| xi[0].sin()),
        _ => LipschitzFunction::new(1, "dist-to-one", 1.0, |xi: &[f64]| (xi[0] - 1.0).abs()),
    }
}

/// Library of `n`-variable test functions, Lipschitz bound one in `l1`.
fn tuple_function(index: usize, n: usize) -> LipschitzFunction {
    match index % 3 {
        0 => LipschitzFunction::new(n, "abs-first", 1.0, |xi: &[f64]| xi[0].abs()),
        1 => LipschitzFunction::new(n, "max-coord", 1.0, |xi: &[f64]| {
            xi.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        }),
        _ => LipschitzFunction::new(n, "soft-l1", 1.0, |xi: &[f64]| {
            let s: f64 = xi.iter().sum();
            (1.0 + s * s).sqrt() - 1.0
        }),
    }
}

/// Interleaved spectrum `-1, 1, -2, 2, ...` of length `d`.
fn interleaved_spectrum(d: usize) -> Vec<f64> {
    (1..=d)
        .map(|i| {
            let magnitude = (i + 1) / 2;
            if i % 2 == 1 {
                -(magnitude as f64)
            } else {
                magnitude as f64
            }
        })
        .collect()
}

/// Fixed adversarial instance: `f = |t|`, a diagonal spectrum interleaving
/// negative and positive integers, and `x_{ab} = 1 / (lambda_a - lambda_b)`
/// on sign-changing pairs. Its divided-difference kernel acts as a
/// sign-pattern Schur multiplier whose `S_p -> S_p` norm grows with `d`,
/// which makes the family a generator of lower bounds for the constant.
pub fn extremal_instance(d: usize) -> (SpectralTuple, ComplexMatrix, LipschitzFunction) {
    assert!(d >= 2, "need at least two eigenvalues");
    let mut spectrum = interleaved_spectrum(d);
    spectrum.sort_by(f64::total_cmp);
    let tuple = SpectralTuple::from_parts(
        ComplexMatrix::identity(d),
        spectrum.iter().map(|&l| vec![l]).collect(),
    )
    .expect("identity basis");
    let x = ComplexMatrix::from_fn(d, |a, b| {
        let (la, lb) = (spectrum[a], spectrum[b]);
        if la.signum() != lb.signum() {
            C64::new(1.0 / (la - lb), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
    .expect("finite entries");
    (tuple, x, LipschitzFunction::abs())
}

/// Adversarial instance tilted to a Schatten exponent `p > 2`.
///
/// With the plain test matrix the commutator `[A, x]` is a flat-spectrum
/// bipartite block, so the ratio `(sum sigma_i^p)^{1/p} / m` is
/// nonincreasing in `p` and only witnesses the growth of the constant near
/// `p = 1`. Because the divided-difference kernel is symmetric, the Schur
/// multiplier has the same norm on `S_p` and its conjugate `S_q`; tilting
/// the commutator toward the norming element of the `S_q` output (via the
/// singular value decomposition raised to the power `q - 1`) transports
/// the small-exponent growth to `p`.
pub fn extremal_tilted_instance(
    d: usize,
    p: f64,
) -> (SpectralTuple, ComplexMatrix, LipschitzFunction) {
    let (tuple, x, f) = extremal_instance(d);
    if !(p > 2.0) {
        return (tuple, x, f);
    }
    let spectrum: Vec<f64> = tuple.eigs().iter().map(|row| row[0]).collect();
    let fa = tuple.apply_function(|xi| f.eval(xi)).into_matrix();
    let output = ComplexMatrix::commutator(&fa, &x).expect("same dimension");
    if output.max_abs() < 1e-14 {
        // Degenerate pattern (d = 2): nothing to tilt.
        return (tuple, x, f);
    }
    let q = p / (p - 1.0);
    let svd = output.as_dmatrix().clone().svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut tilted_comm = v_t.adjoint();
    for (col, &sigma) in svd.singular_values.iter().enumerate() {
        let weight = C64::new(sigma.powf(q - 1.0), 0.0);
        for row in 0..d {
            tilted_comm[(row, col)] *= weight;
        }
    }
    let tilted_comm = tilted_comm * u.adjoint();
    // Realize the tilted matrix as a commutator with A on the sign pattern.
    let x_tilted = ComplexMatrix::from_fn(d, |a, b| {
        let (la, lb) = (spectrum[a], spectrum[b]);
        if la.signum() != lb.signum() {
            tilted_comm[(a, b)] / C64::new(la - lb, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
    .expect("finite entries");
    (tuple, x_tilted, f)
}

/// The adversarial family above packaged as a (seed-independent) ensemble.
pub fn extremal_family(d: usize) -> Ensemble {
    Ensemble {
        name: "extremal-abs".to_string(),
        n: 1,
        d,
        sampler: Arc::new(move |_seed, p| {
            let (tuple, x, f) = extremal_tilted_instance(d, p);
            EnsembleInstance::Commutator { tuple, x, f }
        }),
    }
}

/// Random commuting tuple, Ginibre test matrix, function from the library.
pub fn commuting_gaussian(n: usize, d: usize) -> Ensemble {
    Ensemble {
        name: "commuting-gaussian".to_string(),
        n,
        d,
        sampler: Arc::new(move |seed, _p| {
            let mut rng = sampling::rng_from_seed(seed);
            let (_, tuple) = sampling::random_commuting_tuple(n, d, -2.0, 2.0, &mut rng);
            let x = sampling::ginibre(d, &mut rng);
            let f = if n == 1 {
                scalar_function(seed as usize)
            } else {
                tuple_function(seed as usize, n)
            };
            EnsembleInstance::Commutator { tuple, x, f }
        }),
    }
}

/// Random Hermitian pair with a function from the scalar library.
pub fn hermitian_pairs(d: usize) -> Ensemble {
    Ensemble {
        name: "hermitian-pairs".to_string(),
        n: 1,
        d,
        sampler: Arc::new(move |seed, _p| {
            let mut rng = sampling::rng_from_seed(seed);
            let x = sampling::random_hermitian(d, &mut rng);
            let y = sampling::random_hermitian(d, &mut rng);
            EnsembleInstance::Pair {
                x,
                y,
                f: scalar_function(seed as usize),
            }
        }),
    }
}

pub fn builtin_ensemble(name: &str, n: usize, d: usize) -> Result<Ensemble, ExperimentError> {
    match name {
        "extremal-abs" => Ok(extremal_family(d)),
        "commuting-gaussian" => Ok(commuting_gaussian(n, d)),
        "hermitian-pairs" => Ok(hermitian_pairs(d)),
        other => Err(ExperimentError::UnknownEnsemble(other.to_string())),
    }
}

pub const BUILTIN_ENSEMBLES: [&str; 3] = ["extremal-abs", "commuting-gaussian", "hermitian-pairs"];

/// Sweep configuration; read from JSON by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub p_grid: Vec<f64>,
    pub dims: Vec<usize>,
    pub seeds: Vec<u64>,
    pub ensembles: Vec<String>,
    #[serde(default = "default_arity")]
    pub n: usize,
}

fn default_arity() -> usize {
    1
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.p_grid.is_empty() {
            return Err(ExperimentError::BadConfig("empty p grid".into()));
        }
        for &p in &self.p_grid {
            if !(p > 1.0) || !p.is_finite() {
                return Err(ExperimentError::BadConfig(format!(
                    "p must lie in (1, inf), got {p}"
                )));
            }
        }
        if self.dims.iter().any(|&d| d < 2) {
            return Err(ExperimentError::BadConfig("dimensions must be >= 2".into()));
        }
        if self.ensembles.is_empty() {
            return Err(ExperimentError::BadConfig("no ensembles selected".into()));
        }
        for name in &self.ensembles {
            if !BUILTIN_ENSEMBLES.contains(&name.as_str()) {
                return Err(ExperimentError::UnknownEnsemble(name.clone()));
            }
        }
        if self.n == 0 {
            return Err(ExperimentError::BadConfig("arity must be >= 1".into()));
        }
        Ok(())
    }
}

/// Sweep output: per-cell records, the empirical lower envelope of the
/// constant per `p`, and the envelope constant for the reference curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub records: Vec<ExperimentRecord>,
    /// `(p, max ratio observed at p)` rows, ascending in `p`.
    pub envelope: Vec<(f64, f64)>,
    /// Smallest `c` with `envelope(p) <= c p^2 / (p - 1)` on the grid.
    pub fitted_c: f64,
}

/// Runs every `(ensemble, dim, seed, p)` cell, recording the ratio and the
/// dual-path gap. Cells are independent and evaluated in parallel; the
/// envelope is the running maximum per `p`, and the fitted constant is the
/// exact envelope of `ratio (p-1) / p^2` (no regression).
pub fn constant_sweep(config: &SweepConfig) -> Result<SweepOutcome, ExperimentError> {
    config.validate()?;
    let mut cells: Vec<(Ensemble, u64)> = Vec::new();
    for name in &config.ensembles {
        for &d in &config.dims {
            let seedless = name.as_str() == "extremal-abs";
            for &seed in if seedless {
                &config.seeds[..config.seeds.len().min(1)]
            } else {
                &config.seeds[..]
            } {
                cells.push((builtin_ensemble(name, config.n, d)?, seed));
            }
        }
    }

    let p_grid = config.p_grid.clone();
    let records: Vec<ExperimentRecord> = cells
        .par_iter()
        .map(|(ensemble, seed)| -> Result<Vec<ExperimentRecord>, ExperimentError> {
            let mut out = Vec::with_capacity(p_grid.len());
            for &p in &p_grid {
                let order = NormOrder::new(p)?;
                let instance = ensemble.sample(*seed, p);
                let record = match &instance {
                    EnsembleInstance::Commutator { tuple, x, f } => {
                        let ratio = commutator_ratio(f, tuple, x, order)?;
                        ExperimentRecord::new(
                            "commutator-ratio",
                            RecordParams {
                                n: tuple.operators(),
                                d: tuple.dim(),
                                p: Some(p),
                                p_grid: Vec::new(),
                                seed: *seed,
                                ensemble: ensemble.name().to_string(),
                                function: f.label().to_string(),
                            },
                        )
                        .with_result("ratio", ratio.ratio)
                        .with_result("numerator", ratio.numerator)
                        .with_result("denominator", ratio.denominator)
                        .with_result("dual_path_gap", ratio.dual_path_gap)
                        .with_result("bound_ref", reference_bound(p))
                    }
                    EnsembleInstance::Pair { x, y, f } => {
                        let ratio = lipschitz_ratio(f, x, y, order)?;
                        ExperimentRecord::new(
                            "lipschitz-ratio",
                            RecordParams {
                                n: 1,
                                d: x.dim(),
                                p: Some(p),
                                p_grid: Vec::new(),
                                seed: *seed,
                                ensemble: ensemble.name().to_string(),
                                function: f.label().to_string(),
                            },
                        )
                        .with_result("ratio", ratio)
                        .with_result("bound_ref", reference_bound(p))
                    }
                };
                out.push(record);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut envelope: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for record in &records {
        let (Some(p), Some(&ratio)) = (record.params.p, record.results.get("ratio")) else {
            continue;
        };
        let entry = envelope.entry(p.to_bits()).or_insert((p, 0.0));
        entry.1 = entry.1.max(ratio);
    }
    let envelope: Vec<(f64, f64)> = {
        let mut rows: Vec<(f64, f64)> = envelope.into_values().collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        rows
    };
    let fitted_c = envelope
        .iter()
        .map(|&(p, c_hat)| c_hat / reference_bound(p))
        .fold(0.0, f64::max);

    Ok(SweepOutcome {
        records,
        envelope,
        fitted_c,
    })
}

/// Weak-type harness: records the `M_{1,inf}` functional of `T = [f(A), x]`
/// against the trace-norm sum of the coordinate commutators, and verifies
/// the interpolation step `int_0^s mu_t(T) dt <= s^{1/p} (int_0^s
/// mu_t(T)^q dt)^{1/q}` with `p = log s` at sampled `s > e`.
pub fn weak_type_experiment(
    f: &LipschitzFunction,
    s: &SpectralTuple,
    x: &ComplexMatrix,
) -> Result<ExperimentRecord, ExperimentError> {
    let n = s.operators();
    let one = NormOrder::new(1.0)?;
    let mut l1_sum = 0.0;
    let mut scale = 0.0f64;
    for j in 0..n {
        let a_j = s.operator(j).into_matrix();
        scale = scale.max(a_j.max_abs());
        l1_sum += schatten_norm(&ComplexMatrix::commutator(&a_j, x)?, one);
    }
    let noise_floor = 1e-11 * s.dim() as f64 * (1.0 + scale) * (1.0 + x.max_abs());
    if l1_sum <= noise_floor {
        return Err(ExperimentError::TrivialCommutators);
    }

    let fa = s.apply_function(|xi| f.eval(xi)).into_matrix();
    let t_mat = ComplexMatrix::commutator(&fa, x)?;
    let profile = SingularProfile::of_matrix(&t_mat);
    let weak = profile.weak_l1();
    let m1inf = profile.m1_infinity();

    // Hoelder chain at s in a geometric ladder above e.
    let mut max_violation = f64::NEG_INFINITY;
    let d = s.dim() as f64;
    let mut sample = 3.0;
    while sample <= (2.0 * d).max(4.0) {
        let p = sample.ln();
        let q = p / (p - 1.0);
        let lhs = profile.partial_integral(sample);
        let q_profile = SingularProfile::new(
            profile.values().iter().map(|&v| v.powf(q)).collect(),
        );
        let rhs = sample.powf(1.0 / p) * q_profile.partial_integral(sample).powf(1.0 / q);
        max_violation = max_violation.max(lhs - rhs);
        sample *= 1.7;
    }

    let record = ExperimentRecord::new(
        "weak-type",
        RecordParams {
            n,
            d: s.dim(),
            p: None,
            p_grid: Vec::new(),
            seed: 0,
            ensemble: String::new(),
            function: f.label().to_string(),
        },
    )
    .with_result("m1inf", m1inf)
    .with_result("weak_l1", weak)
    .with_result("commutator_l1_sum", l1_sum)
    .with_result("ratio", m1inf / l1_sum)
    .with_result("holder_max_violation", max_violation);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_function_has_unit_ratio() {
        let mut rng = sampling::rng_from_seed(1);
        let x = sampling::random_hermitian(6, &mut rng);
        let y = sampling::random_hermitian(6, &mut rng);
        let f = LipschitzFunction::coordinate(1, 1).unwrap();
        let p = NormOrder::new(3.0).unwrap();
        let ratio = lipschitz_ratio(&f, &x, &y, p).unwrap();
        assert!((ratio - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scalar_commuting_pair() {
        let x = HermitianMatrix::from_real_diagonal(&[2.0]);
        let y = HermitianMatrix::from_real_diagonal(&[1.0]);
        let p = NormOrder::new(2.0).unwrap();
        let ratio = lipschitz_ratio(&LipschitzFunction::abs(), &x, &y, p).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12);
        assert!(matches!(
            lipschitz_ratio(&LipschitzFunction::abs(), &x, &x, p),
            Err(ExperimentError::EqualOperators)
        ));
    }

    #[test]
    fn commutator_ratio_trivial_cases() {
        let mut rng = sampling::rng_from_seed(5);
        let (_, tuple) = sampling::random_commuting_tuple(2, 6, -1.0, 1.0, &mut rng);
        let x = sampling::ginibre(6, &mut rng);
        let p = NormOrder::new(4.0).unwrap();

        // Coordinate function: the numerator is one of the summands.
        let f = LipschitzFunction::coordinate(2, 2).unwrap();
        let r = commutator_ratio(&f, &tuple, &x, p).unwrap();
        assert!(r.ratio <= 1.0 + 1e-12);
        assert!(r.dual_path_gap < 1e-9 * (1.0 + x.max_abs()));

        // Constant function: zero ratio.
        let c = LipschitzFunction::new(2, "const", 0.0, |_: &[f64]| 3.25);
        let r = commutator_ratio(&c, &tuple, &x, p).unwrap();
        assert!(r.ratio < 1e-12);

        // x commuting with the tuple (a polynomial of it) is rejected.
        let commuting = tuple.apply_function(|xi| xi[0] + 0.3 * xi[1]).into_matrix();
        assert!(matches!(
            commutator_ratio(&f, &tuple, &commuting, p),
            Err(ExperimentError::TrivialCommutators)
        ));
    }

    #[test]
    fn dual_paths_agree_on_random_instances() {
        let mut rng = sampling::rng_from_seed(9);
        let (_, tuple) = sampling::random_commuting_tuple(2, 16, -2.0, 2.0, &mut rng);
        let x = sampling::ginibre(16, &mut rng);
        let f = tuple_function(2, 2);
        let p = NormOrder::new(8.0).unwrap();
        let r = commutator_ratio(&f, &tuple, &x, p).unwrap();
        assert!(
            r.dual_path_gap <= 1e-9 * (1.0 + x.max_abs()),
            "gap {:.3e}",
            r.dual_path_gap
        );
    }

    #[test]
    fn block_embedding_identities() {
        // d = 1 hand computation: X = (1), Y = (0), f = |t|.
        let x = HermitianMatrix::from_real_diagonal(&[1.0]);
        let y = HermitianMatrix::from_real_diagonal(&[0.0]);
        let (tuple, swap) = block_embed(&x, &y).unwrap();
        let f = LipschitzFunction::abs();
        let fa = tuple.apply_function(|xi| f.eval(xi)).into_matrix();
        let two = NormOrder::new(2.0).unwrap();
        let num = schatten_norm(&ComplexMatrix::commutator(&fa, &swap).unwrap(), two);
        assert!((num - 2f64.sqrt()).abs() < 1e-12);
        let a1 = tuple.operator(0).into_matrix();
        let den = schatten_norm(&ComplexMatrix::commutator(&a1, &swap).unwrap(), two);
        assert!((den - 2f64.sqrt()).abs() < 1e-12);

        // X = Y gives a vanishing commutator.
        let (tuple, swap) = block_embed(&x, &x).unwrap();
        let a1 = tuple.operator(0).into_matrix();
        assert!(ComplexMatrix::commutator(&a1, &swap).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn block_embedding_matches_lipschitz_ratio() {
        let mut rng = sampling::rng_from_seed(13);
        for trial in 0..5 {
            let x = sampling::random_hermitian(5, &mut rng);
            let y = sampling::random_hermitian(5, &mut rng);
            let f = scalar_function(trial);
            let p = NormOrder::new(1.0 + (trial as f64 + 1.0)).unwrap();
            let direct = lipschitz_ratio(&f, &x, &y, p).unwrap();
            let (tuple, swap) = block_embed(&x, &y).unwrap();
            let embedded = commutator_ratio(&f, &tuple, &swap, p).unwrap();
            assert!(
                (direct - embedded.ratio).abs() <= 1e-10 * direct.max(1.0),
                "trial {trial}: {direct} vs {}",
                embedded.ratio
            );
        }
    }

    #[test]
    fn extremal_family_shape() {
        let (tuple, x, _) = extremal_instance(2);
        // lambda = (-1, 1): the kernel of |t| vanishes on the only pair.
        let p = NormOrder::new(4.0).unwrap();
        let r = commutator_ratio(&LipschitzFunction::abs(), &tuple, &x, p).unwrap();
        assert!(r.ratio < 1e-12);

        let (_, x8, _) = extremal_instance(8);
        // Sign pattern: entries only between opposite signs.
        assert_eq!(x8.get(0, 1), C64::new(0.0, 0.0));
        assert!(x8.get(0, 7).norm() > 0.0);
    }

    #[test]
    fn extremal_ratio_grows_with_dimension() {
        let p = NormOrder::new(4.0).unwrap();
        let mut prev = 0.0;
        for d in [4usize, 16, 64] {
            let (tuple, x, f) = extremal_tilted_instance(d, 4.0);
            let r = commutator_ratio(&f, &tuple, &x, p).unwrap();
            assert!(
                r.ratio >= prev - 1e-9,
                "d={d}: ratio {} dropped below {prev}",
                r.ratio
            );
            prev = r.ratio;
        }
        assert!(prev > 0.5, "tilted family stalled at {prev}");
    }

    #[test]
    fn extremal_ratio_increases_from_p2_to_p16() {
        let d = 64;
        let two = NormOrder::new(2.0).unwrap();
        let sixteen = NormOrder::new(16.0).unwrap();
        let (tuple, x2, f) = extremal_tilted_instance(d, 2.0);
        let low = commutator_ratio(&f, &tuple, &x2, two).unwrap().ratio;
        let (tuple, x16, f) = extremal_tilted_instance(d, 16.0);
        let high = commutator_ratio(&f, &tuple, &x16, sixteen).unwrap().ratio;
        assert!(high > low, "p=16 ratio {high} vs p=2 ratio {low}");
        assert!(low <= 1.0 + 1e-9);
    }

    #[test]
    fn sweep_envelope_and_fit() {
        let config = SweepConfig {
            p_grid: vec![2.0, 4.0],
            dims: vec![4, 8],
            seeds: vec![1, 2],
            ensembles: vec!["commuting-gaussian".into(), "extremal-abs".into()],
            n: 1,
        };
        let outcome = constant_sweep(&config).unwrap();
        assert!(!outcome.records.is_empty());
        assert_eq!(outcome.envelope.len(), 2);
        // No record beats the fitted envelope.
        for record in &outcome.records {
            let (Some(p), Some(ratio)) = (record.params.p, record.results.get("ratio")) else {
                continue;
            };
            assert!(*ratio <= outcome.fitted_c * reference_bound(p) + 1e-12);
        }
        // p = 2 ceiling for unit Lipschitz data.
        for record in &outcome.records {
            if record.params.p == Some(2.0) {
                assert!(record.results["ratio"] <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn sweep_with_empty_seeds_is_empty() {
        let config = SweepConfig {
            p_grid: vec![2.0],
            dims: vec![4],
            seeds: vec![],
            ensembles: vec!["commuting-gaussian".into()],
            n: 1,
        };
        let outcome = constant_sweep(&config).unwrap();
        assert!(outcome.records.is_empty());
        assert_eq!(outcome.fitted_c, 0.0);
    }

    #[test]
    fn sweep_config_validation() {
        let mut config = SweepConfig {
            p_grid: vec![0.5],
            dims: vec![4],
            seeds: vec![1],
            ensembles: vec!["commuting-gaussian".into()],
            n: 1,
        };
        assert!(config.validate().is_err());
        config.p_grid = vec![2.0];
        config.ensembles = vec!["no-such-ensemble".into()];
        assert!(matches!(
            config.validate(),
            Err(ExperimentError::UnknownEnsemble(_))
        ));
    }

    #[test]
    fn weak_type_record() {
        let mut rng = sampling::rng_from_seed(77);
        let (_, tuple) = sampling::random_commuting_tuple(2, 12, -1.5, 1.5, &mut rng);
        let x = sampling::ginibre(12, &mut rng);
        let f = tuple_function(0, 2);
        let record = weak_type_experiment(&f, &tuple, &x).unwrap();
        assert!(record.results["m1inf"] > 0.0);
        assert!(record.results["holder_max_violation"] <= 1e-10);
        // Roundtrip through JSON is lossless.
        let json = serde_json::to_string(&record).unwrap();
        let back: ExperimentRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.results, record.results);
        assert_eq!(back.kind, record.kind);
    }

    #[test]
    fn rank_one_holder_step() {
        // Rank-one profile: the partial integral saturates at 1 and the
        // chain holds with slack at every sampled point.
        let profile = SingularProfile::new(vec![1.0]);
        for sample in [3.0f64, 9.0, 27.0] {
            let p = sample.ln();
            let q = p / (p - 1.0);
            let lhs = profile.partial_integral(sample);
            let rhs = sample.powf(1.0 / p)
                * SingularProfile::new(vec![1.0])
                    .partial_integral(sample)
                    .powf(1.0 / q);
            assert!(lhs <= rhs + 1e-12);
            assert!((lhs - 1.0).abs() < 1e-15);
        }
    }
}
