//! Identity and property checks bundled for the acceptance tests and the
//! CLI `verify` subcommand.
//!
//! Each check returns a [`CheckReport`] with a pass flag and a short
//! detail string; nothing here panics on failure, so a runner can print
//! one line per check and aggregate the outcome.

use crate::doi::{
    self, discretize_measure, divided_difference_symbols, doi_apply, gaussian_abs_moment,
    mollify_function, trace_pairing, LipschitzFunction, ScalarSymbol2n,
};
use crate::experiments::{
    block_embed, commutator_ratio, constant_sweep, lipschitz_ratio, reference_bound,
    weak_type_experiment, SweepConfig,
};
use crate::matrix::{CMat, ComplexMatrix, C64};
use crate::norms::{schatten_norm, trace_product, NormOrder, SingularProfile};
use crate::sampling;
use crate::spectral::SpectralTuple;
use crate::symbols::{
    eval_k, eval_k_eps_sum, eval_k_quadrature, eval_mj, eval_mj_quadrature, eval_r,
    eval_r_product, BumpProfile, MultiplierSymbol,
};
use crate::transference::{
    build_hy, check_transference, torus_lp_norm, GridFunction, TransferenceError,
};
use rand::Rng;
use std::time::Instant;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckReport {
    pub fn line(&self) -> String {
        format!(
            "{}: {} ({:.2}s) {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

fn report(
    name: &'static str,
    started: Instant,
    passed: bool,
    detail: String,
) -> CheckReport {
    CheckReport {
        name,
        passed,
        detail,
        seconds: started.elapsed().as_secs_f64(),
    }
}

/// Shared knobs for the randomized checks.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Cap for the randomized-instance dimensions of the extra checks.
    pub dim: usize,
    /// Multiplies every tolerance below.
    pub tol_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            dim: 16,
            tol_scale: 1.0,
        }
    }
}

fn tuple_functions(n: usize, index: usize) -> LipschitzFunction {
    match index % 4 {
        0 => LipschitzFunction::new(n, "abs-first", 1.0, |xi: &[f64]| xi[0].abs()),
        1 => LipschitzFunction::new(n, "max-coord", 1.0, |xi: &[f64]| {
            xi.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        }),
        2 => LipschitzFunction::new(n, "soft-l1", 1.0, |xi: &[f64]| {
            let s: f64 = xi.iter().sum();
            (1.0 + s * s).sqrt() - 1.0
        }),
        _ => LipschitzFunction::new(n, "sin-first", 1.0, |xi: &[f64]| xi[0].sin()),
    }
}

/// Difference kernel versus functional-calculus commutator on 200 random
/// instances with up to three operators and dimension up to 32.
pub fn c01_commutator_identity(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let mut rng = sampling::rng_from_seed(cfg.seed);
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for trial in 0..200 {
        let n = 1 + trial % 3;
        let d = [4, 8, 16, 32][trial % 4];
        let (_, s) = sampling::random_commuting_tuple(n, d, -2.0, 2.0, &mut rng);
        let x = sampling::ginibre(d, &mut rng);
        let f = tuple_functions(n, trial);
        let (psi_f, _) = divided_difference_symbols(&f);
        let lhs = doi_apply(&s, &psi_f, &x).expect("compatible dimensions");
        let fa = s.apply_function(|xi| f.eval(xi)).into_matrix();
        let rhs = &(&fa * &x) - &(&x * &fa);
        let two = NormOrder::new(2.0).unwrap();
        let gap = schatten_norm(&(&lhs - &rhs), two);
        // Lipschitz scale: declared bound times the l1 spread of the
        // sampled spectrum (eigenvalues in [-2, 2]^n).
        let lip_scale = f.declared_lip().max(1.0) * (1.0 + 4.0 * n as f64);
        let tol = cfg.tol_scale * 1e-10 * schatten_norm(&x, two) * lip_scale;
        let rel = gap / tol;
        worst = worst.max(rel);
        if gap > tol {
            failures += 1;
        }
    }
    report(
        "commutator-identity",
        started,
        failures == 0,
        format!("200 instances, worst gap {worst:.3e} of tolerance"),
    )
}

/// Kernel factorization: the difference kernel equals the sum over
/// coordinates of the three-fold divided-difference composition.
pub fn c02_factorization(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(1));
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for trial in 0..200 {
        let n = 1 + trial % 3;
        let d = [4, 8, 16, 32][(trial + 1) % 4];
        let (_, s) = sampling::random_commuting_tuple(n, d, -2.0, 2.0, &mut rng);
        let x = sampling::ginibre(d, &mut rng);
        let f = tuple_functions(n, trial + 1);
        let (psi_f, phi_f) = divided_difference_symbols(&f);
        let direct = doi_apply(&s, &psi_f, &x).expect("compatible");
        let mut factored = ComplexMatrix::zeros(d);
        for j in 1..=n {
            let (psi_j, phi_j) = doi::direction_symbols(j, n).unwrap();
            let step = doi_apply(&s, &psi_j, &x).expect("compatible");
            let step = doi_apply(&s, &phi_j, &step).expect("compatible");
            factored = &factored + &doi_apply(&s, &phi_f, &step).expect("compatible");
        }
        let two = NormOrder::new(2.0).unwrap();
        let gap = schatten_norm(&(&direct - &factored), two);
        let lip_scale = f.declared_lip().max(1.0) * (1.0 + 4.0 * n as f64);
        let tol = cfg.tol_scale * 1e-10 * schatten_norm(&x, two) * lip_scale;
        worst = worst.max(gap / tol);
        if gap > tol {
            failures += 1;
        }
    }
    report(
        "factorization",
        started,
        failures == 0,
        format!("200 instances, worst gap {worst:.3e} of tolerance"),
    )
}

/// Closed-form symbols against their independent oracles, plus exact
/// parity and homogeneity of the smooth directional symbol.
pub fn c03_symbol_oracles(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(2));
    let bump = BumpProfile::shared();
    let mut detail = String::new();
    let mut passed = true;

    // Cone-truncated sign symbol: two oracles, 1e-8 on 1000 points.
    let mut worst_k = 0.0f64;
    for trial in 0..1000 {
        let n = 1 + trial % 4;
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mu: f64 = rng.gen_range(-4.0..4.0);
        let closed = eval_k(&xi, mu);
        worst_k = worst_k
            .max((closed - eval_k_quadrature(&xi, mu)).norm())
            .max((closed - eval_k_eps_sum(&xi, mu)).norm());
    }
    passed &= worst_k <= cfg.tol_scale * 1e-8;
    detail.push_str(&format!("k-oracles {worst_k:.2e}; "));

    // Cone ratio against the sign-restricted product form, off null sets.
    let mut worst_r = 0.0f64;
    let mut r_count = 0;
    while r_count < 1000 {
        let n = 1 + r_count % 4;
        let xi: Vec<f64> = (0..n)
            .map(|_| {
                let v: f64 = rng.gen_range(0.05..3.0);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let mu: f64 = rng.gen_range(-4.0..4.0);
        let norm1: f64 = xi.iter().map(|v| v.abs()).sum();
        if mu == 0.0 || (mu.abs() - norm1).abs() < 1e-9 {
            continue;
        }
        worst_r = worst_r.max((eval_r(&xi, mu) - eval_r_product(&xi, mu)).norm());
        r_count += 1;
    }
    passed &= worst_r <= cfg.tol_scale * 1e-10;
    detail.push_str(&format!("r-oracle {worst_r:.2e}; "));

    // Smooth directional symbol against the dilation-integral quadrature,
    // stratified over the three regions.
    let mut worst_m = 0.0f64;
    for trial in 0..1000 {
        let n = 1 + trial % 3;
        let j = 1 + trial % n;
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let norm1: f64 = xi.iter().map(|v| v.abs()).sum();
        if norm1 == 0.0 {
            continue;
        }
        // Cycle target regions by scaling mu relative to the l1 norm.
        let mu = match trial % 3 {
            0 => norm1 * rng.gen_range(0.05..0.95),  // divided-difference
            1 => norm1 / rng.gen_range(0.51..0.74),  // transition
            _ => norm1 * rng.gen_range(2.1..5.0),    // vanishing
        } * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let closed = eval_mj(j, &xi, mu, &bump);
        let quad = eval_mj_quadrature(j, &xi, mu, &bump);
        worst_m = worst_m.max((closed - quad).norm());
    }
    passed &= worst_m <= cfg.tol_scale * 1e-7;
    detail.push_str(&format!("m-quadrature {worst_m:.2e}; "));

    // Exact parity and homogeneity on a dyadic sample grid: products and
    // sums then scale without rounding, so equality is bitwise.
    let mut exact = true;
    let grain = (1u64 << 18) as f64;
    for trial in 0..500 {
        let n = 1 + trial % 3;
        let j = 1 + trial % n;
        let xi: Vec<f64> = (0..n)
            .map(|_| (rng.gen_range(-(2.0 * grain) as i64..(2.0 * grain) as i64)) as f64 / grain)
            .collect();
        let mu = (rng.gen_range(-(2.0 * grain) as i64..(2.0 * grain) as i64)) as f64 / grain;
        if xi.iter().all(|&v| v == 0.0) && mu == 0.0 {
            continue;
        }
        let value = eval_mj(j, &xi, mu, &bump);
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        exact &= eval_mj(j, &neg, -mu, &bump) == value;
        for lambda in [0.5, 2.0, 17.0] {
            let scaled: Vec<f64> = xi.iter().map(|v| lambda * v).collect();
            exact &= eval_mj(j, &scaled, lambda * mu, &bump) == value;
        }
    }
    passed &= exact;
    detail.push_str(&format!("parity/homogeneity exact: {exact}"));

    report("symbol-oracles", started, passed, detail)
}

/// Region identity of the smooth directional symbol on 10^4 points:
/// equality with the divided-difference product inside the cone, zero deep
/// outside it.
pub fn c04_region_identity(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(3));
    let bump = BumpProfile::shared();
    let mut passed = true;
    for trial in 0..10_000 {
        let n = 1 + trial % 3;
        let j = 1 + trial % n;
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let norm1: f64 = xi.iter().map(|v| v.abs()).sum();
        if norm1 == 0.0 {
            continue;
        }
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        if trial % 2 == 0 {
            // |mu| <= ||xi||_1: exact divided-difference product.
            let mu = sign * norm1 * rng.gen_range(0.0..1.0);
            let norm2sq: f64 = xi.iter().map(|v| v * v).sum();
            let expected = C64::new(1.0 * ((mu * xi[j - 1]) / norm2sq), 0.0);
            passed &= eval_mj(j, &xi, mu, &bump) == expected;
        } else {
            // ||xi||_1 <= |mu| / 2: exact zero.
            let mu = sign * norm1 * rng.gen_range(2.0..6.0);
            passed &= eval_mj(j, &xi, mu, &bump) == C64::new(0.0, 0.0);
        }
    }
    report(
        "region-identity",
        started,
        passed,
        "10000 stratified points, exact comparisons".to_string(),
    )
}

fn random_grid_instance(
    n: usize,
    d: usize,
    resolution: u32,
    rng: &mut impl Rng,
) -> (SpectralTuple, Vec<Vec<i64>>, ComplexMatrix) {
    let bins: Vec<Vec<i64>> = (0..d)
        .map(|_| {
            (0..n)
                .map(|_| rng.gen_range(-(2 * resolution as i64)..2 * resolution as i64))
                .collect()
        })
        .collect();
    let basis = sampling::random_unitary(d, rng);
    let eigs: Vec<Vec<f64>> = bins
        .iter()
        .map(|bin| bin.iter().map(|&k| k as f64 / resolution as f64).collect())
        .collect();
    let s = SpectralTuple::from_parts(basis, eigs).expect("random unitary basis");
    let mut in_basis = CMat::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            if bins[a] != bins[b] {
                in_basis[(a, b)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }
    let y = s.from_eigenbasis(&ComplexMatrix::from_dmatrix_unchecked(in_basis));
    (s, bins, y)
}

/// Transference identity over 100 seeded instances plus norm transport of
/// the lift for several Schatten exponents.
pub fn c05_transference(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let bump = BumpProfile::shared();
    let mut worst_identity = 0.0f64;
    let mut worst_norm = 0.0f64;
    let mut failures = 0usize;
    for trial in 0..100u64 {
        let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(1000 + trial));
        let n = 1 + (trial as usize) % 2;
        let d = 4 + (trial as usize) % 13; // up to 16
        let resolution = [1u32, 2, 4, 8][(trial as usize) % 4];
        let denominator = [1u32, 2, 4, 8][(trial as usize / 4) % 4];
        let (s, bins, y) = random_grid_instance(n, d, resolution, &mut rng);
        let g = GridFunction::sample_lipschitz(&bins, resolution, denominator, &mut rng);
        let j = 1 + (trial as usize) % n;
        let two = NormOrder::new(2.0).unwrap();
        let y_scale = schatten_norm(&y, two);
        match check_transference(&s, &g, &y, j, bump.clone()) {
            Ok(check) => {
                let rel = check.max_error / (cfg.tol_scale * 1e-9 * y_scale.max(1e-300));
                worst_identity = worst_identity.max(rel);
                if rel > 1.0 {
                    failures += 1;
                }
            }
            Err(TransferenceError::NotOffDiagonal { .. }) if y.is_zero() => {}
            Err(err) => {
                failures += 1;
                worst_identity = f64::INFINITY;
                let _ = err;
            }
        }

        // Norm transport at p in {1, 1.5, 2, 4, inf}.
        if let Ok(h) = build_hy(&s, &g, &y) {
            for p in [
                NormOrder::new(1.0).unwrap(),
                NormOrder::new(1.5).unwrap(),
                two,
                NormOrder::new(4.0).unwrap(),
                NormOrder::infinity(),
            ] {
                let want = schatten_norm(&y, p);
                let got = torus_lp_norm(&h, p, 3);
                let rel = (got - want).abs() / (cfg.tol_scale * 1e-10 * want.max(1.0));
                worst_norm = worst_norm.max(rel);
                if rel > 1.0 {
                    failures += 1;
                }
            }
        }
    }
    report(
        "transference",
        started,
        failures == 0,
        format!(
            "identity worst {worst_identity:.3e}, norm transport worst {worst_norm:.3e} (of tolerance)"
        ),
    )
}

/// Linear regression slope of `ln error` against `ln m`.
fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x: f64 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y: f64 = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let var: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    cov / var
}

/// Discretization convergence: pairing error against the snapped measure
/// decays with log-log slope near -1 for smooth kernels and test matrices
/// supported away from the diagonal.
pub fn c06_discretization_convergence(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(5));
    let n = 2;
    let d = 12;
    let separation = 0.25; // keep pairs at distance > 1/l with l = 4

    let (_, s) = sampling::random_commuting_tuple(n, d, 0.0, 2.0, &mut rng);
    let phi = ScalarSymbol2n::new(
        n,
        |a: &[f64], b: &[f64]| {
            let dot = a[0] + 2.0 * a[1] - b[0] + 0.5 * b[1];
            let decay = (-(a.iter().chain(b).map(|v| v * v).sum::<f64>()) / 8.0).exp();
            C64::new(dot.cos() * decay, dot.sin() * decay * 0.5)
        },
        C64::new(0.0, 0.0),
    );

    // Zero out pairs closer than the separation so the kernel only sees
    // well-separated eigenvalue pairs.
    let mut pairs: Vec<(ComplexMatrix, ComplexMatrix)> = Vec::new();
    for _ in 0..6 {
        let mut y_basis = CMat::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let dist: f64 = s
                    .eig(a)
                    .iter()
                    .zip(s.eig(b))
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                if dist > separation {
                    y_basis[(a, b)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
        let y = s.from_eigenbasis(&ComplexMatrix::from_dmatrix_unchecked(y_basis));
        let z = sampling::ginibre(d, &mut rng);
        pairs.push((z, y));
    }

    let mut points = Vec::new();
    for exp in 2..=8u32 {
        let m = 1u32 << exp; // 4 .. 256
        let sm = discretize_measure(&s, m);
        let mut mean_err = 0.0;
        for (z, y) in &pairs {
            let exact = trace_pairing(z, &phi, y, &s).unwrap();
            let approx = trace_pairing(z, &phi, y, &sm).unwrap();
            mean_err += (exact - approx).norm();
        }
        mean_err /= pairs.len() as f64;
        points.push(((m as f64).ln(), mean_err.ln()));
    }
    let slope = regression_slope(&points);
    let passed = (-1.3..=-0.7).contains(&slope);
    report(
        "discretization-convergence",
        started,
        passed,
        format!("log-log slope {slope:.3} over m in 4..=256"),
    )
}

/// Unitary-path inequality for commuting tuples plus the Gaussian
/// mollification facts (value at the kink, Lipschitz quotient control).
pub fn c07_exponential_bound_and_mollification(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(6));
    let mut passed = true;
    let mut detail = String::new();

    // Exponential path bound on 100 samples of same-basis tuples.
    let inf = NormOrder::infinity();
    let mut worst_gap = f64::NEG_INFINITY;
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let d = 4 + trial % 9;
        let basis = sampling::random_unitary(d, &mut rng);
        let eigs_b: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let eigs_c: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let tuple_b = SpectralTuple::from_parts(basis.clone(), eigs_b).unwrap();
        let tuple_c = SpectralTuple::from_parts(basis, eigs_c).unwrap();
        let s_vec: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let lhs = schatten_norm(
            &(&tuple_b.exp_tuple(&s_vec) - &tuple_c.exp_tuple(&s_vec)),
            inf,
        );
        let mut rhs = 0.0;
        for j in 0..n {
            let diff =
                &tuple_b.operator(j).into_matrix() - &tuple_c.operator(j).into_matrix();
            rhs += s_vec[j].abs() * schatten_norm(&diff, inf);
        }
        let slack = lhs - rhs;
        worst_gap = worst_gap.max(slack);
        if slack > cfg.tol_scale * 1e-10 * (1.0 + rhs) {
            passed = false;
        }
    }
    detail.push_str(&format!("exp bound worst slack {worst_gap:.2e}; "));

    // Mollified |t| at zero equals the Gaussian first absolute moment.
    let f = LipschitzFunction::abs();
    let mut worst_moment = 0.0f64;
    for width in [1.0, 10.0, 100.0] {
        let fk = mollify_function(&f, width, 4097).unwrap();
        let gap = (fk.eval(&[0.0]) - gaussian_abs_moment(width)).abs();
        worst_moment = worst_moment.max(gap);
    }
    passed &= worst_moment <= cfg.tol_scale * 1e-8;
    detail.push_str(&format!("moment gap {worst_moment:.2e}; "));

    // Sampled Lipschitz quotient never increases under mollification.
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..1000)
        .map(|_| {
            (
                vec![rng.gen_range(-5.0..5.0)],
                vec![rng.gen_range(-5.0..5.0)],
            )
        })
        .collect();
    let mut quotient_ok = true;
    for f in [
        LipschitzFunction::abs(),
        LipschitzFunction::new(1, "relu", 1.0, |xi: &[f64]| xi[0].max(0.0)),
    ] {
        let base = f.sampled_quotient(&pairs);
        for width in [1.0, 25.0] {
            let fk = mollify_function(&f, width, 1025).unwrap();
            let smooth = fk.sampled_quotient(&pairs);
            quotient_ok &= smooth <= base + cfg.tol_scale * 1e-9;
        }
    }
    passed &= quotient_ok;
    detail.push_str(&format!("quotient monotone: {quotient_ok}"));

    report(
        "exp-bound-and-mollification",
        started,
        passed,
        detail,
    )
}

/// Block embedding turns the Lipschitz ratio into a commutator ratio.
pub fn c08_block_reduction(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(7));
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for trial in 0..100 {
        let d = 2 + trial % 7;
        let x = sampling::random_hermitian(d, &mut rng);
        let y = sampling::random_hermitian(d, &mut rng);
        let f = tuple_functions(1, trial);
        let p = if trial % 10 == 9 {
            NormOrder::infinity()
        } else {
            NormOrder::new(1.0 + rng.gen_range(0.1..15.0)).unwrap()
        };
        let direct = lipschitz_ratio(&f, &x, &y, p).expect("distinct samples");
        let (tuple, swap) = block_embed(&x, &y).expect("same dimension");
        let embedded = commutator_ratio(&f, &tuple, &swap, p).expect("nontrivial");
        let gap = (direct - embedded.ratio).abs();
        let tol = cfg.tol_scale * 1e-10 * direct.max(1.0);
        worst = worst.max(gap / tol);
        if gap > tol {
            failures += 1;
        }
    }
    report(
        "block-reduction",
        started,
        failures == 0,
        format!("100 instances, worst gap {worst:.3e} of tolerance"),
    )
}

/// Ratio trends: the `p = 2` ceiling, growth of the adversarial family in
/// dimension and in exponent, and the consistency of the envelope fit.
pub fn c09_constant_trends(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let mut detail = String::new();
    let mut passed = true;

    let extremal = SweepConfig {
        p_grid: vec![2.0, 4.0, 16.0],
        dims: vec![4, 8, 16, 32, 64, 128, 256],
        seeds: vec![0],
        ensembles: vec!["extremal-abs".into()],
        n: 1,
    };
    let random = SweepConfig {
        p_grid: vec![1.25, 2.0, 4.0, 16.0],
        dims: vec![8, 16],
        seeds: vec![1, 2, 3, 4, 5],
        ensembles: vec!["commuting-gaussian".into(), "hermitian-pairs".into()],
        n: 1,
    };
    let extremal_out = match constant_sweep(&extremal) {
        Ok(out) => out,
        Err(err) => {
            return report("constant-trends", started, false, format!("sweep failed: {err}"));
        }
    };
    let random_out = match constant_sweep(&random) {
        Ok(out) => out,
        Err(err) => {
            return report("constant-trends", started, false, format!("sweep failed: {err}"));
        }
    };
    let all_records: Vec<_> = extremal_out
        .records
        .iter()
        .chain(random_out.records.iter())
        .collect();

    // p = 2 ceiling for unit-Lipschitz data.
    let mut ceiling_ok = true;
    for record in &all_records {
        if record.params.p == Some(2.0) {
            ceiling_ok &= record.results["ratio"] <= 1.0 + cfg.tol_scale * 1e-9;
        }
    }
    passed &= ceiling_ok;
    detail.push_str(&format!("p2 ceiling: {ceiling_ok}; "));

    // Adversarial family: nondecreasing in d at p = 4.
    let mut by_dim: Vec<(usize, f64)> = extremal_out
        .records
        .iter()
        .filter(|r| r.params.p == Some(4.0))
        .map(|r| (r.params.d, r.results["ratio"]))
        .collect();
    by_dim.sort_by_key(|&(d, _)| d);
    let monotone = by_dim.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9);
    passed &= monotone;
    detail.push_str(&format!(
        "monotone in d at p=4: {monotone} (last {:.4}); ",
        by_dim.last().map(|&(_, r)| r).unwrap_or(0.0)
    ));

    // Adversarial family at d = 256: the p = 16 ratio beats the p = 2 one.
    let ratio_at = |p: f64| -> Option<f64> {
        extremal_out
            .records
            .iter()
            .find(|r| r.params.d == 256 && r.params.p == Some(p))
            .map(|r| r.results["ratio"])
    };
    let spread_ok = match (ratio_at(16.0), ratio_at(2.0)) {
        (Some(high), Some(low)) => {
            detail.push_str(&format!("d=256 ratios p16 {high:.4} > p2 {low:.4}; "));
            high > low
        }
        _ => false,
    };
    passed &= spread_ok;

    // Envelope consistency and the reported fit.
    let fitted_c = extremal_out.fitted_c.max(random_out.fitted_c);
    let mut consistent = true;
    for record in &all_records {
        let (Some(p), Some(ratio)) = (record.params.p, record.results.get("ratio")) else {
            continue;
        };
        consistent &= *ratio <= fitted_c * reference_bound(p) + 1e-12;
    }
    passed &= consistent;
    detail.push_str(&format!("fit consistent: {consistent}, c = {fitted_c:.6}"));

    report("constant-trends", started, passed, detail)
}

/// Weak-type harness: interpolation chain on random instances and the
/// segment maximizer of the `M_{1,inf}` functional against a brute-force
/// grid scan.
pub fn c10_weak_type(cfg: &SuiteConfig) -> CheckReport {
    let started = Instant::now();
    let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(9));
    let mut passed = true;
    let mut detail = String::new();

    let mut worst_violation = f64::NEG_INFINITY;
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let d = 8 + trial % 25; // up to 32
        let (_, s) = sampling::random_commuting_tuple(n, d, -1.5, 1.5, &mut rng);
        let x = sampling::ginibre(d, &mut rng);
        let f = tuple_functions(n, trial);
        match weak_type_experiment(&f, &s, &x) {
            Ok(record) => {
                worst_violation = worst_violation.max(record.results["holder_max_violation"]);
            }
            Err(err) => {
                passed = false;
                detail.push_str(&format!("instance {trial} failed: {err}; "));
            }
        }
    }
    passed &= worst_violation <= cfg.tol_scale * 1e-10;
    detail.push_str(&format!("worst chain violation {worst_violation:.2e}; "));

    // Segment maximizer against a dense scan.
    let mut worst_scan = 0.0f64;
    for _ in 0..100 {
        let d = rng.gen_range(1..24);
        let mut values: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..3.0)).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        let profile = SingularProfile::new(values);
        let fast = profile.m1_infinity();
        let mut scan: f64 = 0.0;
        let steps_per_unit = 2000usize;
        let t_max = d as f64 + 5.0;
        for i in 1..=(t_max * steps_per_unit as f64) as usize {
            let t = i as f64 / steps_per_unit as f64;
            scan = scan.max(profile.partial_integral(t) / (1.0 + t).ln());
        }
        worst_scan = worst_scan.max((fast - scan).abs());
    }
    passed &= worst_scan <= cfg.tol_scale * 1e-6;
    detail.push_str(&format!("scan gap {worst_scan:.2e}"));

    report("weak-type", started, passed, detail)
}

/// Extra per-module invariants exercised by the `verify` subcommand on top
/// of the ten core checks.
pub fn module_invariants(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut out = Vec::new();
    let d = cfg.dim.clamp(4, 64);

    // Unitary invariance and Hoelder for the Schatten norms.
    {
        let started = Instant::now();
        let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(20));
        let mut passed = true;
        for trial in 0..20 {
            let x = sampling::ginibre(d, &mut rng);
            let u = sampling::random_unitary(d, &mut rng);
            let v = sampling::random_unitary(d, &mut rng);
            let p = NormOrder::new(1.0 + (trial as f64) * 0.5).unwrap();
            let plain = schatten_norm(&x, p);
            let rotated = schatten_norm(&(&(&u * &x) * &v), p);
            passed &= (plain - rotated).abs() <= 1e-10 * plain.max(1.0);

            let y = sampling::ginibre(d, &mut rng);
            let lhs = trace_product(&x, &y).unwrap().norm();
            let rhs = schatten_norm(&x, p) * schatten_norm(&y, p.conjugate());
            passed &= lhs <= rhs * (1.0 + 1e-9);
        }
        out.push(report(
            "norm-invariance-and-hoelder",
            started,
            passed,
            format!("20 samples at d = {d}"),
        ));
    }

    // Bounded inclusion of the rearrangement functionals.
    {
        let started = Instant::now();
        let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(21));
        let mut passed = true;
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let dim = rng.gen_range(1..32);
            let mut values: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..2.0)).collect();
            values.sort_by(|a, b| b.total_cmp(a));
            let profile = SingularProfile::new(values);
            let weak = profile.weak_l1();
            let m1 = profile.m1_infinity();
            if weak > 0.0 {
                worst = worst.max(m1 / weak);
            }
            passed &= m1 <= 1.6 * weak + 1e-12;
        }
        out.push(report(
            "rearrangement-inclusion",
            started,
            passed,
            format!("max m1inf/weak ratio {worst:.4} <= 1.6"),
        ));
    }

    // Kernel multiplicativity of the Schur representation.
    {
        let started = Instant::now();
        let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(22));
        let mut passed = true;
        for _ in 0..10 {
            let (_, s) = sampling::random_commuting_tuple(2, 8, -1.0, 1.0, &mut rng);
            let x = sampling::ginibre(8, &mut rng);
            let f = tuple_functions(2, 0);
            let (_, phi_f) = divided_difference_symbols(&f);
            let (_, phi_1) = doi::direction_symbols(1, 2).unwrap();
            let product = phi_f.pointwise_product(&phi_1).unwrap();
            let joint = doi_apply(&s, &product, &x).unwrap();
            let composed = doi_apply(&s, &phi_f, &doi_apply(&s, &phi_1, &x).unwrap()).unwrap();
            passed &= (&joint - &composed).max_abs() <= 1e-12 * (1.0 + x.max_abs());
        }
        out.push(report(
            "kernel-multiplicativity",
            started,
            passed,
            "pointwise products compose exactly".to_string(),
        ));
    }

    // Diagonal cutoff: beyond the minimal eigenvalue gap the cutoff kernel
    // reproduces the off-diagonal pairing exactly.
    {
        let started = Instant::now();
        let mut rng = sampling::rng_from_seed(cfg.seed.wrapping_add(23));
        let mut passed = true;
        for _ in 0..10 {
            let (_, s) = sampling::random_commuting_tuple(2, 8, -1.0, 1.0, &mut rng);
            let x = sampling::ginibre(8, &mut rng);
            let y = doi::offdiag_project(&s, &x).unwrap();
            let z = sampling::ginibre(8, &mut rng);
            let f = tuple_functions(2, 2);
            let (_, phi_f) = divided_difference_symbols(&f);
            let min_gap = {
                let mut gap = f64::INFINITY;
                for a in 0..8 {
                    for b in 0..8 {
                        if s.eig(a) != s.eig(b) {
                            let dist: f64 = s
                                .eig(a)
                                .iter()
                                .zip(s.eig(b))
                                .map(|(p, q)| (p - q) * (p - q))
                                .sum::<f64>()
                                .sqrt();
                            gap = gap.min(dist);
                        }
                    }
                }
                gap
            };
            let full = trace_pairing(&z, &phi_f, &y, &s).unwrap();
            // Cutoff inside the minimal gap changes nothing.
            let cutoff = ScalarSymbol2n::radial_cutoff(2, min_gap * 0.5);
            let masked = doi_apply(&s, &cutoff, &y).unwrap();
            let paired = trace_pairing(&z, &phi_f, &masked, &s).unwrap();
            passed &= (full - paired).norm() <= 1e-11 * (1.0 + full.norm());
            // A cutoff beyond the diameter kills everything.
            let blunt = ScalarSymbol2n::radial_cutoff(2, 1e6);
            let killed = doi_apply(&s, &blunt, &y).unwrap();
            passed &= killed.max_abs() <= 1e-14 * (1.0 + y.max_abs());
        }
        out.push(report(
            "diagonal-cutoff",
            started,
            passed,
            "cutoff inside the spectral gap is lossless".to_string(),
        ));
    }

    // Declared symbol flags.
    {
        let started = Instant::now();
        let bump = BumpProfile::shared();
        let mut passed = true;
        for symbol in [
            MultiplierSymbol::hilbert(3),
            MultiplierSymbol::riesz(1, 3).unwrap(),
            MultiplierSymbol::truncated_sign(2),
            MultiplierSymbol::cone_ratio(2),
            MultiplierSymbol::directional(2, 2).unwrap(),
            MultiplierSymbol::smooth_directional(1, 2, bump).unwrap(),
        ] {
            passed &= symbol.check_flags(cfg.seed, 200, 1e-10).is_ok();
        }
        out.push(report(
            "symbol-flags",
            started,
            passed,
            "parity and homogeneity sampled on the symbol zoo".to_string(),
        ));
    }

    out
}

/// The ten core checks in order.
pub fn core_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    vec![
        c01_commutator_identity(cfg),
        c02_factorization(cfg),
        c03_symbol_oracles(cfg),
        c04_region_identity(cfg),
        c05_transference(cfg),
        c06_discretization_convergence(cfg),
        c07_exponential_bound_and_mollification(cfg),
        c08_block_reduction(cfg),
        c09_constant_trends(cfg),
        c10_weak_type(cfg),
    ]
}

/// Everything `verify` runs: the core checks plus module invariants.
pub fn run_all(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut reports = core_checks(cfg);
    reports.extend(module_invariants(cfg));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_slope_of_line() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert!((regression_slope(&pts) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn module_invariants_pass() {
        let cfg = SuiteConfig {
            seed: 7,
            dim: 8,
            tol_scale: 1.0,
        };
        for check in module_invariants(&cfg) {
            assert!(check.passed, "{}", check.line());
        }
    }
}
