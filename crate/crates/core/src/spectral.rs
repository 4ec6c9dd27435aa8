//! Joint spectral calculus for commuting Hermitian tuples.
//!
//! A [`SpectralTuple`] stores one unitary eigenbasis `U` and, per basis
//! column, the joint eigenvalue vector of the tuple. It encodes a compactly
//! supported atomic spectral measure on `R^n`: the atom at a joint
//! eigenvalue is the orthogonal projection onto the corresponding columns.

use crate::matrix::{CMat, ComplexMatrix, HermitianMatrix, C64};
use nalgebra::SymmetricEigen;
use rand_chacha::ChaCha8Rng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("tuple must contain at least one operator")]
    EmptyTuple,
    #[error("operators have mismatched dimensions: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operators {i} and {j} do not commute: |[A_i, A_j]| = {norm:.3e} > {tolerance:.3e}")]
    NonCommuting {
        i: usize,
        j: usize,
        norm: f64,
        tolerance: f64,
    },
    #[error("failed to separate joint eigenvalues after {attempts} randomized attempts")]
    DegenerateFailure { attempts: usize },
    #[error("basis is not unitary: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotUnitary { deviation: f64, tolerance: f64 },
    #[error("eigenvalue table must provide one vector of length {n} per basis column")]
    MalformedEigenvalues { n: usize },
    #[error("function index {j} out of range for an {n}-tuple")]
    IndexOutOfRange { j: usize, n: usize },
}

/// Numerical gates used by the spectral routines. Defaults follow the
/// crate-wide convention of `1e-9`-relative accuracy for dimensions up to 64.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative bound on pairwise commutators of the input tuple.
    pub commute: f64,
    /// Bound on `|U*U - I|` for an accepted eigenbasis.
    pub unitary: f64,
    /// Relative bound on `|U diag U* - A|` for an accepted diagonalization.
    pub reconstruction: f64,
    /// Relative spectral gap below which eigenvalues of a random
    /// combination are grouped into one cluster and refined recursively.
    pub cluster_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            commute: 1e-9,
            unitary: 1e-10,
            reconstruction: 1e-9,
            cluster_gap: 1e-8,
        }
    }
}

/// `n` commuting Hermitian matrices presented through a shared eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralTuple {
    n: usize,
    dim: usize,
    basis: ComplexMatrix,
    /// Row `a` is the joint eigenvalue vector attached to basis column `a`.
    eigs: Vec<Vec<f64>>,
}

impl SpectralTuple {
    /// Builds a tuple from an explicit eigenbasis and eigenvalue table.
    pub fn from_parts(basis: ComplexMatrix, eigs: Vec<Vec<f64>>) -> Result<Self, SpectralError> {
        let dim = basis.dim();
        let deviation = basis.unitary_deviation();
        let tolerance = Tolerances::default().unitary;
        if deviation > tolerance {
            return Err(SpectralError::NotUnitary {
                deviation,
                tolerance,
            });
        }
        if eigs.len() != dim || eigs.is_empty() {
            return Err(SpectralError::MalformedEigenvalues {
                n: eigs.first().map_or(0, Vec::len),
            });
        }
        let n = eigs[0].len();
        if n == 0 || eigs.iter().any(|row| row.len() != n) {
            return Err(SpectralError::MalformedEigenvalues { n });
        }
        Ok(Self {
            n,
            dim,
            basis,
            eigs,
        })
    }

    /// Spectral data of a single Hermitian matrix (ascending eigenvalues).
    pub fn from_hermitian(a: &HermitianMatrix) -> Result<Self, SpectralError> {
        joint_diagonalize(std::slice::from_ref(a), 0)
    }

    pub fn operators(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn eig(&self, index: usize) -> &[f64] {
        &self.eigs[index]
    }

    pub fn eigs(&self) -> &[Vec<f64>] {
        &self.eigs
    }

    /// Reconstructs the `j`-th operator `U diag(lambda_j) U*` (0-based `j`).
    pub fn operator(&self, j: usize) -> HermitianMatrix {
        let diag: Vec<f64> = self.eigs.iter().map(|row| row[j]).collect();
        self.conjugate_real_diagonal(&diag)
    }

    /// Functional calculus `f(A) = U diag(f(lambda^(a))) U*`.
    pub fn apply_function(&self, f: impl Fn(&[f64]) -> f64) -> HermitianMatrix {
        let diag: Vec<f64> = self.eigs.iter().map(|row| f(row)).collect();
        self.conjugate_real_diagonal(&diag)
    }

    /// Unitary `exp(i s . A) = U diag(exp(i s . lambda^(a))) U*`.
    pub fn exp_tuple(&self, s: &[f64]) -> ComplexMatrix {
        assert_eq!(s.len(), self.n, "direction vector length mismatch");
        let u = self.basis.as_dmatrix();
        let mut phased = u.clone();
        for a in 0..self.dim {
            let phase: f64 = s.iter().zip(&self.eigs[a]).map(|(si, li)| si * li).sum();
            let factor = C64::new(phase.cos(), phase.sin());
            for r in 0..self.dim {
                phased[(r, a)] *= factor;
            }
        }
        ComplexMatrix::from_dmatrix_unchecked(phased * u.adjoint())
    }

    /// `U* x U`: coordinates of `x` in the joint eigenbasis.
    pub fn to_eigenbasis(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let u = self.basis.as_dmatrix();
        ComplexMatrix::from_dmatrix_unchecked(u.adjoint() * x.as_dmatrix() * u)
    }

    /// Inverse of [`Self::to_eigenbasis`].
    pub fn from_eigenbasis(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let u = self.basis.as_dmatrix();
        ComplexMatrix::from_dmatrix_unchecked(u * x.as_dmatrix() * u.adjoint())
    }

    fn conjugate_real_diagonal(&self, diag: &[f64]) -> HermitianMatrix {
        let u = self.basis.as_dmatrix();
        let mut scaled = u.clone();
        for a in 0..self.dim {
            let factor = C64::new(diag[a], 0.0);
            for r in 0..self.dim {
                scaled[(r, a)] *= factor;
            }
        }
        HermitianMatrix::symmetrize(&ComplexMatrix::from_dmatrix_unchecked(scaled * u.adjoint()))
    }
}

/// Finds a joint eigenbasis for a commuting Hermitian tuple.
///
/// A random generic linear combination of the tuple is diagonalized first;
/// near-degenerate eigenvalue clusters of the combination are refined by
/// recursive sub-diagonalization. Coefficients are redrawn (up to five
/// times) if the reconstruction residual does not meet the tolerance.
/// Output columns are ordered lexicographically by joint eigenvalue vector,
/// ties broken by the pre-sort column index.
pub fn joint_diagonalize(
    tuple: &[HermitianMatrix],
    seed: u64,
) -> Result<SpectralTuple, SpectralError> {
    joint_diagonalize_with(tuple, seed, Tolerances::default())
}

pub fn joint_diagonalize_with(
    tuple: &[HermitianMatrix],
    seed: u64,
    tol: Tolerances,
) -> Result<SpectralTuple, SpectralError> {
    if tuple.is_empty() {
        return Err(SpectralError::EmptyTuple);
    }
    let dim = tuple[0].dim();
    for a in tuple {
        if a.dim() != dim {
            return Err(SpectralError::DimensionMismatch {
                left: dim,
                right: a.dim(),
            });
        }
    }
    let scales: Vec<f64> = tuple.iter().map(|a| a.as_matrix().max_abs()).collect();
    for i in 0..tuple.len() {
        for j in (i + 1)..tuple.len() {
            let comm =
                ComplexMatrix::commutator(tuple[i].as_matrix(), tuple[j].as_matrix()).unwrap();
            let norm = comm.max_abs();
            let tolerance = tol.commute * (1.0 + scales[i] * scales[j]);
            if norm > tolerance {
                return Err(SpectralError::NonCommuting {
                    i,
                    j,
                    norm,
                    tolerance,
                });
            }
        }
    }

    let mats: Vec<CMat> = tuple
        .iter()
        .map(|a| a.as_matrix().as_dmatrix().clone())
        .collect();
    let scale = scales.iter().copied().fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    const ATTEMPTS: usize = 5;
    for _ in 0..ATTEMPTS {
        let (u, eigs) = refine(&mats, &mut rng, &tol, 0)?;
        let (u, eigs) = canonical_order(u, eigs);
        let candidate = SpectralTuple::from_parts(ComplexMatrix::from_dmatrix_unchecked(u), eigs)?;
        let residual = reconstruction_residual(&candidate, tuple);
        if residual <= tol.reconstruction * (1.0 + scale) {
            return Ok(candidate);
        }
    }
    Err(SpectralError::DegenerateFailure { attempts: ATTEMPTS })
}

fn reconstruction_residual(candidate: &SpectralTuple, tuple: &[HermitianMatrix]) -> f64 {
    (0..tuple.len())
        .map(|j| {
            (&candidate.operator(j).into_matrix() - tuple[j].as_matrix()).max_abs()
        })
        .fold(0.0, f64::max)
}

fn canonical_order(u: CMat, eigs: Vec<Vec<f64>>) -> (CMat, Vec<Vec<f64>>) {
    let dim = eigs.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        for (x, y) in eigs[a].iter().zip(&eigs[b]) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut u_sorted = CMat::zeros(dim, dim);
    let mut eigs_sorted = Vec::with_capacity(dim);
    for (new_col, &old_col) in order.iter().enumerate() {
        u_sorted.set_column(new_col, &u.column(old_col));
        eigs_sorted.push(eigs[old_col].clone());
    }
    (u_sorted, eigs_sorted)
}

/// Recursive sub-diagonalization of a commuting tuple given in some basis.
/// Returns a unitary and the joint eigenvalue rows in its column order.
fn refine(
    mats: &[CMat],
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
    depth: usize,
) -> Result<(CMat, Vec<Vec<f64>>), SpectralError> {
    let n = mats.len();
    let dim = mats[0].nrows();
    if dim == 1 {
        let row: Vec<f64> = mats.iter().map(|m| m[(0, 0)].re).collect();
        return Ok((CMat::identity(1, 1), vec![row]));
    }

    // Base case: every operator is (numerically) a multiple of the
    // identity, i.e. the subspace is a single joint atom.
    if let Some(row) = scalar_row(mats) {
        return Ok((CMat::identity(dim, dim), vec![row; dim]));
    }

    const ATTEMPTS: usize = 5;
    const MAX_DEPTH: usize = 64;
    if depth > MAX_DEPTH {
        return Err(SpectralError::DegenerateFailure { attempts: 0 });
    }

    for _ in 0..ATTEMPTS {
        let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut combo = CMat::zeros(dim, dim);
        for (c, m) in coeffs.iter().zip(mats) {
            combo += m.map(|v| v * C64::new(*c, 0.0));
        }
        let combo = hermitian_part(&combo);
        let eig = SymmetricEigen::new(combo);

        // Sort the combination spectrum ascending for gap-based clustering.
        let mut idx: Vec<usize> = (0..dim).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let w_max = idx
            .iter()
            .map(|&i| eig.eigenvalues[i].abs())
            .fold(0.0, f64::max);
        let gap = tol.cluster_gap * (1.0 + w_max);

        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &i in &idx {
            match clusters.last_mut() {
                Some(cluster)
                    if eig.eigenvalues[i] - eig.eigenvalues[*cluster.last().unwrap()] <= gap =>
                {
                    cluster.push(i)
                }
                _ => clusters.push(vec![i]),
            }
        }
        if clusters.len() == 1 {
            // The combination failed to separate anything; redraw.
            continue;
        }

        let mut u = CMat::zeros(dim, dim);
        let mut eigs: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut col = 0;
        for cluster in &clusters {
            let m = cluster.len();
            let mut u_cluster = CMat::zeros(dim, m);
            for (c, &i) in cluster.iter().enumerate() {
                u_cluster.set_column(c, &eig.eigenvectors.column(i));
            }
            if m == 1 {
                for (r, v) in u_cluster.column(0).iter().enumerate() {
                    u[(r, col)] = *v;
                }
                let row: Vec<f64> = mats
                    .iter()
                    .map(|a| (u_cluster.adjoint() * a * &u_cluster)[(0, 0)].re)
                    .collect();
                eigs.push(row);
                col += 1;
            } else {
                let sub: Vec<CMat> = mats
                    .iter()
                    .map(|a| hermitian_part(&(u_cluster.adjoint() * a * &u_cluster)))
                    .collect();
                let (v, sub_eigs) = refine(&sub, rng, tol, depth + 1)?;
                let lifted = &u_cluster * v;
                for c in 0..m {
                    for r in 0..dim {
                        u[(r, col + c)] = lifted[(r, c)];
                    }
                }
                eigs.extend(sub_eigs);
                col += m;
            }
        }
        return Ok((u, eigs));
    }
    Err(SpectralError::DegenerateFailure { attempts: ATTEMPTS })
}

fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|v| v * C64::new(0.5, 0.0))
}

/// If all matrices are multiples of the identity (within a tolerance tied
/// to their size), returns the common joint eigenvalue row.
fn scalar_row(mats: &[CMat]) -> Option<Vec<f64>> {
    let dim = mats[0].nrows();
    let mut row = Vec::with_capacity(mats.len());
    for m in mats {
        let mean: f64 = (0..dim).map(|i| m[(i, i)].re).sum::<f64>() / dim as f64;
        let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let tol = 1e-10 * (1.0 + scale);
        for r in 0..dim {
            for c in 0..dim {
                let expected = if r == c {
                    C64::new(mean, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                if (m[(r, c)] - expected).norm() > tol {
                    return None;
                }
            }
        }
        row.push(mean);
    }
    Some(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    #[test]
    fn already_diagonal_pair() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = HermitianMatrix::from_real_diagonal(&[3.0, 4.0]);
        let s = joint_diagonalize(&[a, b], 42).unwrap();
        assert_eq!(s.eig(0), &[1.0, 3.0]);
        assert_eq!(s.eig(1), &[2.0, 4.0]);
        // Basis is the identity up to permutation and phase.
        let u = s.basis();
        for col in 0..2 {
            let mut mags: Vec<f64> = (0..2).map(|r| u.get(r, col).norm()).collect();
            mags.sort_by(f64::total_cmp);
            assert!(mags[0] < 1e-12 && (mags[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_random_hermitian_reconstructs() {
        let mut rng = sampling::rng_from_seed(5);
        let a = sampling::random_hermitian(8, &mut rng);
        let s = joint_diagonalize(std::slice::from_ref(&a), 1).unwrap();
        let err = (&s.operator(0).into_matrix() - a.as_matrix()).max_abs();
        assert!(err <= 1e-10 * (1.0 + a.as_matrix().max_abs()), "err {err}");
    }

    #[test]
    fn non_commuting_rejected() {
        let sx = HermitianMatrix::new(
            ComplexMatrix::from_fn(2, |r, c| {
                if r != c {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .unwrap(),
        )
        .unwrap();
        let sz = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            joint_diagonalize(&[sx, sz], 0),
            Err(SpectralError::NonCommuting { .. })
        ));
    }

    #[test]
    fn commuting_tuple_with_shared_degeneracies() {
        // First operator has a degenerate eigenvalue that the second splits.
        let a = HermitianMatrix::from_real_diagonal(&[1.0, 1.0, 2.0]);
        let b = HermitianMatrix::from_real_diagonal(&[0.0, 5.0, 5.0]);
        let s = joint_diagonalize(&[a.clone(), b.clone()], 3).unwrap();
        assert_eq!(s.eigs().len(), 3);
        let err_a = (&s.operator(0).into_matrix() - a.as_matrix()).max_abs();
        let err_b = (&s.operator(1).into_matrix() - b.as_matrix()).max_abs();
        assert!(err_a < 1e-10 && err_b < 1e-10);
        // Lexicographic order of the joint eigenvalues.
        assert_eq!(s.eig(0), &[1.0, 0.0]);
        assert_eq!(s.eig(1), &[1.0, 5.0]);
        assert_eq!(s.eig(2), &[2.0, 5.0]);
    }

    #[test]
    fn random_commuting_tuple_roundtrip() {
        let mut rng = sampling::rng_from_seed(19);
        let (mats, _) = sampling::random_commuting_tuple(3, 12, -2.0, 2.0, &mut rng);
        let s = joint_diagonalize(&mats, 77).unwrap();
        for (j, a) in mats.iter().enumerate() {
            let err = (&s.operator(j).into_matrix() - a.as_matrix()).max_abs();
            assert!(err < 1e-9, "operator {j}: err {err}");
        }
        // Canonical order: lexicographically ascending rows.
        for w in s.eigs().windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn apply_function_coordinate_and_constant() {
        let mut rng = sampling::rng_from_seed(23);
        let (mats, _) = sampling::random_commuting_tuple(2, 6, -1.0, 1.0, &mut rng);
        let s = joint_diagonalize(&mats, 5).unwrap();
        let back = s.apply_function(|xi| xi[1]);
        let err = (&back.into_matrix() - mats[1].as_matrix()).max_abs();
        assert!(err < 1e-10);

        let c = s.apply_function(|_| 2.5);
        let expected = ComplexMatrix::identity(6).scale(C64::new(2.5, 0.0));
        assert!((&c.into_matrix() - &expected).max_abs() < 1e-10);
    }

    #[test]
    fn apply_function_square_on_diagonal() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0, 2.0]);
        let s = SpectralTuple::from_hermitian(&a).unwrap();
        let sq = s.apply_function(|xi| xi[0] * xi[0]);
        let expected = ComplexMatrix::diagonal(&[1.0, 4.0]);
        assert!((&sq.into_matrix() - &expected).max_abs() < 1e-12);
    }

    #[test]
    fn exp_tuple_identities() {
        let a = HermitianMatrix::from_real_diagonal(&[0.0, std::f64::consts::PI]);
        let s = SpectralTuple::from_hermitian(&a).unwrap();
        let at_zero = s.exp_tuple(&[0.0]);
        assert!((&at_zero - &ComplexMatrix::identity(2)).max_abs() < 1e-12);
        let at_one = s.exp_tuple(&[1.0]);
        let expected = ComplexMatrix::diagonal(&[1.0, -1.0]);
        assert!((&at_one - &expected).max_abs() < 1e-12);
        assert!(at_one.unitary_deviation() < 1e-10);
    }

    #[test]
    fn multiplicative_functional_calculus() {
        let mut rng = sampling::rng_from_seed(31);
        let (mats, _) = sampling::random_commuting_tuple(2, 8, -1.5, 1.5, &mut rng);
        let s = joint_diagonalize(&mats, 9).unwrap();
        let f = |xi: &[f64]| xi[0].sin() + xi[1];
        let g = |xi: &[f64]| xi[0] * xi[1] - 0.5;
        let lhs = s.apply_function(f).into_matrix();
        let rhs = s.apply_function(g).into_matrix();
        let prod = s.apply_function(|xi| f(xi) * g(xi)).into_matrix();
        let scale = lhs.max_abs() * rhs.max_abs();
        assert!((&(&lhs * &rhs) - &prod).max_abs() <= 1e-10 * (1.0 + scale));
    }
}
