//! Seeded generators for test matrices and commuting tuples.
//!
//! Everything here is deterministic given the RNG state; experiment code
//! passes seeds explicitly so runs can be reproduced byte for byte.

use crate::matrix::{CMat, ComplexMatrix, HermitianMatrix, C64};
use crate::spectral::SpectralTuple;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; avoids a rand_distr dependency.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Matrix with iid complex Gaussian entries.
pub fn ginibre(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let data = CMat::from_fn(dim, dim, |_, _| {
        C64::new(standard_normal(rng), standard_normal(rng))
    });
    ComplexMatrix::from_dmatrix_unchecked(data)
}

/// Haar-like random unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let qr = ginibre(dim, rng).into_dmatrix().qr();
    ComplexMatrix::from_dmatrix_unchecked(qr.q())
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let g = ginibre(dim, rng);
    let h = (&g + &g.adjoint()).scale(C64::new(0.5, 0.0));
    HermitianMatrix::symmetrize(&h)
}

/// Commuting Hermitian tuple built from one random unitary and independent
/// eigenvalue vectors drawn uniformly from `[lo, hi]`.
pub fn random_commuting_tuple(
    n: usize,
    dim: usize,
    lo: f64,
    hi: f64,
    rng: &mut impl Rng,
) -> (Vec<HermitianMatrix>, SpectralTuple) {
    let basis = random_unitary(dim, rng);
    let eigs: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..n).map(|_| rng.gen_range(lo..hi)).collect())
        .collect();
    let tuple = SpectralTuple::from_parts(basis, eigs).expect("random basis is unitary");
    let matrices = (0..n).map(|j| tuple.operator(j)).collect();
    (matrices, tuple)
}

/// Random matrix with zero block-diagonal relative to the atoms of `s`
/// (indices with equal joint eigenvalue vectors form one atom).
pub fn random_off_diagonal(s: &SpectralTuple, rng: &mut impl Rng) -> ComplexMatrix {
    let d = s.dim();
    let mut in_basis = CMat::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            if s.eig(a) != s.eig(b) {
                in_basis[(a, b)] = C64::new(standard_normal(rng), standard_normal(rng));
            }
        }
    }
    s.from_eigenbasis(&ComplexMatrix::from_dmatrix_unchecked(in_basis))
}
