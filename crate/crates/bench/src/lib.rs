//! Shared fixtures for the kernel benchmarks.

use doilab_core::matrix::ComplexMatrix;
use doilab_core::sampling;
use doilab_core::spectral::SpectralTuple;
use doilab_core::transference::GridFunction;

/// Commuting pair plus a Ginibre test matrix at the given dimension.
pub fn doi_fixture(dim: usize) -> (SpectralTuple, ComplexMatrix) {
    let mut rng = sampling::rng_from_seed(2024);
    let (_, tuple) = sampling::random_commuting_tuple(2, dim, -2.0, 2.0, &mut rng);
    let x = sampling::ginibre(dim, &mut rng);
    (tuple, x)
}

/// Grid-aligned instance for the transference benchmark.
pub fn transference_fixture(
    dim: usize,
) -> (SpectralTuple, GridFunction, ComplexMatrix) {
    use doilab_core::matrix::{CMat, C64};
    use rand::Rng;

    let mut rng = sampling::rng_from_seed(4096);
    let resolution = 4u32;
    let bins: Vec<Vec<i64>> = (0..dim)
        .map(|_| vec![rng.gen_range(-8i64..8), rng.gen_range(-8i64..8)])
        .collect();
    let basis = sampling::random_unitary(dim, &mut rng);
    let eigs: Vec<Vec<f64>> = bins
        .iter()
        .map(|bin| bin.iter().map(|&k| k as f64 / resolution as f64).collect())
        .collect();
    let tuple = SpectralTuple::from_parts(basis, eigs).expect("unitary basis");
    let g = GridFunction::sample_lipschitz(&bins, resolution, 8, &mut rng);
    let mut in_basis = CMat::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            if bins[a] != bins[b] {
                in_basis[(a, b)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }
    let y = tuple.from_eigenbasis(&ComplexMatrix::new(in_basis).expect("finite"));
    (tuple, g, y)
}
