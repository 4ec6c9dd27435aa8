//! Finite-dimensional workbench for double operator integrals, Schur
//! multipliers, explicit Fourier multiplier symbols and their transference
//! to operator-valued trigonometric polynomials on the torus.
//!
//! The crate is organized around five subsystems:
//!
//! * [`matrix`] / [`norms`] / [`spectral`] — dense complex matrices,
//!   Hermitian spectral calculus and Schatten / rearrangement functionals;
//! * [`doi`] — double operator integrals realized as Schur multipliers in a
//!   joint eigenbasis, with discretization and mollification procedures;
//! * [`symbols`] — closed forms for a family of multipliers on `R^{n+1}`
//!   together with independent quadrature oracles and discrete restriction;
//! * [`transference`] — operator-valued trigonometric polynomials, the
//!   unitary lift of a matrix along a grid function, and the exact identity
//!   relating the discrete multiplier action to a product of double
//!   operator integrals;
//! * [`experiments`] — ratio experiments estimating the operator Lipschitz
//!   constant on Schatten classes, with a weak-type harness.
//!
//! [`suite`] bundles the identity and property checks used both by the
//! acceptance tests and by the `verify` subcommand of the CLI.

pub mod doi;
pub mod experiments;
pub mod matrix;
pub mod norms;
pub mod quad;
pub mod sampling;
pub mod spectral;
pub mod suite;
pub mod symbols;
pub mod transference;

pub use matrix::{ComplexMatrix, HermitianMatrix, MatrixError, C64};
pub use norms::{rearrangement_norms, schatten_norm, zeta_profile, NormOrder, SingularProfile};
pub use spectral::{joint_diagonalize, SpectralError, SpectralTuple, Tolerances};
