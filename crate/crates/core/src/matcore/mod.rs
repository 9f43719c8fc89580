//! Dense matrix kernel: ranks with an explicit tolerance policy, spectra,
//! Krylov blocks, basis completion and the core-nilpotent split.

mod basis;
pub(crate) mod exact;
mod krylov;
mod matrix;
mod rank;
pub(crate) mod span;
mod spectrum;
mod svd;
mod tolerance;

pub use basis::{core_nilpotent, extend_to_basis, CoreNilpotent};
pub use krylov::{controllability_matrix, min_poly_degree};
pub use matrix::{Complex64, ComplexMatrix, Matrix};
pub use rank::rank;
pub use spectrum::{
    eigen_clusters, eigenvalues, eigenvector, max_geometric_multiplicity, EigenCluster,
};
pub use tolerance::Tolerance;

pub(crate) use basis::{core_nilpotent_of, extend_to_basis_of};
pub(crate) use krylov::{krylov_blocks, min_poly_degree_of, power_blocks};
pub(crate) use matrix::{pencil, select_columns, shifted, to_complex};
pub(crate) use rank::{rank_against, rank_complex_against, rank_of};
pub(crate) use svd::svd_of;
pub(crate) use spectrum::{
    clusters_of, geometric_multiplicity_of, smallest_right_singular_vector, spectral_radius,
};
