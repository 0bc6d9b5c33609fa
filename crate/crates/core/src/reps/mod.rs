//! Representations of `ℓ¹(Σ)`.
//!
//! * [`periodic`]: the `p`-dimensional representations `π_{x,λ}` attached to
//!   a point `x` of period `p` and `λ ∈ T`, with irreducibility and
//!   equivalence tests.
//! * [`sequence`]: the representations `π^p_x` on two-sided sequences
//!   attached to an aperiodic point, the constructive density solver and
//!   basis-vector extraction.

pub mod periodic;
pub mod sequence;

pub use periodic::{
    commutant_dimension, commutant_dimension_of_set, delta_matrix, explicit_intertwiner,
    find_intertwiner, periodic_rep_matrix, rep_generators, PeriodicRep,
};
pub use sequence::{
    aperiodic_apply, density_solve, density_solve_onestep, extract_basis_vector, BasisExtraction,
    BumpShape, DensitySolution, LpOrder, SeqVector, SolveOptions, Truncation,
};
