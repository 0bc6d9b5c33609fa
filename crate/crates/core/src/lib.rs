//! Computable Banach algebras `ℓ¹(Σ)` attached to topological dynamical
//! systems `Σ = (X, σ)`.
//!
//! The crate models three kinds of systems (finite permutations, rational
//! rotations of the circle, and a single aperiodic orbit), represents finitely
//! supported elements `Σ fₙδⁿ` exactly or in double precision, and builds on
//! that:
//!
//! * [`algebra`]: twisted convolution, involution, norms, restriction;
//! * [`reps`]: the finite dimensional representations attached to periodic
//!   points, the sequence-space representations attached to aperiodic points,
//!   and the constructive density solver;
//! * [`ideals`]: primitive-ideal membership through strand sums, radical
//!   witnesses, inclusions and representation-level spectra;
//! * [`sspace`]: hull-kernel closures, Wiener witnesses and structure-space
//!   descriptions;
//! * [`io`]: the JSON formats shared with the command line front-end.

pub mod algebra;
pub mod dynsys;
mod error;
pub mod function;
pub mod ideals;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod reps;
pub mod scalar;
pub mod sspace;

pub use algebra::AlgebraElement;
pub use dynsys::{DynSystem, Orbit, Point, SystemPredicates};
pub use error::{Error, Result};
pub use function::FunctionOnX;
pub use matrix::ComplexMatrix;
pub use scalar::{GaussianRational, Scalar, C64};
