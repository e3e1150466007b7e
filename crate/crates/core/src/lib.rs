//! Multipartite dependence: the worst-case conditional mutual information between
//! any two parties of a classical distribution or quantum state, given all others.
//!
//! The crate covers the numerics end to end: dense density operators and their
//! entropies, the dependence itself, the reference states and channels it is
//! usually evaluated on, a quantum secret-sharing scheme built from
//! (N−1)-uniform states, and an optimizer over local measurements.

pub mod channels;
pub mod dependence;
pub mod error;
pub mod formats;
pub mod golden;
pub mod info;
pub mod matrix;
pub mod measure;
pub mod secret;
pub mod state;
pub mod verify;
pub mod zoo;

pub use error::{Error, Result};
pub use info::ProbTensor;
pub use matrix::{ComplexMatrix, C64};
pub use state::{random_density, random_state_vector, DensityOperator, GroupedState, StateVector};
