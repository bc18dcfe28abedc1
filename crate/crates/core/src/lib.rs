//! Exact enumeration of two-term qubit superposition states.
//!
//! For every pair of computational basis states the crate computes local
//! magnetizations, the average magnetization `m`, the Edwards-Anderson order
//! parameter `q_ea` and single-site-cut negativities, and classifies the
//! equal-weight superposition as spin glass (SG), paramagnet (PM),
//! ferromagnet (FM) or antiferromagnet (AFM).
//!
//! - [`state`]: basis states, superpositions, `{C, e, g}` ensemble words.
//! - [`observables`]: magnetization and `q_ea`, closed form and dense oracle.
//! - [`entanglement`]: partial transpose, negativity, GHZ clusters, partial trace.
//! - [`hamiltonian`]: Gaussian couplings, energies, frustration census.
//! - [`atlas`]: the full pair grid, phase counts, scatter, linear law, recursion.
//! - [`export`]: JSON / CSV writers.

pub mod atlas;
pub mod eigen;
pub mod entanglement;
pub mod error;
pub mod export;
pub mod hamiltonian;
pub mod observables;
pub mod state;

pub use error::{Error, Result};
pub use observables::SpinScale;
pub use state::{BasisState, EnsembleWord, Letter, SuperpositionSpec};
