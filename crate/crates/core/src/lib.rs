//! Exact homology of simplicial and cubical sets with symmetries.
//!
//! The crate builds chain complexes from concrete presheaves (symmetric
//! simplicial sets, cubical sets with connections, transpositions and
//! reversals), computes their homology exactly over Q or Z, and checks the
//! operator identities that let symmetry sub-complexes be quotiented away.

pub mod chain_modules;
pub mod cli;
pub mod error;
pub mod exact_linalg;
pub mod generators;
pub mod projections;
pub mod s_functor;
pub mod structure_maps;
pub mod symmetries;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
