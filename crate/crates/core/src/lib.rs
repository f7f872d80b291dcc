//! Exact deciders and numerical probes for twisted group C*-algebras.
//!
//! The crate covers phase arithmetic in 𝕋, a fixed catalogue of group
//! families with normal forms, their 2-cocycles, σ-regularity, Kleppner-type
//! verdicts, truncated regular-representation numerics and growth probes.

pub mod cocycles;
pub mod groups;
pub mod growth;
pub mod lattice;
pub mod phase;
pub mod regularity;
pub mod spectral;
pub mod verdicts;

pub use cocycles::{Cocycle, CocycleKind};
pub use groups::{Element, Family, Group};
pub use phase::{IrrationalBasis, Phase};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("budget exceeded at radius {radius}: more than {cap} nodes")]
    Budget { radius: u32, cap: usize },
    #[error("unrecognized subgroup `{0}`")]
    UnrecognizedSubgroup(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cocycle is not invariant: {0}")]
    NotInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
