use thiserror::Error;

use crate::torus::Family;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("vector is not in the lattice")]
    NotInLattice,

    #[error("map does not stabilize the lattice")]
    NotStabilizing,

    #[error("lattice basis is not of full column rank")]
    DegenerateBasis,

    #[error("{0:?} is not a root of the declared family")]
    NotARoot(Vec<i64>),

    #[error("element does not lie in the Weyl group")]
    NotInWeylGroup,

    #[error("rank {rank} is not valid for family {family}")]
    InvalidRank { family: Family, rank: usize },

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("{what} too large to enumerate: {size} exceeds threshold {threshold}")]
    TooLarge {
        what: &'static str,
        size: u128,
        threshold: u128,
    },

    #[error("no structural rational Weyl group is available for this torus")]
    NoStructuralGroup,

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
