use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the operation's domain (negative label, bad weight parity, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Two operands live in different representation spaces.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Mismatch { expected: usize, got: usize },

    /// The input is well-formed but not in the subspace the operation acts on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Orbit sampling did not reach a stable rank.
    #[error("rank did not stabilize after {samples} samples (last rank {rank}, full dimension {full})")]
    Convergence { samples: usize, rank: usize, full: usize },

    /// Two independent computations of the same object disagree.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// The moduli point sits on the boundary and the requested construction degenerates.
    #[error("boundary point: {0}; use boundary_analysis")]
    Boundary(String),

    /// The differential of the map is (numerically) zero.
    #[error("degenerate differential at {0}")]
    Degenerate(String),

    /// A grid or step is too coarse for the requested accuracy.
    #[error("insufficient resolution: {0}")]
    Resolution(String),
}
