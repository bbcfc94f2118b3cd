use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("singular matrix")]
    Singular,
    #[error("not a g-frame (bounds {lower:.3e}, {upper:.3e})")]
    NotAFrame { lower: f64, upper: f64 },
    #[error("coefficients do not represent the vector (residual {residual:.3e})")]
    NotARepresentation { residual: f64 },
    #[error("not a g-Riesz basis")]
    NotRieszBasis,
    #[error("unknown element index {0}")]
    UnknownIndex(i64),
    #[error("duplicate element index {0}")]
    DuplicateIndex(i64),
    #[error("basis for element {index} is not unitary (residual {residual:.3e})")]
    NotUnitary { index: i64, residual: f64 },
    #[error("families are not a dual pair (residual {residual:.3e})")]
    NotDualPair { residual: f64 },
    #[error("local frames for element {index} are not dual (residual {residual:.3e})")]
    LocalPairNotDual { index: i64, residual: f64 },
    #[error("splitting operator is singular (bounds {lower:.3e}, {upper:.3e})")]
    SingularSplitting { lower: f64, upper: f64 },
    #[error("form for element {index} is not symmetric positive definite")]
    NotSpd { index: i64 },
    #[error("operator is singular (rank {rank} < {dim})")]
    SingularOperator { rank: usize, dim: usize },
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("infeasible generator parameters: {0}")]
    InfeasibleSpec(String),
}
