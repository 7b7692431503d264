use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degree mismatch: form has degree {form}, plane has dimension {plane}")]
    DegreeMismatch { form: usize, plane: usize },
    #[error("invalid bidegree ({p},{q}) for complex dimension {m}")]
    InvalidBidegree { p: usize, q: usize, m: usize },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("intersection with the diagonal is not transverse")]
    NonTransverse,
    #[error("plane is not conformal (eigenvalue ratio {ratio})")]
    NotConformal { ratio: f64 },
    #[error("a factor projection of the plane is singular")]
    DegenerateProjection,
    #[error("subspace is not coisotropic")]
    NotCoisotropic,
    #[error("subspace is not Lagrangian")]
    NotLagrangian,
    #[error("matrix does not preserve the lattice")]
    NotLatticePreserving,
    #[error("cutoff must be positive, got {0}")]
    InvalidCutoff(f64),
    #[error("infeasible sampling request: {0}")]
    Infeasible(String),
    #[error("truncation insufficient: tail bound {0:e}")]
    TruncationInsufficient(f64),
    #[error("extrapolation unstable: {0}")]
    UnstableExtrapolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
