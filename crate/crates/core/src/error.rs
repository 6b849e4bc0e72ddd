use thiserror::Error;

/// Errors raised by the operator-ball library.
///
/// The variant name is part of the public contract: the command-line front end
/// reports it verbatim (see [`Error::name`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPSD(f64),
    #[error("scalar function undefined at eigenvalue {0}")]
    DomainError(f64),
    #[error("matrix is singular or numerically singular")]
    Singular,
    #[error("1 + A*X is numerically singular")]
    SingularResolvent,
    #[error("point too close to the boundary of the ball (norm {0})")]
    BoundaryProximity(f64),
    #[error("T21 A + T22 is numerically singular")]
    SingularDenominator,
    #[error("input is zero; direction undefined")]
    ZeroInput,
    #[error("geodesic parameter too large: |t|*||D|| = {0}")]
    ParameterOverflow(f64),
    #[error("direction must have unit spectral norm (got {0})")]
    NotUnitDirection(f64),
    #[error("points coincide; no unique line")]
    CoincidentPoints,
    #[error("quadrature grid needs at least 3 strictly increasing nodes")]
    GridTooCoarse,
    #[error("group closure exceeded {0} elements")]
    ClosureExceeded(usize),
    #[error("iteration limit {0} reached")]
    MaxIterations(usize),
    #[error("group is not elliptic (orbit sup norm {0})")]
    NotElliptic(f64),
    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),
    #[error("span is not a negative subspace")]
    NotNegative,
    #[error("subspace is not a graph over the negative block")]
    DegenerateGraph,
    #[error("operator does not preserve the indefinite form (defect {0:.3e})")]
    NotEtaPreserving(f64),
    #[error("fixed point solver failed: {0}")]
    FixedPointFailed(String),
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),
    #[error("spectrum of the Gram operator touches zero (eigenvalue {0:.3e})")]
    SingularSpectrum(f64),
}

impl Error {
    /// Stable variant name, used as the `error` field of CLI output.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyMatrix => "EmptyMatrix",
            Error::NonFinite(_) => "NonFinite",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotHermitian(_) => "NotHermitian",
            Error::NotPSD(_) => "NotPSD",
            Error::DomainError(_) => "DomainError",
            Error::Singular => "Singular",
            Error::SingularResolvent => "SingularResolvent",
            Error::BoundaryProximity(_) => "BoundaryProximity",
            Error::SingularDenominator => "SingularDenominator",
            Error::ZeroInput => "ZeroInput",
            Error::ParameterOverflow(_) => "ParameterOverflow",
            Error::NotUnitDirection(_) => "NotUnitDirection",
            Error::CoincidentPoints => "CoincidentPoints",
            Error::GridTooCoarse => "GridTooCoarse",
            Error::ClosureExceeded(_) => "ClosureExceeded",
            Error::MaxIterations(_) => "MaxIterations",
            Error::NotElliptic(_) => "NotElliptic",
            Error::PreconditionUnmet(_) => "PreconditionUnmet",
            Error::NotNegative => "NotNegative",
            Error::DegenerateGraph => "DegenerateGraph",
            Error::NotEtaPreserving(_) => "NotEtaPreserving",
            Error::FixedPointFailed(_) => "FixedPointFailed",
            Error::UnknownGroup(_) => "UnknownGroup",
            Error::InvalidRepresentation(_) => "InvalidRepresentation",
            Error::SingularSpectrum(_) => "SingularSpectrum",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
