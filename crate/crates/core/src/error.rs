use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("degenerate stability condition: {0}")]
    DegenerateStability(String),
    #[error("chambers are not adjacent: {0}")]
    NotAdjacent(String),
    #[error("wall is not crepant: sum of characters pairs to {0} with e")]
    NotCrepant(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("star of the subdivided cone is not smooth: {0}")]
    NonSmoothStar(String),
    #[error("singular restriction at anticone {0:?}")]
    SingularRestriction(Vec<usize>),
    #[error("series argument outside convergence radius: |x| = {0}")]
    ConvergenceRadius(f64),
    #[error("truncation window exceeded: {0}")]
    TruncationOverflow(String),
    #[error("|y^e| = {value} is outside the convergence region |y^e| < {radius}")]
    OutsideConvergence { value: f64, radius: f64 },
    #[error("non-generic parameters: {0}")]
    NonGenericParameters(String),
    #[error("quadrature failed: error estimate {estimate:e} above target {target:e}")]
    QuadratureFailure { estimate: f64, target: f64 },
    #[error("residue series converges too slowly: {0}")]
    SlowConvergence(String),
    #[error("fixed data are not paired: {0}")]
    NotPaired(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("formal root has no resolution rule: {0}")]
    UnresolvedRoot(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error at `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("contour domain violated: {0}")]
    Domain(String),
}

impl Error {
    /// Stable machine-readable code, echoed in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::RankMismatch { .. } => "rank_mismatch",
            Error::DegenerateStability(_) => "degenerate_stability",
            Error::NotAdjacent(_) => "not_adjacent",
            Error::NotCrepant(_) => "not_crepant",
            Error::InvalidFan(_) => "invalid_fan",
            Error::NonSmoothStar(_) => "non_smooth_star",
            Error::SingularRestriction(_) => "singular_restriction",
            Error::ConvergenceRadius(_) => "convergence_radius",
            Error::TruncationOverflow(_) => "truncation_overflow",
            Error::OutsideConvergence { .. } => "outside_convergence",
            Error::NonGenericParameters(_) => "non_generic_parameters",
            Error::QuadratureFailure { .. } => "quadrature_failure",
            Error::SlowConvergence(_) => "slow_convergence",
            Error::NotPaired(_) => "not_paired",
            Error::IndexMismatch(_) => "index_mismatch",
            Error::UnresolvedRoot(_) => "unresolved_root",
            Error::Parse(_) => "parse_error",
            Error::Validation { .. } => "validation_error",
            Error::UnknownCommand(_) => "unknown_command",
            Error::Domain(_) => "domain_error",
        }
    }

    /// A short hint for the user, where one exists.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            Error::DegenerateStability(_) => {
                Some("move the stability parameter off the wall into the interior of a chamber")
            }
            Error::NotCrepant(_) => Some("the sum of all characters must lie on the wall"),
            Error::OutsideConvergence { .. } => {
                Some("use the Mellin-Barnes continuation for points beyond the conifold radius")
            }
            Error::NonGenericParameters(_) => Some("draw the equivariant parameters again with another seed"),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
