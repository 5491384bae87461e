use thiserror::Error;

/// Failure modes of the numerical pipelines.
///
/// Payloads are carried as `f64` regardless of the working scalar so that
/// errors stay `'static` and printable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("path passes within {distance:e} of branch point {root} (floor {floor:e})")]
    PathTooCloseToBranchPoint { root: usize, distance: f64, floor: f64 },
    #[error("quadrature did not converge: difference {difference:e} at {nodes} nodes (tolerance {tolerance:e})")]
    NoConvergence { nodes: usize, difference: f64, tolerance: f64 },
    #[error("branch points are not all real")]
    NotRealBranchPoints,
    #[error("normalization system is singular (condition number {condition:e})")]
    SingularNormalizationSystem { condition: f64 },
    #[error("series order {requested} exceeds the maximum {max}")]
    OrderTooLarge { requested: usize, max: usize },
    #[error("turning points are complex: no smooth real solution for g2={g2}, g3={g3}")]
    ComplexBranchPoints { g2: f64, g3: f64 },
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("ODE integration failed at x={x}: {reason}")]
    OdeFailure { x: f64, reason: String },
    #[error("expected 3 simple band edges, found {found} in [{lo}, {hi}]")]
    EdgeCountMismatch { found: usize, lo: f64, hi: f64 },
    #[error("quasimomentum fit is ill-conditioned (condition number {condition:e})")]
    FitIllConditioned { condition: f64 },
    #[error("no genuine root of the Boutroux residual in [{lo}, {hi}] (endpoint residuals {r_lo:e}, {r_hi:e})")]
    NoSolutionInBracket { lo: f64, hi: f64, r_lo: f64, r_hi: f64 },
    #[error("{count} roots of the residual in [{lo}, {hi}]; split the bracket")]
    MultipleSignChanges { count: usize, lo: f64, hi: f64 },
    #[error("ratio {0} is outside the range of the h-parametrization")]
    RatioOutOfRange(f64),
    #[error("constraint Jacobian is rank deficient (singular values {sigma_min:e}, {sigma_max:e})")]
    RankDeficientConstraint { sigma_min: f64, sigma_max: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by malformed input rather than numerical trouble.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DegenerateCurve(_)
                | Error::OrderTooLarge { .. }
                | Error::RatioOutOfRange(_)
                | Error::InvalidInput(_)
                | Error::NotRealBranchPoints
                | Error::ComplexBranchPoints { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
