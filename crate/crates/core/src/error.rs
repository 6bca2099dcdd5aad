use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every variant maps to a stable snake-case code (see [`Error::code`]) that
/// the command-line driver prints as `ERROR:<code>:`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series must have at least one coefficient")]
    EmptySeries,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("constant term {value:e} is below the division tolerance {tolerance:e}")]
    ZeroConstantTerm { value: f64, tolerance: f64 },

    #[error("grid of size {grid} is too small for degree {degree} (need at least {required})")]
    GridTooSmall {
        grid: usize,
        degree: usize,
        required: usize,
    },

    #[error("grid size {0} is not a power of two")]
    GridNotPowerOfTwo(usize),

    #[error("diagonal {value:e} of the co-analytic system is not above {tolerance:e}")]
    SingularDiagonal { value: f64, tolerance: f64 },

    #[error("leading coefficient has imaginary part {imag:e}")]
    NonRealLeadingCoefficient { imag: f64 },

    #[error("log-modulus is not integrable: {fraction:.3} of the boundary samples vanish")]
    NotLogIntegrable { fraction: f64 },

    #[error("modulus samples must be nonnegative, found {0:e}")]
    NegativeModulus(f64),

    #[error("sup |b| = {sup} exceeds 1 on the boundary grid")]
    NotInUnitBall { sup: f64 },

    #[error("point with modulus {modulus} is outside the open unit disk")]
    OutsideDisk { modulus: f64 },

    #[error("sup |h| = {sup} exceeds 1 on the boundary grid")]
    NotContraction { sup: f64 },

    #[error("no outer index up to {max_outer} meets the budget for epsilon = {epsilon:e}")]
    BudgetExceeded { epsilon: f64, max_outer: u64 },

    #[error("series degree {degree} exceeds the pair degree {pair_degree}")]
    DegreeExceedsPair { degree: usize, pair_degree: usize },

    #[error("pair identity |a|^2 + |b|^2 = 1 violated by {defect:e} on the grid")]
    PairIdentity { defect: f64 },

    #[error("residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("measured error {achieved:e} exceeds the certified bound {bound:e}")]
    CertificateViolated { achieved: f64, bound: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptySeries => "empty_series",
            Error::NonFinite(_) => "non_finite",
            Error::ZeroConstantTerm { .. } => "zero_constant_term",
            Error::GridTooSmall { .. } => "grid_too_small",
            Error::GridNotPowerOfTwo(_) => "grid_not_power_of_two",
            Error::SingularDiagonal { .. } => "singular_diagonal",
            Error::NonRealLeadingCoefficient { .. } => "non_real_leading_coefficient",
            Error::NotLogIntegrable { .. } => "not_log_integrable",
            Error::NegativeModulus(_) => "negative_modulus",
            Error::NotInUnitBall { .. } => "not_in_unit_ball",
            Error::OutsideDisk { .. } => "outside_disk",
            Error::NotContraction { .. } => "not_contraction",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::DegreeExceedsPair { .. } => "degree_exceeds_pair",
            Error::PairIdentity { .. } => "pair_identity",
            Error::ResidualTooLarge { .. } => "residual_too_large",
            Error::CertificateViolated { .. } => "certificate_violated",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse { .. } => "parse_error",
            Error::Io(_) => "io_error",
        }
    }

    /// True when the failure reflects degraded numerics rather than bad input;
    /// a caller may retry such failures at a higher degree or grid size.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::ZeroConstantTerm { .. }
                | Error::SingularDiagonal { .. }
                | Error::NonRealLeadingCoefficient { .. }
                | Error::BudgetExceeded { .. }
                | Error::PairIdentity { .. }
                | Error::ResidualTooLarge { .. }
                | Error::CertificateViolated { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
