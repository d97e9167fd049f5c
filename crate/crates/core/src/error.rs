use alloc::string::String;

/// Coarse failure class; the CLI maps these to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numeric,
    Regime,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("saddle levels differ by {0:e}")]
    SaddleLevelMismatch(f64),
    #[error("separatrix missed the target disk")]
    NoConnection,
    #[error("no center found inside the loop")]
    NoInteriorCenter,
    #[error("parameter {0} lies outside the period annulus")]
    OutOfAnnulus(f64),
    #[error("transversality lost at |denominator| = {0:e}")]
    TransversalityLost(f64),
    #[error("step budget exceeded")]
    StepBudgetExceeded,
    #[error("step size underflow")]
    StepSizeUnderflow,
    #[error("loop is not closed (gap {0:e})")]
    NotClosed(f64),
    #[error("perturbed saddle not found")]
    SaddleLost,
    #[error("arclength budget exhausted")]
    BudgetExceeded,
    #[error("lift endpoint missed the exit section")]
    SectionMiss,
    #[error("zero-locus solve diverged at u = {0}")]
    SeedDivergence(f64),
    #[error("orbit did not return within the period budget")]
    NoReturn,
    #[error("first integral is not quadratic in y")]
    NotHyperelliptic,
    #[error("branch points cannot be separated")]
    BranchCollision,
    #[error("quadrature did not converge")]
    NoConvergence,
    #[error("fitted exponents disagree between decades")]
    NoisyTail,
    #[error("fitted order {0} is not close to an integer")]
    OrderAmbiguous(f64),
    #[error("perturbation is degenerate")]
    Degenerate,
    #[error("displacement modulus {0:e} too small on the circle")]
    SmallModulus(f64),
    #[error("contour refinement budget exhausted")]
    RefinementBudget,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Precondition(_)
            | Error::SaddleLevelMismatch(_)
            | Error::NoConnection
            | Error::NoInteriorCenter
            | Error::OutOfAnnulus(_)
            | Error::NotHyperelliptic
            | Error::Degenerate => ErrorClass::Validation,
            Error::SmallModulus(_) => ErrorClass::Regime,
            _ => ErrorClass::Numeric,
        }
    }

    /// Variant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Precondition(_) => "Precondition",
            Error::SaddleLevelMismatch(_) => "SaddleLevelMismatch",
            Error::NoConnection => "NoConnection",
            Error::NoInteriorCenter => "NoInteriorCenter",
            Error::OutOfAnnulus(_) => "OutOfAnnulus",
            Error::TransversalityLost(_) => "TransversalityLost",
            Error::StepBudgetExceeded => "StepBudgetExceeded",
            Error::StepSizeUnderflow => "StepSizeUnderflow",
            Error::NotClosed(_) => "NotClosed",
            Error::SaddleLost => "SaddleLost",
            Error::BudgetExceeded => "BudgetExceeded",
            Error::SectionMiss => "SectionMiss",
            Error::SeedDivergence(_) => "SeedDivergence",
            Error::NoReturn => "NoReturn",
            Error::NotHyperelliptic => "NotHyperelliptic",
            Error::BranchCollision => "BranchCollision",
            Error::NoConvergence => "NoConvergence",
            Error::NoisyTail => "NoisyTail",
            Error::OrderAmbiguous(_) => "OrderAmbiguous",
            Error::Degenerate => "Degenerate",
            Error::SmallModulus(_) => "SmallModulus",
            Error::RefinementBudget => "RefinementBudget",
        }
    }

    pub(crate) fn pre(msg: &str) -> Self {
        Error::Precondition(String::from(msg))
    }
}

pub type Result<T> = core::result::Result<T, Error>;
