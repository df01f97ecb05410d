use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not an involution (O^2 deviates from I by {defect:.3e})")]
    NotInvolution { defect: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    NonUnitTrace { trace: f64 },

    #[error("density matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("operation requires a pure state, got a density matrix")]
    PureStateRequired,

    #[error("matrix is not transpose-symmetric in the computational basis (defect {defect:.3e})")]
    NotTransposeSymmetric { defect: f64 },

    #[error("no planar angle assignment satisfies the inner-product targets: {detail}")]
    InfeasibleGram { detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient table is invalid: {0}")]
    InvalidCoefficients(String),

    #[error(
        "measurement counts ({alice} Alice, {bob} Bob) do not match the {n}x{m} coefficient table"
    )]
    SettingsMismatch {
        alice: usize,
        bob: usize,
        n: usize,
        m: usize,
    },

    #[error(
        "{party} observable {index} is not a rank-split dichotomic measurement (trace {trace})"
    )]
    NotRankSplit {
        party: &'static str,
        index: usize,
        trace: f64,
    },

    #[error(
        "deterministic-strategy enumeration limited to {limit} total settings, got {settings}"
    )]
    EnumerationTooLarge { settings: usize, limit: usize },

    #[error(
        "weight for setting {index} is degenerate ({value:.3e}); the decomposition divides by it"
    )]
    DegenerateWeight { index: usize, value: f64 },

    #[error("derived observable {index} is not an involution (defect {defect:.3e}); the fixed observables are incompatible with saturation")]
    DerivedNotInvolutive { index: usize, defect: f64 },

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("probability table violates an invariant: {0}")]
    TableInvariant(String),

    #[error(
        "closed form ({closed_form}) and brute force ({brute_force}) disagree beyond tolerance"
    )]
    VerificationMismatch { closed_form: f64, brute_force: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
