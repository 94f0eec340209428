use thiserror::Error;

/// Errors shared by every layer of the crate.
///
/// Verification *failures* are not errors: a scenario that refutes a claim
/// reports a `Fail` verdict with a witness. Errors are reserved for inputs
/// that leave the domain of an operation (wrong space, wrong variant,
/// malformed window) or for values that escape the exact representations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("point {point} is not in space {space}")]
    NotInSpace { point: String, space: String },

    #[error("label {label} out of range for {space}")]
    LabelOutOfRange { label: i64, space: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("value cannot be represented exactly: {0}")]
    Precision(String),

    #[error("window is empty or malformed: {0}")]
    InvalidWindow(String),

    #[error("points lie in different components, no unit chain exists: {0}")]
    Disconnected(String),

    #[error("map {0} is not an endomorphism, cannot iterate")]
    NotEndomorphism(String),

    #[error("maps are not composable: {0}")]
    NotComposable(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("closeness trend needs at least 3 nested windows, got {0}")]
    TooFewWindows(usize),

    #[error("control value rho(1) must be positive")]
    ZeroRho,

    #[error("map is not surjective on the window: no preimage for {0}")]
    NotSurjective(String),

    #[error("tabulated map has no entry for {0}")]
    TableMiss(String),

    #[error("maps do not form a coarse inverse pair on the tested windows: {0}")]
    NotCoarseInversePair(String),

    #[error("index maps are not structurally inverse: {0}")]
    NonInverseInputs(String),

    #[error("geometric recurrence requires G > 1, got {0}")]
    RecurrencePole(String),

    #[error("cannot parse {kind} from {input:?}")]
    Parse { kind: &'static str, input: String },
}

pub type Result<T> = std::result::Result<T, Error>;
