use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative rate {rate} at state {state} for move {mv}")]
    NegativeRate { state: usize, mv: String, rate: f64 },
    #[error("move {mv} maps state {state} outside the enumerated space")]
    TargetOutsideSpace { state: usize, mv: String },
    #[error("chain is reducible ({components} communicating classes)")]
    Reducible { components: usize },
    #[error("move {mv} has positive rate but its inverse is not in the move set")]
    MissingInverse { mv: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {what}")]
    NonFinite { what: String },
    #[error("function must be strictly positive (index {index}, value {value})")]
    NonPositiveF { index: usize, value: f64 },
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("generator form {generator_form} and gradient form {gradient_form} disagree")]
    FormMismatch { generator_form: f64, gradient_form: f64 },
    #[error("decay curve is degenerate (non-positive entropy or fewer than two points)")]
    DegenerateCurve,
    #[error("eigen decomposition failed: {0}")]
    EigenFailure(String),
    #[error("organized second derivative {organized} disagrees with finite difference {finite_difference}")]
    FiniteDifferenceMismatch { organized: f64, finite_difference: f64 },
    #[error("coupling seed ({state}, {mv}) is not a positive-rate transition")]
    UnknownSeed { state: usize, mv: String },
    #[error("negative coupling rate {rate} at seed ({state}, {mv}) entry ({gamma}, {gammabar})")]
    NegativeCouplingRate {
        state: usize,
        mv: String,
        gamma: String,
        gammabar: String,
        rate: f64,
    },
    #[error("coupling marginals violated: row {row:e}, column {col:e}")]
    InadmissibleCoupling { row: f64, col: f64 },
    #[error("hypothesis {hypothesis} fails: {detail}")]
    HypothesisViolation { hypothesis: String, detail: String },
    #[error("mixed increment of the potential is negative at {state:?} for coordinates ({i}, {j})")]
    HessianSignViolation { state: Vec<i32>, i: usize, j: usize },
    #[error("no threshold found below the scan cap {cap}")]
    NoSuchM { cap: usize },
    #[error("condition {condition} fails: {detail}")]
    ConditionFailed { condition: String, detail: String },
    #[error("graph is not simple: {0}")]
    NonSimpleGraph(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("marginals have different masses ({mu_mass} vs {nu_mass})")]
    InfeasibleMarginals { mu_mass: f64, nu_mass: f64 },
    #[error("time {t} too large for the small-time coupling (limit {limit})")]
    TimeTooLarge { t: f64, limit: f64 },
    #[error("mass {leak:e} reached the truncation boundary")]
    MassLeak { leak: f64 },
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
