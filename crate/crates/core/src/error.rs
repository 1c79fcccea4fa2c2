use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the workbench. Variants carry enough context to be
/// reported on a single machine-parsable line by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown angular group `{0}`")]
    UnknownGroup(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("outside continuation strip: {0}")]
    OutsideStrip(String),

    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("grid not preserved by map: {0}")]
    GridNotPreserved(String),

    #[error("grid too coarse: refinement shift {shift:.3e} exceeds {limit:.1e}")]
    GridTooCoarse { shift: f64, limit: f64 },

    #[error("radial oracle failure: {0}")]
    RadialOracle(String),

    #[error("spectrum has a single distinct value")]
    SingleEigenvalue,

    #[error("symmetry residual {residual:.3e} above tolerance {tol:.1e}")]
    SymmetryViolated { residual: f64, tol: f64 },

    #[error("subspace not invariant (leakage {0:.3e})")]
    NotInvariant(f64),

    #[error("non-finite matrix entries")]
    NonFinite,

    #[error("eigensolver failed to converge: {0}")]
    Convergence(String),

    #[error("ambiguous branch matching: {0}")]
    AmbiguousMatch(String),

    #[error("seed cluster lost: {0}")]
    ClusterLost(String),

    #[error("vanishing energy denominator at atomic state {state}, mode {mode}")]
    VanishingDenominator { state: usize, mode: usize },

    #[error("second-order block not scalar (deviation {0:.3e})")]
    NonScalarBlock(f64),

    #[error("parameters outside admissible region: {0}")]
    OutsideRegion(String),

    #[error("model: {0}")]
    Model(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
