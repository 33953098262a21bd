use thiserror::Error;

use crate::fitting::FitResult;
use crate::pade::DReport;
use crate::universal::ConstructionTranscript;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient index {requested} exceeds truncation order {available}")]
    TruncationExceeded { requested: usize, available: usize },

    #[error("Hankel determinant below threshold: |D| = {:e}, bound = {:e}", .0.det_abs, .0.bound)]
    NotInD(Box<DReport>),

    #[error("Padé solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    IllConditioned { residual: f64, tolerance: f64 },

    #[error("q = {q} exceeds the configured cap {cap}")]
    CapExceeded { q: usize, cap: usize },

    #[error("expansion center lies on a pole")]
    CenterOnPole,

    #[error("coefficient lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("euclidean comparison met the point at infinity")]
    InfiniteValue,

    #[error("pole at distance {distance:e} from the sampled region")]
    PoleInRegion { distance: f64 },

    #[error("degenerate shape: {0}")]
    DegenerateShape(String),

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("fit budget exhausted at degree {}; best error {:e}", .0.degree, .0.achieved_f64())]
    BudgetExhausted(Box<FitResult>),

    #[error("least-squares matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },

    #[error("root finding failed: {0}")]
    RootFindingFailed(String),

    /// The block is fitted but its sampled error is not; usually the
    /// precision is too low for the cancellation in the partial sum.
    #[error("step error {error:e} is not below the budget {budget:e}; try a higher precision")]
    StepBudgetMissed { error: f64, budget: f64 },

    #[error("no usable index in the table prefix")]
    NoUsableIndex,

    #[error("span depth {depth} exceeds the cap {cap}")]
    DepthCapExceeded { depth: usize, cap: usize },

    #[error("construction stopped at step {step}: {source}")]
    ConstructionFailed {
        step: usize,
        transcript: Box<ConstructionTranscript>,
        #[source]
        source: Box<Error>,
    },

    #[error("denominator is the zero polynomial")]
    ZeroDenominator,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
