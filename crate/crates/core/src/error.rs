use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension n={0}: only n=1 and n=2 are supported")]
    UnsupportedDimension(usize),
    #[error("points_per_axis={0} must be a power of two and at least 4")]
    BadPointCount(usize),
    #[error("half_length={0} must be positive and finite")]
    BadHalfLength(f64),
    #[error("value array has {got} entries but the grid holds {want} samples")]
    LengthMismatch { got: usize, want: usize },
    #[error("non-finite value at flat grid index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("time must be finite, got {0}")]
    BadTime(f64),
    #[error("kernel propagator is singular at t = 0; use the spectral propagator instead")]
    KernelSingularTime,
    #[error("scale factor {0} must be positive and finite")]
    BadScale(f64),
    #[error("Lebesgue exponent must be >= 1 (or infinite), got {0}")]
    BadExponent(f64),
    #[error("Sobolev order must be 0 or 1, got {0}")]
    BadSobolevOrder(u32),
    #[error("fractional-integration exponent must lie in (0,1), got {0}")]
    BadHlsAlpha(f64),
    #[error("trajectory invalid: {0}")]
    BadTrajectory(&'static str),
    #[error("inverse exponent {0} out of range [0, 1]")]
    BadInverseExponent(String),
    #[error("triple {triple} is not admissible for n={n}: {reason}")]
    InadmissibleTriple { n: u32, triple: String, reason: String },
    #[error("derived dual exponents out of range: {0}")]
    DualOutOfRange(String),
    #[error("field is identically zero")]
    ZeroField,
    #[error("fit window must satisfy 0 < t_min < t_max, got [{0}, {1}]")]
    BadWindow(f64, f64),
    #[error("need at least 4 fit samples, requested {0}")]
    TooFewSamples(usize),
    #[error(
        "wrap-around contamination: {rejected} of {total} samples exceed the boundary-amplitude \
         threshold {threshold:e}; too few remain for a fit"
    )]
    WrapAroundContamination { rejected: usize, total: usize, threshold: f64 },
    #[error("empty dyadic scale range [{0}, {1}]")]
    EmptyScaleRange(i32, i32),
    #[error("window must be a nondegenerate square, got [{0}, {1}]")]
    BadDecompositionWindow(f64, f64),
    #[error("trajectory does not cover the time interval [{0}, {1}]")]
    TimeRangeMismatch(f64, f64),
    #[error("nonlinearity power alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
    #[error("steps must be at least 1")]
    BadStepCount,
    #[error(
        "non-contraction detected: Picard distances increased for 3 consecutive iterations \
         (last measured factor {factor:.3})"
    )]
    NonContraction { factor: f64 },
    #[error("Picard iteration did not reach tolerance within {0} iterations")]
    MaxIterExceeded(usize),
    #[error("solution overflowed at t = {last_valid_time}; aborting the split-step run")]
    Overflow { last_valid_time: f64 },
    #[error("exponent gap (2 + alpha - n*alpha)/2 is not positive; no horizon can be proposed")]
    OutOfRegime,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad field file: {0}")]
    BadFieldFile(String),
}
