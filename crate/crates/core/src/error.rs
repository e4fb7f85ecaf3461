use thiserror::Error;

/// Failure modes of the numerical pipeline.
///
/// Every variant is a *numerical* failure (exit code 2 in the CLI) except
/// [`Error::Parse`], [`Error::Config`] and [`Error::InvalidSeifert`], which
/// are usage errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point lies on the projection pole (distance {0:.3e})")]
    ProjectionPole(f64),
    #[error("vector too small to normalize (norm {0:.3e})")]
    DegenerateVector(f64),
    #[error("seifert parameters ({p},{q}) invalid: need p != 0, q > 0, gcd(|p|,q) = 1")]
    InvalidSeifert { p: i64, q: i64 },
    #[error("point is on a singular fiber of the ({p},{q}) fibration")]
    SingularFiber { p: i64, q: i64 },
    #[error("fields are not transverse: smallest singular value {sigma:.3e} near {at:?}; retry with --perturb")]
    TransversalityFailure { sigma: f64, at: [f64; 4] },
    #[error("traced loop self-intersects within {0:.3e}; increase resolution")]
    ResolutionTooCoarse(f64),
    #[error("value is not regular for the map (smallest singular value {0:.3e})")]
    IrregularValue(f64),
    #[error("curve continuation exceeded {0} steps")]
    MaxStepsExceeded(usize),
    #[error("orientation disagrees between sample points of one loop")]
    OrientationAmbiguous,
    #[error("loops are too close (distance {0:.3e})")]
    LoopsTooClose(f64),
    #[error("no projection pole far enough from both loops")]
    NoPoleFound,
    #[error("no generic projection direction found")]
    NoGenericProjection,
    #[error("linking number is not certified: raw {raw:.4}, residual {residual:.3}")]
    UnreliableLinking { raw: f64, residual: f64 },
    #[error("SO(3) lift is inconsistent on {0} grid edges; refine the grid")]
    LiftInconsistent(usize),
    #[error("no global framing completion available for field {0}")]
    NoGlobalCompletion(String),
    #[error("inconsistent distances: D+ = {plus}, D- = {minus} (sum must be odd)")]
    InconsistentDistances { plus: u64, minus: u64 },
    #[error("hopf invariant depends on the regular values: {0} vs {1}")]
    RegularValueDependence(i64, i64),
    #[error("cannot parse field spec `{0}`: {1}")]
    Parse(String, String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parse(..) | Error::Config(_) | Error::InvalidSeifert { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
