use core::fmt;

/// Errors raised by the spectral core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid parameters outside the supported range.
    InvalidGrid { dim: usize, points: usize },
    /// Two operands live on different grids.
    GridMismatch,
    /// A field or series does not have the expected number of components.
    ShapeMismatch { expected: usize, found: usize },
    /// Input has a non-negligible zero mode where the operator is undefined on it.
    NonZeroMean { mean: f64, norm: f64 },
    /// A JacobianField candidate is not curl-compatible.
    NotAGradient { residual: f64, norm: f64 },
    /// An index argument is out of range.
    IndexOutOfRange { what: &'static str, index: usize, bound: usize },
    /// `∇X = I + ∇Y` is (nearly) singular at a grid point.
    SingularJacobian { index: usize, det: f64 },
    /// A time that does not fall on the sample grid.
    OffGrid { index: usize, samples: usize },
    /// Two time series were sampled on different time grids.
    TimeGridMismatch,
    /// Invalid time grid.
    InvalidTimeGrid { dt: f64, steps: usize },
    /// Initial data violate the compatibility conditions beyond tolerance.
    IncompatibleData { det: f64, velocity: f64, tolerance: f64 },
    /// Richardson iteration for the pressure did not reach its tolerance.
    PressureDiverged { iterations: usize, residual: f64, contraction: f64 },
    /// Invalid solver configuration value.
    InvalidConfig { key: &'static str, reason: &'static str },
    /// Path with too few samples or non-increasing times.
    InvalidPath { reason: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid { dim, points } => write!(
                f,
                "invalid grid: dimension {dim} with {points} points per axis (need dimension 2 or 3, points a power of two >= 8)"
            ),
            Error::GridMismatch => write!(f, "operands are defined on different grids"),
            Error::ShapeMismatch { expected, found } => {
                write!(f, "expected {expected} components, found {found}")
            }
            Error::NonZeroMean { mean, norm } => write!(
                f,
                "zero mode is undefined for this operator: mean {mean:e} against norm {norm:e}"
            ),
            Error::NotAGradient { residual, norm } => write!(
                f,
                "matrix field is not a gradient: curl residual {residual:e} against norm {norm:e}"
            ),
            Error::IndexOutOfRange { what, index, bound } => {
                write!(f, "{what} index {index} out of range (bound {bound})")
            }
            Error::SingularJacobian { index, det } => write!(
                f,
                "deformation gradient is singular at grid point {index} (det = {det:e})"
            ),
            Error::OffGrid { index, samples } => {
                write!(f, "time index {index} is not on a grid with {samples} samples")
            }
            Error::TimeGridMismatch => write!(f, "time series use different time grids"),
            Error::InvalidTimeGrid { dt, steps } => {
                write!(f, "invalid time grid: dt = {dt}, steps = {steps} (need dt > 0, steps >= 4)")
            }
            Error::IncompatibleData { det, velocity, tolerance } => write!(
                f,
                "initial data are not compatible: det residual {det:e}, velocity residual {velocity:e}, tolerance {tolerance:e}"
            ),
            Error::PressureDiverged { iterations, residual, contraction } => write!(
                f,
                "pressure iteration failed after {iterations} iterations: residual {residual:e}, contraction estimate {contraction:.3}"
            ),
            Error::InvalidConfig { key, reason } => write!(f, "invalid value for {key}: {reason}"),
            Error::InvalidPath { reason } => write!(f, "invalid path: {reason}"),
        }
    }
}

impl core::error::Error for Error {}
