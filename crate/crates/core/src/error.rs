use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A rank or comparison tolerance was not strictly positive (or not finite).
    InvalidTolerance(f64),
    /// A tabulated profile was queried outside its knot range.
    Extrapolation {
        t: f64,
        lo: f64,
        hi: f64,
    },
    /// A curve was queried outside the interval it was built for.
    OutOfDomain {
        t: f64,
        lo: f64,
        hi: f64,
    },
    /// Adaptive quadrature ran out of subdivisions before reaching the requested tolerance.
    QuadratureNotConverged {
        requested: f64,
        achieved: f64,
    },
    /// The separated-variables closed form was handed non unit-speed tangents.
    NotUnitSpeed {
        norm_f: f64,
        norm_g: f64,
    },
    /// A finite-difference step was not strictly positive.
    InvalidStep(f64),
    InvalidGrid(&'static str),
    InvalidProfile(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidTolerance(tol) => write!(f, "invalid tolerance {tol}: must be finite and > 0"),
            Error::Extrapolation { t, lo, hi } => {
                write!(f, "tabulated profile queried at t = {t}, outside knot range [{lo}, {hi}]")
            }
            Error::OutOfDomain { t, lo, hi } => {
                write!(f, "curve evaluated at t = {t}, outside its supported interval [{lo}, {hi}]")
            }
            Error::QuadratureNotConverged { requested, achieved } => {
                write!(f, "quadrature did not converge: requested {requested:e}, achieved {achieved:e}")
            }
            Error::NotUnitSpeed { norm_f, norm_g } => {
                write!(f, "closed-form operator needs unit-speed curves, got |f'| = {norm_f}, |g'| = {norm_g}")
            }
            Error::InvalidStep(h) => write!(f, "invalid finite-difference step {h}: must be > 0"),
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::InvalidProfile(msg) => write!(f, "invalid profile: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}
