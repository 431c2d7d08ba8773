use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Validation { name: &'static str, reason: String },

    #[error("{what} is undefined at {at}")]
    Domain { what: &'static str, at: f64 },

    #[error("quadrature did not converge: estimate {estimate:.6e}, error bound {err:.3e} after {panels} panels")]
    NonConvergence {
        estimate: f64,
        err: f64,
        panels: usize,
    },

    #[error("matrix is near-singular (condition number {cond:.3e}) at omega = {omega}")]
    NearSingular { cond: f64, omega: f64 },

    #[error("{what} is not positive semidefinite: min eigenvalue {min_eig:.3e}, trace {trace:.3e}")]
    NotPsd {
        what: &'static str,
        min_eig: f64,
        trace: f64,
    },

    #[error("time stepping became unstable at step {step}: energy {energy:.3e}")]
    Instability { step: usize, energy: f64 },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            name,
            reason: reason.into(),
        }
    }

    /// True for numerical failures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NearSingular { .. }
                | Error::NotPsd { .. }
                | Error::Instability { .. }
                | Error::Domain { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
