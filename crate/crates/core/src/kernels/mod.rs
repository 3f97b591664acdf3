//! Fiber kernels, the three Bergman kernel formulas, closed-form oracles and
//! kernel transport.

mod bergman;
mod fiber;
mod oracle;

pub use bergman::{
    bergman_fourier, bergman_mellin, bergman_series, bergman_up_via_series, kernel_transport, MellinOptions,
};
pub use fiber::{
    ellipsoid_fiber_kernel, fiber_kernel_series, gram_min_eigen_ratio, lambda_fiber_kernel, monomial_norm_sq,
    segal_bargmann_kernel, FiberWeight, MonomialGramBasis, DENSE_SHELLS, DIAGONAL_SHELLS, MAX_CONDITION,
};
pub use oracle::{oracle_kernel, Oracle};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::Error;

/// How a kernel value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Series,
    Fourier,
    Mellin,
    Oracle,
    ClosedForm,
    Gram,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Fourier => "fourier",
            Method::Mellin => "mellin",
            Method::Oracle => "oracle",
            Method::ClosedForm => "closed",
            Method::Gram => "gram",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "series" => Method::Series,
            "fourier" => Method::Fourier,
            "mellin" => Method::Mellin,
            "oracle" => Method::Oracle,
            "closed" => Method::ClosedForm,
            "gram" => Method::Gram,
            _ => return Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        })
    }
}

/// A kernel value with a nonnegative error estimate and its method tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelEstimate {
    pub value: Complex64,
    pub error_estimate: f64,
    pub method: Method,
}

impl KernelEstimate {
    pub fn exact(value: Complex64, method: Method) -> Self {
        Self { value, error_estimate: 0.0, method }
    }

    /// True when the error estimate exceeds `tol` relative to the value.
    pub fn exceeds(&self, tol: f64) -> bool {
        !(self.error_estimate <= tol * self.value.norm())
    }
}
