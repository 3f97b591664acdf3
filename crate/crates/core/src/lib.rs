//! Paley-Wiener representations and Bergman kernels of polynomial half-spaces
//! `U_p = {Im z > p(w)}` and polynomial ellipsoids `E_p = {|z|² + p(w) < 1}`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod domains;
pub mod error;
pub mod exec;
pub mod kernels;
pub mod polynomials;
pub mod quad;
pub mod transforms;
pub mod transforms1d;
pub mod weights;

pub use error::{Error, Result};
pub use exec::ExecMode;
pub use num_complex::Complex64;
