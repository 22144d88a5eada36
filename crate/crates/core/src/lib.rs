// `!(x > t)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod quadrature;
pub mod special;

pub use error::{FaddeevError, Result};
pub use num_complex::Complex64;
pub use quadrature::QuadratureSpec;
pub mod geometry;
pub mod green;
pub mod linalg;
pub mod regularization;
pub mod singularities;
pub mod solver;
pub mod verification;
