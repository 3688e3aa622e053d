//! Log-scale evaluation of the concrete entire-function models.

pub mod angle;
pub mod logcomplex;
pub mod models;
pub mod polya;

pub use logcomplex::{wrap_angle, LogComplex};
pub use models::{FunctionModel, PolyaSum, StripTerm};
pub use polya::{PolyaKernel, QuadratureParams};

use crate::error::Result;
use num_complex::Complex64;

/// `f(z)` for any model, in log scale.
pub fn eval_log(model: &FunctionModel, z: Complex64) -> Result<LogComplex> {
    model.eval_log(z)
}

/// The Pólya function on the standard contour.
pub fn polya_g(z: Complex64, quad: QuadratureParams) -> Result<LogComplex> {
    PolyaKernel::new(quad)?.eval(z)
}

pub fn polya_sum(z: Complex64, model: &PolyaSum) -> Result<LogComplex> {
    model.eval(z, true)
}
