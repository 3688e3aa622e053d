//! Maximum modulus sets of entire functions, computed in log-scale arithmetic.
//!
//! The crate has two halves. The first evaluates concrete entire functions
//! (Hardy's and Tyler's examples, a Pólya-type Cauchy integral and sums of its
//! translates) without ever forming a linear-scale modulus, and traces their
//! maximum modulus sets: circle maxima, maximum curves, discontinuities and
//! isolated points.
//!
//! The second half builds a winding tract `V(δ)` out of rectangles, computes
//! the positive harmonic function `u ≈ Re G` vanishing on its boundary, and
//! tunes the shift vector `δ` so that the maximum modulus set of the model
//! function `|f(e^z)| ≈ e^{u(z)}` jumps at prescribed real parts. Every
//! inequality that decides a jump is certified with an explicit margin that
//! survives an additive perturbation of size `e^{-1}`.
//!
//! Module map:
//!
//! - [`functions`]: log-scale values, function models, Pólya quadrature
//! - [`maxmod`]: circle maxima, branch tracing, discontinuities, order
//! - [`tract`]: radii normalization, the rectangle tract, clearance curve
//! - [`conformal`]: harmonic solve for `Re G`, conjugate, strip coordinate
//! - [`geometry`]: hyperbolic density bounds, distances, Ahlfors check
//! - [`construct`]: the tuning functions `φ_n`, the `δ` solver, certificates
//! - [`acceptance`]: the end-to-end verification suite
//! - [`report`]: deterministic CSV and SVG emission

pub mod acceptance;
pub mod conformal;
pub mod construct;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod maxmod;
pub mod report;
pub mod tract;

pub use error::{Error, Result};
