//! The Pólya-type entire function defined by a Cauchy integral over the
//! boundary of the half-strip `G₀ = {x > 0, |y| < π}`:
//!
//! `g(z) = (1/2πi) ∫_{∂G₀} exp(e^t) / (t − z) dt`, integrated clockwise.
//!
//! For `z ∈ G₀` the analytic continuation picks up the residue term, so
//! `g(z) = exp(e^z) + (1/2πi) ∫ …`. Since `exp(e^t)` is entire, the contour
//! may be shifted freely as long as it keeps its decay on the horizontal
//! edges (`|Im t| − π < π/2`); points moving across a shifted edge gain or
//! lose the residue term. [`PolyaKernel::eval_entire`] uses this to evaluate
//! `g` at points too close to `∂G₀` for the standard contour.

use super::logcomplex::LogComplex;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Relative disagreement allowed between the two quadrature orders.
pub const QUADRATURE_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureParams {
    /// Horizontal edges are cut at `Re t = truncation_x`; the integrand there
    /// is below `exp(-e^5) ≈ 1e-64`.
    pub truncation_x: f64,
    pub nodes_per_unit: usize,
    pub min_contour_distance: f64,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        QuadratureParams {
            truncation_x: 5.0,
            nodes_per_unit: 64,
            min_contour_distance: 0.2,
        }
    }
}

impl QuadratureParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_x >= 5.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation_x must be at least 5, got {}",
                self.truncation_x
            )));
        }
        if self.nodes_per_unit < 16 {
            return Err(Error::InvalidParameter(format!(
                "nodes_per_unit must be at least 16, got {}",
                self.nodes_per_unit
            )));
        }
        if !(self.min_contour_distance > 0.0) {
            return Err(Error::InvalidParameter(
                "min_contour_distance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One truncated contour `∂{x > left, |y| < half_height}` with precomputed
/// quadrature coefficients `c_k` such that the integral is `Σ c_k / (t_k − z)`.
#[derive(Debug, Clone)]
struct Contour {
    left: f64,
    half_height: f64,
    right: f64,
    nodes: Vec<Complex64>,
    /// Romberg (three trapezoid levels) coefficients.
    fine: Vec<Complex64>,
    /// Simpson (two levels) coefficients, for the disagreement estimate.
    coarse: Vec<Complex64>,
    /// `(1/2π) Σ |c_k|`, giving `|I(z)| ≤ abs_mass / dist(z)`.
    abs_mass: f64,
}

fn integrand(t: Complex64) -> Complex64 {
    t.exp().exp()
}

/// Romberg and Simpson weights on `m + 1` uniform nodes, `m` divisible by 4.
fn edge_weights(m: usize, h: f64) -> (Vec<f64>, Vec<f64>) {
    let trap = |stride: usize| -> Vec<f64> {
        let mut w = vec![0.0; m + 1];
        let hs = h * stride as f64;
        for (j, wj) in w.iter_mut().enumerate() {
            if j % stride == 0 {
                *wj = if j == 0 || j == m { 0.5 * hs } else { hs };
            }
        }
        w
    };
    let t1 = trap(1);
    let t2 = trap(2);
    let t4 = trap(4);
    let mut romberg = vec![0.0; m + 1];
    let mut simpson = vec![0.0; m + 1];
    for j in 0..=m {
        let s1 = (4.0 * t1[j] - t2[j]) / 3.0;
        let s2 = (4.0 * t2[j] - t4[j]) / 3.0;
        simpson[j] = s1;
        romberg[j] = (16.0 * s1 - s2) / 15.0;
    }
    (romberg, simpson)
}

impl Contour {
    fn new(left: f64, half_height: f64, params: &QuadratureParams) -> Self {
        let right = params.truncation_x;
        let npu = params.nodes_per_unit as f64;
        let intervals = |len: f64| -> usize {
            let m = (len * npu).ceil() as usize;
            m.div_ceil(4).max(1) * 4
        };
        let mut nodes = Vec::new();
        let mut fine = Vec::new();
        let mut coarse = Vec::new();
        let mut push_edge = |start: Complex64, end: Complex64| {
            let len = (end - start).norm();
            let m = intervals(len);
            let h = len / m as f64;
            let dir = (end - start) / len;
            let (wr, ws) = edge_weights(m, h);
            for j in 0..=m {
                let t = start + dir * (j as f64 * h);
                let f = integrand(t) * dir;
                nodes.push(t);
                fine.push(f * wr[j]);
                coarse.push(f * ws[j]);
            }
        };
        // clockwise around the region: bottom edge leftwards, left edge
        // upwards, top edge rightwards
        let bl = Complex64::new(left, -half_height);
        let tl = Complex64::new(left, half_height);
        push_edge(Complex64::new(right, -half_height), bl);
        push_edge(bl, tl);
        push_edge(tl, Complex64::new(right, half_height));
        let abs_mass = fine.iter().map(|c| c.norm()).sum::<f64>() / (2.0 * PI);
        Contour {
            left,
            half_height,
            right,
            nodes,
            fine,
            coarse,
            abs_mass,
        }
    }

    fn distance(&self, z: Complex64) -> f64 {
        let seg = |a: Complex64, b: Complex64| -> f64 {
            let ab = b - a;
            let t = ((z - a).re * ab.re + (z - a).im * ab.im) / ab.norm_sqr();
            let p = a + ab * t.clamp(0.0, 1.0);
            (z - p).norm()
        };
        let bl = Complex64::new(self.left, -self.half_height);
        let tl = Complex64::new(self.left, self.half_height);
        let br = Complex64::new(self.right, -self.half_height);
        let tr = Complex64::new(self.right, self.half_height);
        seg(br, bl).min(seg(bl, tl)).min(seg(tl, tr))
    }

    fn encloses(&self, z: Complex64) -> bool {
        z.re > self.left && z.im.abs() < self.half_height
    }

    /// Returns `(romberg, simpson)` values of `(1/2πi) ∫ φ(t)/(t − z) dt`.
    fn integrate(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut fine = Complex64::new(0.0, 0.0);
        let mut coarse = Complex64::new(0.0, 0.0);
        for ((t, cf), cc) in self.nodes.iter().zip(&self.fine).zip(&self.coarse) {
            let inv = (t - z).inv();
            fine += cf * inv;
            coarse += cc * inv;
        }
        let scale = Complex64::new(0.0, -1.0 / (2.0 * PI));
        (fine * scale, coarse * scale)
    }
}

/// Quadrature kernel for the Pólya function: the standard contour `∂G₀` plus
/// four shifted copies used when a point sits too close to the standard one.
#[derive(Debug, Clone)]
pub struct PolyaKernel {
    params: QuadratureParams,
    contours: Vec<Contour>,
}

const SHIFTS: [(f64, f64); 5] = [(0.0, 0.0), (0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)];

impl PolyaKernel {
    pub fn new(params: QuadratureParams) -> Result<Self> {
        params.validate()?;
        let contours = SHIFTS
            .iter()
            .map(|&(dx, dy)| Contour::new(dx, PI + dy, &params))
            .collect();
        Ok(PolyaKernel { params, contours })
    }

    pub fn params(&self) -> &QuadratureParams {
        &self.params
    }

    /// Distance from `z` to the truncated standard contour `∂G₀`.
    pub fn contour_distance(&self, z: Complex64) -> f64 {
        self.contours[0].distance(z)
    }

    /// Whether `z` lies in the open half-strip `G₀`.
    pub fn in_strip(z: Complex64) -> bool {
        z.re > 0.0 && z.im.abs() < PI
    }

    fn eval_with(&self, contour: &Contour, z: Complex64) -> Result<LogComplex> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("polya argument"));
        }
        let (fine, coarse) = contour.integrate(z);
        if !(fine.re.is_finite() && fine.im.is_finite()) {
            return Err(Error::NonFinite("polya quadrature"));
        }
        let integral = LogComplex::from_complex(fine);
        let value = if contour.encloses(z) {
            LogComplex::exp(z.exp()).add(integral)
        } else {
            integral
        };
        let disagreement = (fine - coarse).norm();
        let scale = fine.norm().max(value.to_complex().norm());
        let scale = if scale.is_finite() { scale } else { f64::MAX };
        let tolerance = QUADRATURE_REL_TOL * scale + 1e-300;
        if disagreement > tolerance {
            return Err(Error::QuadratureDisagreement {
                disagreement,
                tolerance,
            });
        }
        Ok(value)
    }

    /// `g(z)` on the standard contour. Fails when `z` is closer than
    /// `min_contour_distance` to `∂G₀`.
    pub fn eval(&self, z: Complex64) -> Result<LogComplex> {
        let d = self.contour_distance(z);
        if d < self.params.min_contour_distance {
            return Err(Error::ContourProximity {
                re: z.re,
                im: z.im,
                distance: d,
                minimum: self.params.min_contour_distance,
            });
        }
        self.eval_with(&self.contours[0], z)
    }

    /// `g(z)` anywhere: uses the standard contour when it is far enough,
    /// otherwise the shifted contour farthest from `z`.
    pub fn eval_entire(&self, z: Complex64) -> Result<LogComplex> {
        let contour = self.pick_contour(z);
        self.eval_with(contour, z)
    }

    fn pick_contour(&self, z: Complex64) -> &Contour {
        if self.contours[0].distance(z) >= self.params.min_contour_distance {
            return &self.contours[0];
        }
        let mut best = &self.contours[0];
        let mut best_d = f64::NEG_INFINITY;
        for c in &self.contours {
            let d = c.distance(z);
            if d > best_d {
                best_d = d;
                best = c;
            }
        }
        best
    }

    /// Upper bound on `ln |g(z)|` valid when `z` is outside the chosen
    /// contour's region (no residue term), or `None` when `z` is inside.
    pub fn far_field_ln_bound(&self, z: Complex64) -> Option<f64> {
        let c = self.pick_contour(z);
        if c.encloses(z) {
            return None;
        }
        Some((c.abs_mass / c.distance(z)).ln())
    }

    /// Evaluates the same point once with the contour passing on each side of
    /// it. The two values must agree if the clockwise orientation and the
    /// residue sign are consistent. Returns the relative discrepancy.
    pub fn orientation_self_test(&self) -> Result<f64> {
        // -0.25 lies outside G₀ but inside the region of the contour shifted
        // left by 0.5
        let z = Complex64::new(-0.25, 0.3);
        let outside = self.eval_with(&self.contours[0], z)?;
        let inside = self.eval_with(&self.contours[3], z)?;
        if self.contours[0].encloses(z) || !self.contours[3].encloses(z) {
            return Err(Error::Precondition("self-test point misplaced".into()));
        }
        let a = outside.to_complex();
        let b = inside.to_complex();
        Ok((a - b).norm() / a.norm())
    }
}
