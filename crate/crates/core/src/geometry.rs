//! Hyperbolic-metric estimates on tracts, the half-plane distance, and the
//! distortion check for the strip coordinate.
//!
//! Densities follow the curvature −4 convention: `1/(1 − |z|²)` on the unit
//! disk and `1/(2 Re w)` on the right half-plane.

use num_complex::Complex64;

use crate::conformal::{strip_coordinate, ConjugatePair, HalfStrip};
use crate::error::{Error, Result};
use crate::tract::{Rect, TractGeometry};

/// Solver slack allowed by [`verify_ahlfors`] and [`pick_bracket`].
pub const SOLVER_SLACK: f64 = 0.05;

/// A domain with an exact boundary distance.
pub trait Domain {
    fn contains(&self, z: Complex64) -> bool;
    fn boundary_dist(&self, z: Complex64) -> f64;
}

impl Domain for TractGeometry {
    fn contains(&self, z: Complex64) -> bool {
        TractGeometry::contains(self, z)
    }
    fn boundary_dist(&self, z: Complex64) -> f64 {
        TractGeometry::boundary_dist(self, z)
    }
}

impl Domain for HalfStrip {
    fn contains(&self, z: Complex64) -> bool {
        z.re > 0.0 && z.re < self.length && z.im.abs() < self.half_height
    }
    fn boundary_dist(&self, z: Complex64) -> f64 {
        let dx = z.re.min(self.length - z.re);
        let dy = self.half_height - z.im.abs();
        dx.min(dy).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBound {
    pub lower: f64,
    pub upper: f64,
}

/// `[1/(2d), 2/d]` with `d` the distance from `z` to the boundary.
pub fn density_bounds<D: Domain + ?Sized>(domain: &D, z: Complex64) -> Result<DensityBound> {
    if !domain.contains(z) {
        return Err(Error::OutsideDomain { re: z.re, im: z.im });
    }
    let d = domain.boundary_dist(z);
    if !(d > 0.0) {
        return Err(Error::OutsideDomain { re: z.re, im: z.im });
    }
    Ok(DensityBound {
        lower: 0.5 / d,
        upper: 2.0 / d,
    })
}

/// Trapezoid rule for `∫ 2/d ds` along a polyline, with steps no longer
/// than an eighth of the local boundary distance.
pub fn hyp_dist_upper<D: Domain + ?Sized>(domain: &D, path: &[Complex64]) -> Result<f64> {
    let density = |z: Complex64| -> Result<f64> {
        let d = if domain.contains(z) { domain.boundary_dist(z) } else { 0.0 };
        if d > 0.0 {
            Ok(2.0 / d)
        } else {
            Err(Error::OutsideDomain { re: z.re, im: z.im })
        }
    };
    let mut total = 0.0;
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        let mut s = 0.0;
        let mut fa = density(a)?;
        while s < len {
            let here = a + (b - a) * (s / len);
            let step = (0.125 * domain.boundary_dist(here)).min(len - s).max(len * 1e-9);
            let next = (s + step).min(len);
            let fb = density(a + (b - a) * (next / len))?;
            total += 0.5 * (fa + fb) * (next - s);
            fa = fb;
            s = next;
        }
    }
    Ok(total)
}

/// Lower bound `|Re a − Re b| / τ` for two points of one rectangle of
/// height `τ` whose vertical segments are crosscuts of the tract: every
/// path between them crosses each intermediate segment, and the density
/// there is at least `1/(2 · τ/2)`.
pub fn hyp_dist_lower_rect(tract: &TractGeometry, a: Complex64, b: Complex64, channel: &Rect) -> Result<f64> {
    for z in [a, b] {
        if !(channel.contains_closure(z) && tract.contains(z)) {
            return Err(Error::OutsideDomain { re: z.re, im: z.im });
        }
    }
    let (lo, hi) = (a.re.min(b.re), a.re.max(b.re));
    if hi > lo {
        let mut cuts: Vec<f64> = tract
            .rects
            .iter()
            .flat_map(|r| [r.x.lo, r.x.hi])
            .filter(|&x| x > lo && x < hi)
            .collect();
        cuts.extend([lo, hi]);
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let s = 0.5 * (w[0] + w[1]);
            let ends = [Complex64::new(s, channel.y.lo), Complex64::new(s, channel.y.hi)];
            if ends.iter().any(|&e| tract.contains(e)) {
                return Err(Error::Precondition(format!(
                    "rectangle {}.{} is not a channel at real part {s}",
                    channel.sector, channel.index
                )));
            }
        }
    }
    Ok((hi - lo) / channel.y.width())
}

/// Hyperbolic estimates along one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEstimate {
    pub path: Vec<Complex64>,
    pub upper: f64,
    pub lower: f64,
}

/// Upper bound along `path`; lower bound from `channel` when the endpoints
/// share one, zero otherwise.
pub fn path_estimate(tract: &TractGeometry, path: Vec<Complex64>, channel: Option<&Rect>) -> Result<PathEstimate> {
    let upper = hyp_dist_upper(tract, &path)?;
    let lower = match (channel, path.first(), path.last()) {
        (Some(c), Some(&a), Some(&b)) => hyp_dist_lower_rect(tract, a, b, c)?,
        _ => 0.0,
    };
    Ok(PathEstimate { path, upper, lower })
}

/// Distance in the right half-plane with density `1/(2 Re w)`:
/// `asinh(|w₁ − w₂| / (2 √(Re w₁ Re w₂)))`.
pub fn halfplane_distance(w1: Complex64, w2: Complex64) -> Result<f64> {
    for w in [w1, w2] {
        if !(w.re > 0.0 && w.im.is_finite()) {
            return Err(Error::OutsideDomain { re: w.re, im: w.im });
        }
    }
    Ok(((w1 - w2).norm() / (2.0 * (w1.re * w2.re).sqrt())).asinh())
}

/// The half-plane density strictly decreases under translation by `x > 0`.
pub fn rho_translation_monotone(w: Complex64, x: f64) -> Result<bool> {
    if !(w.re > 0.0) {
        return Err(Error::OutsideDomain { re: w.re, im: w.im });
    }
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!("shift {x} must be positive")));
    }
    Ok(0.5 / w.re > 0.5 / (w.re + x))
}

/// Vertical cross-sections of a domain.
pub trait CrossSections {
    fn channels_at(&self, s: f64) -> Vec<(f64, f64)>;
    /// Length used for `θ(s)`.
    fn theta(&self, s: f64) -> Result<f64>;
    /// Real parts where `θ` may jump.
    fn theta_breaks(&self) -> Vec<f64>;
    /// Real parts up to which solver output is trusted.
    fn trust_limit(&self) -> f64;
}

impl CrossSections for TractGeometry {
    fn channels_at(&self, s: f64) -> Vec<(f64, f64)> {
        TractGeometry::channels_at(self, s)
    }
    fn theta(&self, s: f64) -> Result<f64> {
        self.cross_section_theta(s)
    }
    fn theta_breaks(&self) -> Vec<f64> {
        self.rects.iter().flat_map(|r| [r.x.lo, r.x.hi]).collect()
    }
    fn trust_limit(&self) -> f64 {
        self.trust_x()
    }
}

impl CrossSections for HalfStrip {
    fn channels_at(&self, s: f64) -> Vec<(f64, f64)> {
        if s > 0.0 && s < self.length {
            vec![(-self.half_height, self.half_height)]
        } else {
            Vec::new()
        }
    }
    fn theta(&self, s: f64) -> Result<f64> {
        if s > 0.0 && s < self.length {
            Ok(2.0 * self.half_height)
        } else {
            Err(Error::OutsideDomain { re: s, im: 0.0 })
        }
    }
    fn theta_breaks(&self) -> Vec<f64> {
        Vec::new()
    }
    fn trust_limit(&self) -> f64 {
        self.length
    }
}

/// `∫_t^{t′} ds / θ(s)`, exact for piecewise constant `θ`.
pub fn inverse_width_integral<C: CrossSections + ?Sized>(domain: &C, t: f64, t_prime: f64) -> Result<f64> {
    let mut pts: Vec<f64> = domain
        .theta_breaks()
        .into_iter()
        .filter(|&x| x > t && x < t_prime)
        .collect();
    pts.extend([t, t_prime]);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += (w[1] - w[0]) / domain.theta(0.5 * (w[0] + w[1]))?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AhlforsOutcome {
    Checked { lhs: f64, rhs: f64, pass: bool },
    /// `∫ ds/θ < 1/2`: the inequality makes no claim.
    Inapplicable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhlforsReport {
    pub t: f64,
    pub t_prime: f64,
    pub integral: f64,
    pub outcome: AhlforsOutcome,
}

/// Extreme values of `Re φ` over the cross-section at `s`.
fn strip_real_range<C: CrossSections + ?Sized>(pair: &ConjugatePair, domain: &C, s: f64) -> Result<(f64, f64)> {
    let ys = &pair.solution.ys;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, b) in domain.channels_at(s) {
        let inner: Vec<f64> = ys.iter().cloned().filter(|&y| y > a && y < b).collect();
        let mut samples = inner.clone();
        for w in inner.windows(2) {
            samples.push(0.5 * (w[0] + w[1]));
        }
        if samples.is_empty() {
            samples.push(0.5 * (a + b));
        }
        for y in samples {
            let re = strip_coordinate(pair, Complex64::new(s, y))?.re;
            lo = lo.min(re);
            hi = hi.max(re);
        }
    }
    if lo > hi {
        return Err(Error::OutsideDomain { re: s, im: 0.0 });
    }
    Ok((lo, hi))
}

/// Checks `min Re φ(γ_{t′}) − max Re φ(γ_t) ≥ ∫ ds/θ − (ln 32)/π` up to
/// [`SOLVER_SLACK`], where `γ_s` is the full cross-section at `s`.
pub fn verify_ahlfors<C: CrossSections + ?Sized>(pair: &ConjugatePair, domain: &C, t: f64, t_prime: f64) -> Result<AhlforsReport> {
    if !(t < t_prime) {
        return Err(Error::InvalidParameter(format!("need t < t′, got {t}, {t_prime}")));
    }
    if t_prime > domain.trust_limit() {
        return Err(Error::OutsideTrustRegion(format!(
            "t′ = {t_prime} beyond {}",
            domain.trust_limit()
        )));
    }
    let integral = inverse_width_integral(domain, t, t_prime)?;
    if integral < 0.5 {
        return Ok(AhlforsReport { t, t_prime, integral, outcome: AhlforsOutcome::Inapplicable });
    }
    let rhs = integral - 32f64.ln() / std::f64::consts::PI;
    let (_, hi_t) = strip_real_range(pair, domain, t)?;
    let (lo_tp, _) = strip_real_range(pair, domain, t_prime)?;
    let lhs = lo_tp - hi_t;
    let pass = lhs >= rhs - SOLVER_SLACK * rhs.abs();
    Ok(AhlforsReport { t, t_prime, integral, outcome: AhlforsOutcome::Checked { lhs, rhs, pass } })
}

/// `d_V(a, b)` through the solved map against its path estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PickCheck {
    pub distance: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

/// Compares the half-plane distance of `G(a), G(b)` with the upper bound
/// along the straight segment and, when given, the channel lower bound.
pub fn pick_bracket(pair: &ConjugatePair, tract: &TractGeometry, a: Complex64, b: Complex64, channel: Option<&Rect>) -> Result<PickCheck> {
    let g = |z: Complex64| -> Result<Complex64> {
        let u = pair.solution.interp(z);
        let v = pair.value(z).ok_or(Error::OutsideDomain { re: z.re, im: z.im })?;
        Ok(Complex64::new(u, v))
    };
    let distance = halfplane_distance(g(a)?, g(b)?)?;
    let est = path_estimate(tract, vec![a, b], channel)?;
    let holds = est.lower <= distance * (1.0 + SOLVER_SLACK) && distance <= est.upper * (1.0 + SOLVER_SLACK);
    Ok(PickCheck { distance, lower: est.lower, upper: est.upper, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Strip {
        width: f64,
    }

    impl Domain for Strip {
        fn contains(&self, z: Complex64) -> bool {
            z.im.abs() < 0.5 * self.width
        }
        fn boundary_dist(&self, z: Complex64) -> f64 {
            0.5 * self.width - z.im.abs()
        }
    }

    struct Disk;

    impl Domain for Disk {
        fn contains(&self, z: Complex64) -> bool {
            z.norm() < 1.0
        }
        fn boundary_dist(&self, z: Complex64) -> f64 {
            1.0 - z.norm()
        }
    }

    struct RightHalfPlane;

    impl Domain for RightHalfPlane {
        fn contains(&self, z: Complex64) -> bool {
            z.re > 0.0
        }
        fn boundary_dist(&self, z: Complex64) -> f64 {
            z.re
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tract() -> TractGeometry {
        crate::conformal::tests_support::unit_tract(2, 0.5, 0.0)
    }

    #[test]
    fn density_examples() {
        let b = density_bounds(&RightHalfPlane, c(1.0, 0.0)).unwrap();
        assert_eq!((b.lower, b.upper), (0.5, 2.0));
        let b = density_bounds(&Disk, c(0.0, 0.0)).unwrap();
        assert!(b.lower <= 1.0 && 1.0 <= b.upper);
        let t = tract();
        let r4 = t.rect(1, 4).unwrap();
        let e = t.eps(1);
        let b = density_bounds(&t, r4.center()).unwrap();
        // R⁴ is ε/8 wide, so the centre is ε/16 from the boundary
        assert!((b.lower - 8.0 / e).abs() < 1e-9 / e && (b.upper - 32.0 / e).abs() < 1e-9 / e);
        assert!(density_bounds(&t, c(-0.5, 0.9)).is_err());
    }

    #[test]
    fn strip_center_line_upper_bound() {
        let s = Strip { width: 0.5 };
        let v = hyp_dist_upper(&s, &[c(0.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!((v - 4.0 * 3.0 / 0.5).abs() < 1e-9);
        assert_eq!(hyp_dist_upper(&s, &[c(1.0, 0.0)]).unwrap(), 0.0);
        assert!(hyp_dist_upper(&s, &[c(0.0, 0.0), c(0.0, 0.25)]).is_err());
    }

    #[test]
    fn channel_lower_bound_examples() {
        let t = tract();
        let r3 = t.rect(1, 3).unwrap().clone();
        let e = t.eps(1);
        let y = -e / 64.0;
        let a = c(r3.x.lo, y);
        let b = c(r3.x.lo + e / 8.0, y);
        assert!((hyp_dist_lower_rect(&t, a, b, &r3).unwrap() - 4.0).abs() < 1e-9);
        let m = c(r3.x.lo + e / 16.0, y);
        assert!((hyp_dist_lower_rect(&t, a, m, &r3).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(hyp_dist_lower_rect(&t, a, a, &r3).unwrap(), 0.0);
        assert!(hyp_dist_lower_rect(&t, a, c(r3.x.lo, 0.5), &r3).is_err());
    }

    #[test]
    fn halfplane_distance_examples() {
        let e2 = 2f64.exp();
        let d = halfplane_distance(c(1.0, 0.0), c(e2, 0.0)).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
        assert_eq!(halfplane_distance(c(2.0, 1.0), c(2.0, 1.0)).unwrap(), 0.0);
        assert!(halfplane_distance(c(0.0, 1.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn translation_monotone_examples() {
        assert!(rho_translation_monotone(c(1.0, 0.0), 1.0).unwrap());
        assert!(rho_translation_monotone(c(5.0, 2.0), 0.1).unwrap());
        assert!(rho_translation_monotone(c(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn inverse_width_integral_on_tract() {
        let t = tract();
        // inside R₀ the section is the full (−ℓ, ℓ)
        let v = inverse_width_integral(&t, -1.5, -0.5).unwrap();
        assert!((v - 1.0 / (2.0 * t.ell)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn halfplane_distance_symmetric(a in 0.01f64..10.0, b in -5.0f64..5.0, c2 in 0.01f64..10.0, d in -5.0f64..5.0) {
            let (w1, w2) = (c(a, b), c(c2, d));
            let p = halfplane_distance(w1, w2).unwrap();
            let q = halfplane_distance(w2, w1).unwrap();
            prop_assert!((p - q).abs() <= 1e-12 * p.max(1.0));
            prop_assert!(p >= 0.0);
        }

        #[test]
        fn density_bounds_ordered(x in -1.9f64..13.0, y in -0.99f64..0.99) {
            let t = tract();
            let z = c(x, y);
            if t.contains(z) && t.boundary_dist(z) > 0.0 {
                let b = density_bounds(&t, z).unwrap();
                prop_assert!(0.0 < b.lower && b.lower <= b.upper);
            }
        }

        #[test]
        fn upper_bound_exceeds_true_distance_in_half_plane(x1 in 0.1f64..5.0, y1 in -3.0f64..3.0, x2 in 0.1f64..5.0, y2 in -3.0f64..3.0) {
            // straight path upper bound versus closed form
            let (a, b) = (c(x1, y1), c(x2, y2));
            let exact = halfplane_distance(a, b).unwrap();
            let up = hyp_dist_upper(&RightHalfPlane, &[a, b]).unwrap();
            prop_assert!(exact <= up * (1.0 + 1e-6));
        }
    }
}
