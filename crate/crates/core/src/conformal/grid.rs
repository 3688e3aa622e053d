//! Graded tensor-product grids and the regions solved on them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tract::TractGeometry;

/// Default growth factor between neighbouring grid spacings.
pub const DEFAULT_RATIO: f64 = 1.25;

/// Interval of an axis that must be resolved at spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zone {
    pub lo: f64,
    pub hi: f64,
    pub h: f64,
}

/// One grid axis: coordinates that must be grid lines, refinement zones
/// and the spacing far from all zones.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub breaks: Vec<f64>,
    pub zones: Vec<Zone>,
    pub coarse: f64,
    pub ratio: f64,
}

impl AxisSpec {
    pub fn uniform(lo: f64, hi: f64, h: f64) -> Self {
        AxisSpec {
            lo,
            hi,
            breaks: Vec::new(),
            zones: Vec::new(),
            coarse: h,
            ratio: DEFAULT_RATIO,
        }
    }

    fn spacing(&self, x: f64) -> f64 {
        self.zones.iter().fold(self.coarse, |s, z| {
            let d = if x < z.lo {
                z.lo - x
            } else if x > z.hi {
                x - z.hi
            } else {
                0.0
            };
            s.min(z.h + (self.ratio - 1.0) * d)
        })
    }

    /// Grid lines: all breaks inside `[lo, hi]` plus nodes between them
    /// equidistributed in `∫ dx / spacing(x)`.
    pub fn nodes(&self) -> Result<Vec<f64>> {
        if !(self.lo < self.hi && self.coarse > 0.0 && self.ratio > 1.0) {
            return Err(Error::InvalidParameter(format!("bad axis {self:?}")));
        }
        if self.zones.iter().any(|z| !(z.h > 0.0)) {
            return Err(Error::InvalidParameter("zone spacing must be positive".into()));
        }
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .cloned()
            .filter(|&b| b > self.lo && b < self.hi)
            .collect();
        breaks.push(self.lo);
        breaks.push(self.hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut out = vec![breaks[0]];
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            // tabulate Ψ(x) = ∫_a^x dt / spacing(t)
            let mut xs = vec![a];
            let mut psi = vec![0.0];
            let mut x = a;
            while x < b {
                let s = self.spacing(x);
                let step = (0.25 * s).min(b - x);
                let mid = x + 0.5 * step;
                let nx = if b - x <= 0.25 * s { b } else { x + step };
                let p = psi.last().copied().unwrap_or(0.0) + (nx - x) / self.spacing(mid);
                x = nx;
                xs.push(x);
                psi.push(p);
            }
            let total = *psi.last().expect("nonempty");
            let m = ((total - 1e-9).ceil() as usize).max(1);
            let mut seg = 0;
            for k in 1..m {
                let target = total * k as f64 / m as f64;
                while psi[seg + 1] < target {
                    seg += 1;
                }
                let f = (target - psi[seg]) / (psi[seg + 1] - psi[seg]);
                out.push(xs[seg] + f * (xs[seg + 1] - xs[seg]));
            }
            out.push(b);
        }
        Ok(out)
    }
}

/// The fixed boundary value on the right end of the computational box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cap {
    pub x: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Cap {
    /// Sine profile with unit amplitude.
    pub fn profile(&self, y: f64) -> f64 {
        if y > self.y_lo && y < self.y_hi {
            (std::f64::consts::PI * (y - self.y_lo) / (self.y_hi - self.y_lo)).sin()
        } else {
            0.0
        }
    }
}

/// A bounded open region whose boundary lies on the grid lines generated
/// by `axes`. The solution vanishes on the boundary except on the cap.
pub trait Region {
    fn contains(&self, z: Complex64) -> bool;
    fn axes(&self, h: f64) -> Result<(AxisSpec, AxisSpec)>;
    fn cap(&self) -> Cap;
    fn base_point(&self) -> Complex64;
    /// Checks that the generated grid resolves every feature.
    fn check_grid(&self, _xs: &[f64], _ys: &[f64]) -> Result<()> {
        Ok(())
    }
}

/// `(0, length) × (−half_height, half_height)` with the cap on the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfStrip {
    pub length: f64,
    pub half_height: f64,
    pub base: Complex64,
}

impl HalfStrip {
    pub fn new(length: f64, half_height: f64, base: Complex64) -> Self {
        HalfStrip { length, half_height, base }
    }
}

impl Region for HalfStrip {
    fn contains(&self, z: Complex64) -> bool {
        z.re > 0.0 && z.re < self.length && z.im.abs() < self.half_height
    }

    fn axes(&self, h: f64) -> Result<(AxisSpec, AxisSpec)> {
        let mut ax = AxisSpec::uniform(0.0, self.length, h);
        ax.breaks.push(self.base.re);
        let mut ay = AxisSpec::uniform(-self.half_height, self.half_height, h);
        ay.breaks.push(self.base.im);
        Ok((ax, ay))
    }

    fn cap(&self) -> Cap {
        Cap {
            x: self.length,
            y_lo: -self.half_height,
            y_hi: self.half_height,
        }
    }

    fn base_point(&self) -> Complex64 {
        self.base
    }
}

/// Finest spacing used by default for a tract: `min ε / 96`.
pub fn default_tract_h(tract: &TractGeometry) -> f64 {
    tract.eps_seq.iter().cloned().fold(f64::INFINITY, f64::min) / 96.0
}

impl Region for TractGeometry {
    fn contains(&self, z: Complex64) -> bool {
        TractGeometry::contains(self, z)
    }

    fn axes(&self, h: f64) -> Result<(AxisSpec, AxisSpec)> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("grid spacing {h} must be positive")));
        }
        let eps_max = self.eps_seq.iter().cloned().fold(0.0, f64::max);
        let mut xb: Vec<f64> = self.rects.iter().flat_map(|r| [r.x.lo, r.x.hi]).collect();
        xb.extend([-1.0, self.cap_x]);
        let mut yb: Vec<f64> = self.rects.iter().flat_map(|r| [r.y.lo, r.y.hi]).collect();
        yb.push(0.0);
        let coarse_x = h.max(1.0 / 32.0);
        let coarse_y = h.max((1.0 / 32.0f64).min(self.ell / 8.0));
        let mut xz: Vec<Zone> = (1..=self.n)
            .map(|k| Zone {
                lo: self.x(k) - self.delta_n(k) - self.eps(k) / 4.0,
                hi: self.x(k) + 2.0 * self.eps(k),
                h,
            })
            .collect();
        xz.push(Zone {
            lo: -self.ell / 4.0,
            hi: self.ell / 4.0,
            h: h.max(coarse_y / 4.0),
        });
        let yz = vec![Zone {
            lo: -eps_max / 32.0,
            hi: 0.0,
            h,
        }];
        let ax = AxisSpec {
            lo: -2.0,
            hi: self.cap_x,
            breaks: xb,
            zones: xz,
            coarse: coarse_x,
            ratio: DEFAULT_RATIO,
        };
        let ay = AxisSpec {
            lo: -1.0,
            hi: 1.0,
            breaks: yb,
            zones: yz,
            coarse: coarse_y,
            ratio: DEFAULT_RATIO,
        };
        Ok((ax, ay))
    }

    fn cap(&self) -> Cap {
        Cap {
            x: self.cap_x,
            y_lo: 0.0,
            y_hi: 1.0,
        }
    }

    fn base_point(&self) -> Complex64 {
        Complex64::new(-1.0, 0.0)
    }

    /// Every rectangle must contain at least two interior grid lines in
    /// each direction.
    fn check_grid(&self, xs: &[f64], ys: &[f64]) -> Result<()> {
        let inside = |v: &[f64], lo: f64, hi: f64| v.iter().filter(|&&t| t > lo && t < hi).count();
        for r in &self.rects {
            let nx = inside(xs, r.x.lo, r.x.hi);
            let ny = inside(ys, r.y.lo, r.y.hi);
            if nx < 2 || ny < 2 {
                return Err(Error::GridTooCoarse(format!(
                    "rectangle {}.{} has {nx}×{ny} interior grid lines",
                    r.sector, r.index
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_axis_hits_breaks() {
        let mut a = AxisSpec::uniform(0.0, 1.0, 0.1);
        a.breaks.push(0.333);
        let n = a.nodes().unwrap();
        assert!(n.contains(&0.333));
        assert_eq!(n[0], 0.0);
        assert_eq!(*n.last().unwrap(), 1.0);
        assert!(n.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.1 + 1e-12));
    }

    #[test]
    fn graded_axis_respects_zone_and_ratio() {
        let a = AxisSpec {
            lo: 0.0,
            hi: 10.0,
            breaks: vec![5.0],
            zones: vec![Zone { lo: 5.0, hi: 5.01, h: 1e-4 }],
            coarse: 0.1,
            ratio: 1.25,
        };
        let n = a.nodes().unwrap();
        for w in n.windows(2) {
            let d = w[1] - w[0];
            let mid = 0.5 * (w[0] + w[1]);
            // within a few percent of the target spacing
            assert!(d <= a.spacing(mid) * 1.3 + 1e-12, "{d} at {mid}");
        }
        let fine = n.iter().filter(|&&x| x >= 5.0 && x <= 5.01).count();
        assert!(fine >= 100);
        // grading keeps the total small
        assert!(n.len() < 400, "{}", n.len());
        let steps: Vec<f64> = n.windows(2).map(|w| w[1] - w[0]).collect();
        for w in steps.windows(2) {
            let q = w[1] / w[0];
            assert!(q < 1.4 && q > 1.0 / 1.4, "ratio {q}");
        }
    }
}
