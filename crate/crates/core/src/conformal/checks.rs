//! Quantities read off a solution: segment maxima, the opening check that
//! fixes `ℓ`, the modulus gap on `I_n` and the growth profile.

use num_complex::Complex64;

use super::{grid::default_tract_h, solve_reg, HarmonicSolution};
use crate::error::{Error, Result};
use crate::tract::TractGeometry;

/// The opening check demands `max Re G ≥ 4` with this much slack.
pub const OPENING_THRESHOLD: f64 = 4.4;

/// Gap in `Re G` required between the lower and upper channel on `I_n`.
pub const GAP_THRESHOLD: f64 = 1.0;

/// Maximum of the interpolated solution on the segment `[a, b]`.
///
/// Samples every grid-line crossing, both endpoints and the midpoints in
/// between; for axis-parallel segments this is the exact maximum of the
/// interpolant. The segment may touch the boundary but must not leave the
/// domain and come back.
pub fn max_reg_on_segment(sol: &HarmonicSolution, a: Complex64, b: Complex64) -> Result<f64> {
    for z in [a, b] {
        if sol.cell_of(z).is_none() {
            return Err(Error::OutsideDomain { re: z.re, im: z.im });
        }
    }
    let mut ts = vec![0.0, 1.0];
    let d = b - a;
    for (v, a0, d0) in [(&sol.xs, a.re, d.re), (&sol.ys, a.im, d.im)] {
        if d0 != 0.0 {
            for &c in v.iter() {
                let t = (c - a0) / d0;
                if t > 0.0 && t < 1.0 {
                    ts.push(t);
                }
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut all = Vec::with_capacity(2 * ts.len());
    for w in ts.windows(2) {
        all.push(w[0]);
        all.push(0.5 * (w[0] + w[1]));
    }
    all.push(1.0);
    let vals: Vec<f64> = all.iter().map(|&t| sol.interp(a + d * t)).collect();
    let first = vals.iter().position(|&v| v > 0.0);
    let last = vals.iter().rposition(|&v| v > 0.0);
    if let (Some(f), Some(l)) = (first, last) {
        if vals[f..=l].iter().any(|&v| v <= 0.0) {
            return Err(Error::OutsideDomain {
                re: 0.5 * (a.re + b.re),
                im: 0.5 * (a.im + b.im),
            });
        }
    }
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `max Re G` over the opening `{0} × (0, ℓ)` between the base rectangle
/// and the first sector.
pub fn opening_max(sol: &HarmonicSolution, ell: f64) -> Result<f64> {
    max_reg_on_segment(sol, Complex64::new(0.0, 0.0), Complex64::new(0.0, ell))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllProbe {
    pub ell: f64,
    /// Opening maxima at the smallest and largest admissible shifts.
    pub opening_max: [f64; 2],
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllReport {
    /// Largest passing width found.
    pub ell: f64,
    pub probes: Vec<EllProbe>,
    pub threshold: f64,
}

fn probe_ell(build: &dyn Fn(f64, bool) -> Result<TractGeometry>, ell: f64, h: Option<f64>) -> Result<EllProbe> {
    let mut vals = [0.0; 2];
    for (k, at_max) in [false, true].into_iter().enumerate() {
        let tract = build(ell, at_max)?;
        let hh = h.unwrap_or_else(|| default_tract_h(&tract));
        let sol = solve_reg(&tract, hh)?;
        vals[k] = opening_max(&sol, ell)?;
    }
    Ok(EllProbe {
        ell,
        opening_max: vals,
        pass: vals.iter().all(|&v| v >= OPENING_THRESHOLD),
    })
}

/// Bisects for the largest `ℓ ∈ [lo, hi]` whose tract passes the opening
/// check both with all shifts zero and all shifts maximal.
/// `build(ℓ, at_max)` constructs the tract.
pub fn verify_ell(
    build: &dyn Fn(f64, bool) -> Result<TractGeometry>,
    lo: f64,
    hi: f64,
    h: Option<f64>,
    iterations: usize,
) -> Result<EllReport> {
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < {lo} < {hi} < 1")));
    }
    let mut probes = Vec::new();
    let top = probe_ell(build, hi, h)?;
    let top_pass = top.pass;
    probes.push(top);
    if top_pass {
        return Ok(EllReport { ell: hi, probes, threshold: OPENING_THRESHOLD });
    }
    let bottom = probe_ell(build, lo, h)?;
    let bottom_pass = bottom.pass;
    probes.push(bottom);
    if !bottom_pass {
        return Err(Error::NoSignChange(format!(
            "opening check fails already at ell = {lo}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..iterations {
        let m = 0.5 * (a + b);
        let p = probe_ell(build, m, h)?;
        if p.pass {
            a = m;
        } else {
            b = m;
        }
        probes.push(p);
    }
    Ok(EllReport { ell: a, probes, threshold: OPENING_THRESHOLD })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub sector: usize,
    /// Least sampled real part from which the gap exceeds the threshold.
    pub t: f64,
    /// `(t′, max over R⁴ − max over R¹)` at every grid column in `I_n`.
    pub columns: Vec<(f64, f64)>,
    /// Smallest gap over the columns from `t` on.
    pub min_gap: f64,
}

/// Columns of `I_n` at which the lower channel beats the upper one by more
/// than [`GAP_THRESHOLD`].
pub fn verify_gap(sol: &HarmonicSolution, tract: &TractGeometry, n: usize) -> Result<GapReport> {
    if n == 0 || n > tract.n {
        return Err(Error::InvalidParameter(format!("sector {n} outside 1..={}", tract.n)));
    }
    let (a, b) = tract.i_interval(n);
    if b > tract.trust_x() {
        return Err(Error::OutsideTrustRegion(format!(
            "I_{n} ends at {b}, beyond {}",
            tract.trust_x()
        )));
    }
    let columns: Vec<(f64, f64)> = sol
        .xs
        .iter()
        .filter(|&&x| x > a && x < b)
        .map(|&t| (t, sol.column_max(t, -1.0, 0.0).0 - sol.column_max(t, 0.0, 1.0).0))
        .collect();
    if columns.is_empty() {
        return Err(Error::GridTooCoarse(format!("no grid column inside I_{n}")));
    }
    let mut start = None;
    for (k, &(t, g)) in columns.iter().enumerate().rev() {
        if g > GAP_THRESHOLD {
            start = Some((k, t));
        } else {
            break;
        }
    }
    let (k, t) = start.ok_or_else(|| {
        Error::NoSignChange(format!("gap on I_{n} never exceeds {GAP_THRESHOLD}"))
    })?;
    let min_gap = columns[k..].iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    Ok(GapReport { sector: n, t, columns, min_gap })
}

/// `ln max_y u(t, y)` sampled in `t` with a least-squares line.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    /// `(t, max_u(t))`.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Largest deviation of `ln max_u` from the line, relative to the
    /// total rise of `ln max_u` over the samples.
    pub deviation: f64,
}

pub fn growth_profile(sol: &HarmonicSolution, tract: &TractGeometry, t_grid: &[f64]) -> Result<GrowthProfile> {
    let trust = tract.trust_x();
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if t > trust {
            return Err(Error::OutsideTrustRegion(format!("t = {t} beyond {trust}")));
        }
        let (m, _) = sol.column_max(t, -1.0, 1.0);
        if !(m > 0.0) {
            return Err(Error::OutsideDomain { re: t, im: 0.0 });
        }
        points.push((t, m));
    }
    if points.len() < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(t, m)| (t, m.ln())).collect();
    let (slope, intercept) = least_squares(&logs);
    let lo = logs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = logs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let worst = logs
        .iter()
        .map(|&(t, y)| (y - slope * t - intercept).abs())
        .fold(0.0, f64::max);
    let deviation = if hi > lo { worst / (hi - lo) } else { 0.0 };
    Ok(GrowthProfile { points, slope, intercept, deviation })
}

pub(crate) fn least_squares(p: &[(f64, f64)]) -> (f64, f64) {
    let n = p.len() as f64;
    let mx = p.iter().map(|q| q.0).sum::<f64>() / n;
    let my = p.iter().map(|q| q.1).sum::<f64>() / n;
    let sxy: f64 = p.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let sxx: f64 = p.iter().map(|q| (q.0 - mx) * (q.0 - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}
