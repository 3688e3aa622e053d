//! Circle maxima, maximum curves, discontinuities and isolated points.
//!
//! Everything here works on a [`CircleProfile`]: a split of `ln |f(r e^{iθ})|`
//! into a radius-only baseline plus an angle-dependent excess. Decisions on
//! one circle compare excesses only. Angles are carried internally in turns
//! (`θ = 2πq`) so that the real axis is hit exactly by the sampling grid.

use crate::error::{Error, Result};
use crate::functions::angle::{turn_diff, turns_to_radians};
use crate::functions::FunctionModel;
use std::f64::consts::PI;

pub const DEFAULT_SAMPLES: usize = 4096;
pub const MIN_SAMPLES: usize = 256;
pub const DEFAULT_REFINE_TOL: f64 = 1e-9;
pub const DEFAULT_RADIAL_TOL: f64 = 1e-6;
/// Largest angular move (radians) of a branch between neighbouring radii.
pub const DEFAULT_ANGLE_TOL: f64 = 0.05;

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const TURN_TOL: f64 = 1e-13;

/// `ln |f(r e^{2πiq})| = baseline(r) + excess(r, q)`.
pub trait CircleProfile {
    fn baseline(&self, r: f64) -> f64;
    fn excess(&self, r: f64, q: f64) -> Result<f64>;
}

impl CircleProfile for FunctionModel {
    fn baseline(&self, r: f64) -> f64 {
        FunctionModel::baseline(self, r)
    }
    fn excess(&self, r: f64, q: f64) -> Result<f64> {
        FunctionModel::excess(self, r, q)
    }
}

/// `z ↦ f(λz)`.
pub struct Rescaled<'a, P: ?Sized> {
    pub inner: &'a P,
    pub lambda: f64,
}

impl<P: CircleProfile + ?Sized> CircleProfile for Rescaled<'_, P> {
    fn baseline(&self, r: f64) -> f64 {
        self.inner.baseline(self.lambda * r)
    }
    fn excess(&self, r: f64, q: f64) -> Result<f64> {
        self.inner.excess(self.lambda * r, q)
    }
}

/// `c·f` for `c = e^{ln_c} > 0`.
pub struct Scaled<'a, P: ?Sized> {
    pub inner: &'a P,
    pub ln_c: f64,
}

impl<P: CircleProfile + ?Sized> CircleProfile for Scaled<'_, P> {
    fn baseline(&self, r: f64) -> f64 {
        self.inner.baseline(r) + self.ln_c
    }
    fn excess(&self, r: f64, q: f64) -> Result<f64> {
        self.inner.excess(r, q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleParams {
    pub samples: usize,
    pub refine_tol: f64,
}

impl Default for CircleParams {
    fn default() -> Self {
        CircleParams {
            samples: DEFAULT_SAMPLES,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }
}

impl CircleParams {
    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "samples must be at least {MIN_SAMPLES}, got {}",
                self.samples
            )));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::InvalidParameter("refine_tol must be positive".into()));
        }
        Ok(())
    }
}

/// A refined local maximum of the modulus on one circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMax {
    pub turn: f64,
    /// Radians in `[0, 2π)`.
    pub theta: f64,
    pub excess: f64,
    pub log_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleMax {
    pub r: f64,
    /// Global maximizers in radians, `[0, 2π)`.
    pub maximizers: Vec<f64>,
    pub log_m: f64,
    pub degenerate: bool,
    pub baseline: f64,
    /// Local maxima whose value is within `candidate_window(log_m)` of the best,
    /// sorted by angle.
    pub local_maxima: Vec<LocalMax>,
}

impl CircleMax {
    pub fn best_excess(&self) -> f64 {
        self.log_m - self.baseline
    }

    pub fn global_maxima(&self, refine_tol: f64) -> impl Iterator<Item = &LocalMax> {
        let best = self.best_excess();
        self.local_maxima
            .iter()
            .filter(move |m| m.excess >= best - refine_tol)
    }
}

/// How far below `log M` a local maximum may sit and still be tracked.
pub fn candidate_window(log_m: f64) -> f64 {
    10f64.max(0.1 * log_m.abs())
}

fn golden_max<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;
    while b - a > tol && iterations < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        iterations += 1;
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

fn checked_excess<P: CircleProfile + ?Sized>(p: &P, r: f64, q: f64) -> Result<f64> {
    let v = p.excess(r, q)?;
    if v.is_nan() || v == f64::INFINITY {
        return Err(Error::NonFinite("circle excess"));
    }
    Ok(v)
}

fn normalize_turn(q: f64) -> f64 {
    let t = q - q.floor();
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

/// Best value near `guess` (turns): the guess itself or a golden-section
/// refinement within `half_width`.
fn local_value<P: CircleProfile + ?Sized>(
    p: &P,
    r: f64,
    guess: f64,
    half_width: f64,
) -> Result<(f64, f64)> {
    let v0 = checked_excess(p, r, guess)?;
    let (q, v) = golden_max(
        |q| checked_excess(p, r, q),
        guess - half_width,
        guess + half_width,
        TURN_TOL,
    )?;
    Ok(if v0 >= v { (guess, v0) } else { (normalize_turn(q), v) })
}

/// Dense uniform sampling followed by golden-section refinement of every
/// local maximum that can matter.
pub fn circle_max<P: CircleProfile + ?Sized>(p: &P, r: f64, params: &CircleParams) -> Result<CircleMax> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    params.validate()?;
    let k = params.samples;
    let step = 1.0 / k as f64;
    let vals = (0..k)
        .map(|j| checked_excess(p, r, j as f64 * step))
        .collect::<Result<Vec<f64>>>()?;
    let baseline = p.baseline(r);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi == f64::NEG_INFINITY {
        return Err(Error::NonFinite("function vanishes on the whole circle"));
    }
    if hi - lo < params.refine_tol {
        return Ok(CircleMax {
            r,
            maximizers: Vec::new(),
            log_m: baseline + hi,
            degenerate: true,
            baseline,
            local_maxima: Vec::new(),
        });
    }
    let window = candidate_window(baseline + hi);
    let mut maxima: Vec<LocalMax> = Vec::new();
    for j in 0..k {
        let v = vals[j];
        let prev = vals[(j + k - 1) % k];
        let next = vals[(j + 1) % k];
        let is_peak = (v > prev && v >= next) || (v >= prev && v > next);
        if !is_peak || v < hi - window {
            continue;
        }
        let q0 = j as f64 * step;
        let (q, e) = golden_max(|q| checked_excess(p, r, q), q0 - step, q0 + step, TURN_TOL)?;
        let (q, e) = if v >= e { (q0, v) } else { (normalize_turn(q), e) };
        maxima.push(LocalMax {
            turn: q,
            theta: turns_to_radians(q),
            excess: e,
            log_value: baseline + e,
        });
    }
    maxima.sort_by(|a, b| a.turn.total_cmp(&b.turn));
    // neighbouring grid peaks on a plateau refine to the same point
    let mut merged: Vec<LocalMax> = Vec::with_capacity(maxima.len());
    for m in maxima {
        match merged.last_mut() {
            Some(last) if turn_diff(m.turn, last.turn).abs() < 0.5 * step => {
                if m.excess > last.excess {
                    *last = m;
                }
            }
            _ => merged.push(m),
        }
    }
    if merged.len() > 1 {
        let (first, last) = (merged[0], merged[merged.len() - 1]);
        if turn_diff(first.turn, last.turn).abs() < 0.5 * step {
            let keep = if first.excess >= last.excess { first } else { last };
            merged.pop();
            merged[0] = keep;
        }
    }
    let best = merged.iter().map(|m| m.excess).fold(f64::NEG_INFINITY, f64::max);
    let maximizers = merged
        .iter()
        .filter(|m| m.excess >= best - params.refine_tol)
        .map(|m| m.theta)
        .collect();
    Ok(CircleMax {
        r,
        maximizers,
        log_m: baseline + best,
        degenerate: false,
        baseline,
        local_maxima: merged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceParams {
    pub circle: CircleParams,
    /// Radians.
    pub angle_tol: f64,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            circle: CircleParams::default(),
            angle_tol: DEFAULT_ANGLE_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSample {
    pub r: f64,
    pub theta: f64,
    pub turn: f64,
    pub log_value: f64,
    pub excess: f64,
    pub is_global: bool,
}

/// A maximum curve sampled on consecutive grid radii.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: usize,
    /// Grid index of the first sample.
    pub first_index: usize,
    pub samples: Vec<BranchSample>,
}

impl Branch {
    pub fn at(&self, index: usize) -> Option<&BranchSample> {
        index
            .checked_sub(self.first_index)
            .and_then(|j| self.samples.get(j))
    }

    fn last_index(&self) -> usize {
        self.first_index + self.samples.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub radii: Vec<f64>,
    pub circles: Vec<CircleMax>,
    pub branches: Vec<Branch>,
    /// Radii whose circle was degenerate; no branches are traced there.
    pub degenerate_radii: Vec<f64>,
}

impl Trace {
    pub fn radial_step(&self) -> f64 {
        if self.radii.len() < 2 {
            0.0
        } else {
            self.radii[1] - self.radii[0]
        }
    }

    pub fn globals_at(&self, index: usize) -> Vec<usize> {
        self.branches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.at(index).map_or(false, |s| s.is_global))
            .map(|(i, _)| i)
            .collect()
    }
}

fn radius_grid(r_min: f64, r_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter("steps must be at least 2".into()));
    }
    let h = (r_max - r_min) / steps as f64;
    Ok((0..=steps)
        .map(|i| if i == steps { r_max } else { r_min + i as f64 * h })
        .collect())
}

/// Tracks every candidate local maximum across the radius grid
/// `r_min + i (r_max − r_min)/steps`, `i = 0..=steps`.
pub fn trace_branches<P: CircleProfile + ?Sized>(
    p: &P,
    r_min: f64,
    r_max: f64,
    steps: usize,
    params: &TraceParams,
) -> Result<Trace> {
    if !(params.angle_tol > 0.0) {
        return Err(Error::InvalidParameter("angle_tol must be positive".into()));
    }
    let radii = radius_grid(r_min, r_max, steps)?;
    let mut circles = Vec::with_capacity(radii.len());
    let mut branches: Vec<Branch> = Vec::new();
    let mut degenerate_radii = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        let cm = circle_max(p, r, &params.circle)?;
        if cm.degenerate {
            degenerate_radii.push(r);
            circles.push(cm);
            continue;
        }
        let best = cm.best_excess();
        let samples: Vec<BranchSample> = cm
            .local_maxima
            .iter()
            .map(|m| BranchSample {
                r,
                theta: m.theta,
                turn: m.turn,
                log_value: m.log_value,
                excess: m.excess,
                is_global: m.excess >= best - params.circle.refine_tol,
            })
            .collect();
        let active: Vec<usize> = branches
            .iter()
            .enumerate()
            .filter(|(_, b)| i > 0 && b.last_index() == i - 1)
            .map(|(k, _)| k)
            .collect();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for &bk in &active {
            let last = branches[bk].samples.last().expect("branches are nonempty");
            let mut near: Vec<(f64, usize)> = samples
                .iter()
                .enumerate()
                .map(|(j, s)| (2.0 * PI * turn_diff(s.turn, last.turn).abs(), j))
                .filter(|(d, _)| *d <= params.angle_tol)
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            if near.len() >= 2 && near[1].0 < 2.0 * near[0].0 {
                return Err(Error::StepTooCoarse {
                    r,
                    detail: format!(
                        "branch {} has candidates at {:.6} and {:.6} rad",
                        branches[bk].id, samples[near[0].1].theta, samples[near[1].1].theta
                    ),
                });
            }
            pairs.extend(near.into_iter().map(|(d, j)| (d, bk, j)));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut branch_used = vec![false; branches.len()];
        let mut sample_used = vec![false; samples.len()];
        for (_, bk, j) in pairs {
            if branch_used[bk] || sample_used[j] {
                continue;
            }
            branch_used[bk] = true;
            sample_used[j] = true;
            branches[bk].samples.push(samples[j]);
        }
        for (j, s) in samples.iter().enumerate() {
            if !sample_used[j] {
                let id = branches.len();
                branches.push(Branch {
                    id,
                    first_index: i,
                    samples: vec![*s],
                });
            }
        }
        circles.push(cm);
    }
    Ok(Trace {
        radii,
        circles,
        branches,
        degenerate_radii,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscontinuityKind {
    Jump,
    IsolatedPoint,
}

impl DiscontinuityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiscontinuityKind::Jump => "jump",
            DiscontinuityKind::IsolatedPoint => "isolated-point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discontinuity {
    pub r: f64,
    /// Radians in `[0, 2π)`.
    pub theta: f64,
    pub branch_id: usize,
    /// Log-margin by which the branch fails to reach smaller radii.
    pub left_gap: f64,
    pub kind: DiscontinuityKind,
}

/// Global maximizer at `r`, preferring 4× angular sampling when the default
/// grid leaves a tie.
fn decisive_global<P: CircleProfile + ?Sized>(
    p: &P,
    r: f64,
    params: &TraceParams,
) -> Result<(CircleMax, Vec<LocalMax>)> {
    let cm = circle_max(p, r, &params.circle)?;
    let globals: Vec<LocalMax> = cm.global_maxima(params.circle.refine_tol).cloned().collect();
    if globals.len() <= 1 {
        return Ok((cm, globals));
    }
    let fine = CircleParams {
        samples: 4 * params.circle.samples,
        ..params.circle
    };
    let cm = circle_max(p, r, &fine)?;
    let globals = cm.global_maxima(params.circle.refine_tol).cloned().collect();
    Ok((cm, globals))
}

/// Emits a discontinuity wherever the global maximizer moves to a branch that
/// was not global one grid radius earlier. The radius is bisected to `tol`.
pub fn detect_discontinuities<P: CircleProfile + ?Sized>(
    p: &P,
    r_min: f64,
    r_max: f64,
    steps: usize,
    tol: f64,
    params: &TraceParams,
) -> Result<Vec<Discontinuity>> {
    let trace = trace_branches(p, r_min, r_max, steps, params)?;
    discontinuities_from_trace(p, &trace, tol, params)
}

pub fn discontinuities_from_trace<P: CircleProfile + ?Sized>(
    p: &P,
    trace: &Trace,
    tol: f64,
    params: &TraceParams,
) -> Result<Vec<Discontinuity>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let step = trace.radial_step();
    let mut out = Vec::new();
    for i in 1..trace.radii.len() {
        let prev = trace.globals_at(i - 1);
        let now = trace.globals_at(i);
        if prev.is_empty() || now.is_empty() || prev.iter().any(|k| now.contains(k)) {
            continue;
        }
        let mut fresh: Vec<usize> = now.into_iter().filter(|k| !prev.contains(k)).collect();
        if fresh.len() > 1 {
            let (_, globals) = decisive_global(p, trace.radii[i], params)?;
            fresh.retain(|&k| {
                let s = trace.branches[k].at(i).expect("global at i");
                globals
                    .iter()
                    .any(|g| 2.0 * PI * turn_diff(g.turn, s.turn).abs() <= params.angle_tol)
            });
            if fresh.len() != 1 {
                let a = trace.branches[fresh[0]].at(i).map_or(f64::NAN, |s| s.theta);
                let b = fresh
                    .get(1)
                    .and_then(|&k| trace.branches[k].at(i))
                    .map_or(f64::NAN, |s| s.theta);
                return Err(Error::AmbiguousTransfer {
                    r: trace.radii[i],
                    theta_a: a,
                    theta_b: b,
                });
            }
        }
        let old = trace.branches[prev[0]].at(i - 1).expect("global at i - 1").turn;
        let bk = fresh[0];
        let new = trace.branches[bk].at(i).expect("global at i").turn;
        // at ρ, is the global maximizer nearer the new branch than the old one?
        let on_new = |rho: f64| -> Result<(bool, f64)> {
            let (cm, globals) = decisive_global(p, rho, params)?;
            let g = globals
                .iter()
                .max_by(|a, b| a.excess.total_cmp(&b.excess))
                .copied()
                .ok_or(Error::NonFinite("empty maximizer set"))?;
            let _ = cm;
            Ok((turn_diff(g.turn, new).abs() < turn_diff(g.turn, old).abs(), g.turn))
        };
        let (mut lo, mut hi) = (trace.radii[i - 1], trace.radii[i]);
        let mut q_hi = new;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let (is_new, q) = on_new(mid)?;
            if is_new {
                hi = mid;
                q_hi = q;
            } else {
                lo = mid;
            }
        }
        let r_prev = (hi - step).max(0.5 * hi);
        let cm_prev = circle_max(p, r_prev, &params.circle)?;
        let width = params.angle_tol / (2.0 * PI);
        let (_, v) = local_value(p, r_prev, q_hi, width)?;
        let left_gap = cm_prev.best_excess() - v;
        if left_gap > 0.0 {
            out.push(Discontinuity {
                r: hi,
                theta: turns_to_radians(q_hi),
                branch_id: trace.branches[bk].id,
                left_gap,
                kind: DiscontinuityKind::Jump,
            });
        }
    }
    out.sort_by(|a, b| a.r.total_cmp(&b.r));
    Ok(out)
}

fn golden_min<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let (x, v) = golden_max(|x| f(x).map(|v| -v), a, b, tol)?;
    Ok((x, -v))
}

/// Points of the maximum modulus set that are global at a single radius:
/// a non-global branch touches the global value at `r*` and falls back below
/// by more than `refine_tol` at `r* ± tol`.
pub fn isolated_points<P: CircleProfile + ?Sized>(
    p: &P,
    r_min: f64,
    r_max: f64,
    steps: usize,
    tol: f64,
    params: &TraceParams,
) -> Result<Vec<Discontinuity>> {
    let trace = trace_branches(p, r_min, r_max, steps, params)?;
    isolated_points_from_trace(p, &trace, tol, params)
}

pub fn isolated_points_from_trace<P: CircleProfile + ?Sized>(
    p: &P,
    trace: &Trace,
    tol: f64,
    params: &TraceParams,
) -> Result<Vec<Discontinuity>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let refine_tol = params.circle.refine_tol;
    let n = trace.radii.len();
    let mut out: Vec<Discontinuity> = Vec::new();
    for i in 1..n.saturating_sub(1) {
        let globals = trace.globals_at(i);
        let Some(&a) = globals
            .iter()
            .find(|&&k| (i - 1..=i + 1).all(|j| trace.branches[k].at(j).map_or(false, |s| s.is_global)))
        else {
            continue;
        };
        let branch_a = &trace.branches[a];
        for (bk, branch_b) in trace.branches.iter().enumerate() {
            if bk == a {
                continue;
            }
            let (Some(b0), Some(b1), Some(b2)) =
                (branch_b.at(i - 1), branch_b.at(i), branch_b.at(i + 1))
            else {
                continue;
            };
            let m = |s: &BranchSample, j: usize| branch_a.at(j).expect("global run").excess - s.excess;
            let (m0, m1, m2) = (m(b0, i - 1), m(b1, i), m(b2, i + 1));
            if !(m1 <= m0 && m1 <= m2) || b0.is_global || b2.is_global {
                continue;
            }
            let qa = branch_a.at(i).expect("global run").turn;
            let qb = b1.turn;
            let move_a = turn_diff(branch_a.at(i + 1).unwrap().turn, branch_a.at(i - 1).unwrap().turn).abs();
            let move_b = turn_diff(b2.turn, b0.turn).abs();
            let width = 2.0 / params.circle.samples as f64;
            let margin = |rho: f64| -> Result<f64> {
                let (_, va) = local_value(p, rho, qa, width + move_a)?;
                let (_, vb) = local_value(p, rho, qb, width + move_b)?;
                Ok(va - vb)
            };
            let (lo, hi) = (trace.radii[i - 1], trace.radii[i + 1]);
            let (r_star, m_min) = golden_min(margin, lo, hi, 1e-12 * hi)?;
            if m_min > refine_tol || m_min < -refine_tol {
                continue;
            }
            let left = margin(r_star - tol)?;
            let right = margin(r_star + tol)?;
            if left <= refine_tol || right <= refine_tol {
                continue;
            }
            if out.iter().any(|d| d.branch_id == branch_b.id && (d.r - r_star).abs() < tol) {
                continue;
            }
            let (qb_star, _) = local_value(p, r_star, qb, width + move_b)?;
            out.push(Discontinuity {
                r: r_star,
                theta: turns_to_radians(qb_star),
                branch_id: branch_b.id,
                left_gap: left,
                kind: DiscontinuityKind::IsolatedPoint,
            });
        }
    }
    out.sort_by(|a, b| a.r.total_cmp(&b.r));
    Ok(out)
}

/// Smallest sampled radius from which on every global maximizer lies on the
/// real axis (within `angle_tol` radians of 0 or π).
pub fn real_axis_dominance_radius(trace: &Trace, angle_tol: f64) -> Option<f64> {
    let on_axis = |cm: &CircleMax| {
        !cm.degenerate
            && cm.maximizers.iter().all(|&t| {
                let d0 = t.min(2.0 * PI - t);
                let dpi = (t - PI).abs();
                d0 <= angle_tol || dpi <= angle_tol
            })
    };
    let mut first = None;
    for (i, cm) in trace.circles.iter().enumerate().rev() {
        if on_axis(cm) {
            first = Some(i);
        } else {
            break;
        }
    }
    first.map(|i| trace.radii[i])
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrderEstimate {
    /// The sequence settled within 0.05 over its last three points.
    Finite(f64),
    /// The sequence kept increasing.
    Infinite(Vec<f64>),
    /// Neither settled nor increasing.
    Inconclusive(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub radii: Vec<f64>,
    /// `ln ln M(r) / ln r` at the kept radii.
    pub sequence: Vec<f64>,
    /// Radii skipped because `M(r) ≤ 1` or `r ≤ 1`.
    pub skipped: Vec<f64>,
    pub estimate: OrderEstimate,
}

pub fn estimate_order<P: CircleProfile + ?Sized>(
    p: &P,
    r_grid: &[f64],
    params: &CircleParams,
) -> Result<OrderReport> {
    if r_grid.len() < 4 || r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "r_grid must be increasing with at least 4 points".into(),
        ));
    }
    let mut radii = Vec::new();
    let mut sequence = Vec::new();
    let mut skipped = Vec::new();
    for &r in r_grid {
        let log_m = circle_max(p, r, params)?.log_m;
        if log_m <= 0.0 || r <= 1.0 {
            skipped.push(r);
            continue;
        }
        radii.push(r);
        sequence.push(log_m.ln() / r.ln());
    }
    let k = sequence.len();
    let estimate = if k >= 3 && (k - 3..k - 1).all(|j| (sequence[j + 1] - sequence[j]).abs() < 0.05) {
        OrderEstimate::Finite(sequence[k - 1])
    } else if k >= 2 && sequence.windows(2).all(|w| w[1] > w[0]) {
        OrderEstimate::Infinite(sequence.clone())
    } else {
        OrderEstimate::Inconclusive(sequence.clone())
    };
    Ok(OrderReport {
        radii,
        sequence,
        skipped,
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn hardy() -> FunctionModel {
        FunctionModel::hardy(1.0).unwrap()
    }

    fn near(theta: f64, target: f64, tol: f64) -> bool {
        let d = (theta - target).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d) <= tol
    }

    #[test]
    fn exponential_circle() {
        let cm = circle_max(&FunctionModel::Exponential, 2.0, &CircleParams::default()).unwrap();
        assert_eq!(cm.maximizers, vec![0.0]);
        assert!((cm.log_m - 2.0).abs() < 1e-15);
        assert!(!cm.degenerate);
    }

    #[test]
    fn monomial_is_degenerate() {
        let m = FunctionModel::Monomial {
            c: Complex64::new(2.0, 1.0),
            n: 4,
        };
        let cm = circle_max(&m, 1.7, &CircleParams::default()).unwrap();
        assert!(cm.degenerate);
        assert!(cm.maximizers.is_empty());
        assert!((cm.log_m - (5f64.sqrt().ln() + 4.0 * 1.7f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let p = CircleParams { samples: 100, ..Default::default() };
        assert!(circle_max(&hardy(), 1.0, &p).is_err());
        assert!(circle_max(&hardy(), 0.0, &CircleParams::default()).is_err());
    }

    #[test]
    fn hardy_side_follows_sign_of_sine() {
        let h = hardy();
        let oracle = CircleParams { samples: 1 << 16, ..Default::default() };
        for (r, side) in [(3.1, 0.0), (3.2, PI)] {
            let cm = circle_max(&h, r, &CircleParams::default()).unwrap();
            assert_eq!(cm.maximizers.len(), 1);
            assert!(near(cm.maximizers[0], side, 1e-9));
            let dense = circle_max(&h, r, &oracle).unwrap();
            assert!((dense.log_m - cm.log_m).abs() <= 1e-9 * cm.log_m);
        }
    }

    #[test]
    fn exponential_single_branch() {
        let t = trace_branches(&FunctionModel::Exponential, 1.0, 2.0, 20, &TraceParams::default()).unwrap();
        assert_eq!(t.branches.len(), 1);
        assert!(t.branches[0].samples.iter().all(|s| s.theta == 0.0 && s.is_global));
    }

    #[test]
    fn hardy_two_branches_swap_near_pi() {
        let t = trace_branches(&hardy(), 3.0, 3.3, 30, &TraceParams::default()).unwrap();
        assert_eq!(t.branches.len(), 2);
        for b in &t.branches {
            assert_eq!(b.samples.len(), 31);
            for s in &b.samples {
                assert_eq!(s.is_global, (s.r < PI) == near(s.theta, 0.0, 1e-9));
            }
        }
    }

    #[test]
    fn hardy_discontinuities() {
        let d = detect_discontinuities(&hardy(), 3.0, 10.0, 700, DEFAULT_RADIAL_TOL, &TraceParams::default())
            .unwrap();
        let radii: Vec<f64> = d.iter().map(|x| x.r).collect();
        assert_eq!(radii.len(), 3, "{radii:?}");
        for (k, x) in d.iter().enumerate() {
            assert!((x.r - (k + 1) as f64 * PI).abs() < 1e-6);
            assert!(x.left_gap > 0.0);
            assert_eq!(x.kind, DiscontinuityKind::Jump);
            let side = if k % 2 == 0 { PI } else { 0.0 };
            assert!(near(x.theta, side, 1e-9));
        }
    }

    #[test]
    fn hardy_rescaled_discontinuities() {
        let h = hardy();
        let scaled = Rescaled { inner: &h, lambda: 2.0 };
        let p = TraceParams::default();
        let a = detect_discontinuities(&h, 3.0, 7.0, 400, 1e-7, &p).unwrap();
        let b = detect_discontinuities(&scaled, 1.5, 3.5, 400, 1e-7, &p).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.r / 2.0 - y.r).abs() < 1e-6);
        }
    }

    #[test]
    fn left_gap_stable_under_doubled_sampling() {
        let h = hardy();
        let p1 = TraceParams::default();
        let p2 = TraceParams {
            circle: CircleParams { samples: 2 * DEFAULT_SAMPLES, ..p1.circle },
            ..p1
        };
        let a = detect_discontinuities(&h, 3.0, 7.0, 200, 1e-6, &p1).unwrap();
        let b = detect_discontinuities(&h, 3.0, 7.0, 200, 1e-6, &p2).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            let ratio = x.left_gap / y.left_gap;
            assert!((0.5..=2.0).contains(&ratio));
        }
    }

    #[test]
    fn exponential_has_no_discontinuities() {
        let d = detect_discontinuities(&FunctionModel::Exponential, 1.0, 10.0, 90, 1e-6, &TraceParams::default())
            .unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn tyler_isolated_points_at_multiples_of_pi() {
        let pts = isolated_points(&FunctionModel::Tyler, 3.0, 7.0, 400, 1e-4, &TraceParams::default()).unwrap();
        assert!(!pts.is_empty());
        for x in &pts {
            let k = (x.r / PI).round();
            assert!((x.r - k * PI).abs() < 1e-4);
            assert!(near(x.theta, PI, 1e-6));
            assert_eq!(x.kind, DiscontinuityKind::IsolatedPoint);
        }
    }

    #[test]
    fn tyler_global_at_one_grid_radius() {
        let t = trace_branches(&FunctionModel::Tyler, PI - 0.01, PI + 0.01, 2, &TraceParams::default()).unwrap();
        let neg = t
            .branches
            .iter()
            .find(|b| near(b.samples[0].theta, PI, 1e-6))
            .unwrap();
        let flags: Vec<bool> = neg.samples.iter().map(|s| s.is_global).collect();
        assert_eq!(flags, vec![false, true, false]);
    }

    #[test]
    fn hardy_has_no_isolated_points() {
        let pts = isolated_points(&hardy(), 3.0, 7.0, 400, 1e-4, &TraceParams::default()).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn monomial_trace_is_degenerate() {
        let m = FunctionModel::Monomial { c: Complex64::new(1.0, 0.0), n: 2 };
        let p = TraceParams::default();
        let t = trace_branches(&m, 1.0, 2.0, 4, &p).unwrap();
        assert_eq!(t.degenerate_radii.len(), 5);
        assert!(isolated_points_from_trace(&m, &t, 1e-4, &p).unwrap().is_empty());
    }

    #[test]
    fn order_estimates() {
        let p = CircleParams::default();
        let e = estimate_order(&FunctionModel::Exponential, &[10.0, 20.0, 40.0, 80.0], &p).unwrap();
        match e.estimate {
            OrderEstimate::Finite(rho) => assert!((rho - 1.0).abs() < 0.05),
            other => panic!("{other:?}"),
        }
        let h = estimate_order(&hardy(), &[2.0, 2.5, 3.0, 3.5], &p).unwrap();
        assert!(h.sequence.windows(2).all(|w| w[1] > w[0]));
        assert!(h.sequence.iter().all(|&s| s > 2.0));
        assert!(matches!(h.estimate, OrderEstimate::Infinite(_)));
        let cubic = FunctionModel::Polynomial {
            coefficients: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        let c = estimate_order(&cubic, &[1e2, 1e4, 1e8, 1e16], &p).unwrap();
        assert!(c.sequence.windows(2).all(|w| w[1] < w[0]));
        assert!(*c.sequence.last().unwrap() < 0.2);
    }

    #[test]
    fn hardy_axis_dominance() {
        let t = trace_branches(&hardy(), 1.0, 4.0, 60, &TraceParams::default()).unwrap();
        let r = real_axis_dominance_radius(&t, 1e-6).unwrap();
        assert!(r <= 3.0);
    }
}
