//! Tuning the shifts `δ_n` so that the model function has its maximum
//! modulus discontinuities at prescribed radii, and certifying them against
//! every admissible perturbation.
//!
//! The model modulus is `e^{u}` on the tract, perturbed by at most `e⁻¹`
//! everywhere. All comparisons are made in log scale.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::conformal::{
    default_tract_h, growth_profile, solve_reg, verify_ell, verify_gap, EllReport, GrowthProfile,
    HarmonicSolution,
};
use crate::error::{Error, Result};
use crate::tract::{build_tract, normalize_radii, LogSpec, RadiiSpec, TractGeometry};

/// Additive error allowed between the model and the entire function, for
/// real parts beyond `L + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationBound {
    pub m_const: f64,
    pub threshold: f64,
}

impl PerturbationBound {
    pub fn new(m_const: f64) -> Result<Self> {
        if !(m_const.ln() > 2.0) {
            return Err(Error::InvalidParameter(format!("ln M = {} must exceed 2", m_const.ln())));
        }
        Ok(PerturbationBound { m_const, threshold: (-1.0f64).exp() })
    }

    pub fn from_l(l: f64) -> Result<Self> {
        Self::new(l.exp())
    }

    pub fn l(&self) -> f64 {
        self.m_const.ln()
    }

    fn ln_threshold(&self) -> f64 {
        self.threshold.ln()
    }
}

/// `ln(e^a + e^b)`.
fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^a − e^b)`, or `−∞` when `a ≤ b`.
fn ln_sub(a: f64, b: f64) -> f64 {
    if a <= b {
        return f64::NEG_INFINITY;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp_m1()).ln()
}

/// Default tuning tolerance `min(1e−3, ε_n/80)`.
pub fn default_tol(eps: f64) -> f64 {
    (1e-3f64).min(eps / 80.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiEvaluation {
    pub n: usize,
    pub delta: Vec<f64>,
    /// First real part in `I_n` where the lower channel catches up with the
    /// upper one, minus `x_n`.
    pub value: f64,
    /// Range of `value` over all admissible perturbations.
    pub robust: (f64, f64),
    /// Crossing measured from the left wall of `I_n`.
    pub offset: f64,
    pub h: f64,
}

/// Grid rows strictly inside `(lo, hi)`.
fn rows(sol: &HarmonicSolution, lo: f64, hi: f64) -> Vec<usize> {
    (0..sol.ny()).filter(|&j| sol.ys[j] > lo && sol.ys[j] < hi).collect()
}

/// Maximum over `rows` of the interpolant at fraction `tau` of cell column `i`.
fn cell_max(sol: &HarmonicSolution, i: usize, tau: f64, rows: &[usize]) -> f64 {
    rows.iter()
        .map(|&j| {
            let a = sol.at(i, j);
            if tau == 0.0 {
                a
            } else {
                (1.0 - tau) * a + tau * sol.at(i + 1, j)
            }
        })
        .fold(0.0, f64::max)
}

/// First point after the wall column `i0` where `wins(upper max, lower max)`
/// holds, as an offset from the wall. Each cell is bisected on the bit
/// pattern of the fraction, which resolves offsets far below the spacing
/// of doubles near `x_n`.
fn crossing(
    sol: &HarmonicSolution,
    i0: usize,
    i_end: usize,
    upper: &[usize],
    lower: &[usize],
    wins: &dyn Fn(f64, f64) -> bool,
) -> Option<f64> {
    let test = |i: usize, tau: f64| wins(cell_max(sol, i, tau, upper), cell_max(sol, i, tau, lower));
    if test(i0, 0.0) {
        return Some(0.0);
    }
    for k in i0..i_end {
        if !(test(k + 1, 0.0)) {
            continue;
        }
        let (mut lo, mut hi) = (0u64, 1.0f64.to_bits());
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if test(k, f64::from_bits(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let tau = f64::from_bits(hi);
        return Some((sol.xs[k] - sol.xs[i0]) + tau * (sol.xs[k + 1] - sol.xs[k]));
    }
    None
}

fn column_index(sol: &HarmonicSolution, x: f64) -> Result<usize> {
    sol.xs
        .iter()
        .position(|&v| v == x)
        .ok_or_else(|| Error::GridTooCoarse(format!("{x} is not a grid column")))
}

/// `φ_n` on a solved tract.
pub fn phi_n(sol: &HarmonicSolution, tract: &TractGeometry, n: usize, bound: &PerturbationBound) -> Result<PhiEvaluation> {
    if n == 0 || n > tract.n {
        return Err(Error::InvalidParameter(format!("sector {n} outside 1..={}", tract.n)));
    }
    let (wall, end) = tract.i_interval(n);
    if end > tract.trust_x() {
        return Err(Error::OutsideTrustRegion(format!("I_{n} ends at {end}, beyond {}", tract.trust_x())));
    }
    let r4 = tract.rect(n, 4).expect("sector rectangles");
    let i0 = column_index(sol, r4.x.lo)?;
    let i_end = column_index(sol, r4.x.hi)?;
    let upper = rows(sol, 0.0, 1.0);
    let lower = rows(sol, -1.0, 0.0);
    let c = bound.ln_threshold();
    let plain = |m1: f64, m4: f64| m1 <= m4;
    let loose = |m1: f64, m4: f64| m4 > 0.0 && ln_add(m4, c) >= ln_sub(m1, c);
    let strict = |m1: f64, m4: f64| m4 > 0.0 && ln_sub(m4, c) >= ln_add(m1, c);
    let none = || Error::NoSignChange(format!("upper channel dominates all of I_{n}"));
    let offset = crossing(sol, i0, i_end, &upper, &lower, &plain).ok_or_else(none)?;
    let lo = crossing(sol, i0, i_end, &upper, &lower, &loose).ok_or_else(none)?;
    let hi = crossing(sol, i0, i_end, &upper, &lower, &strict).ok_or_else(none)?;
    let d = tract.delta_n(n);
    debug_assert!(wall == tract.x(n) - d);
    Ok(PhiEvaluation {
        n,
        delta: tract.delta.clone(),
        value: offset - d,
        robust: (lo - d, hi - d),
        offset,
        h: sol.h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaParams {
    /// Tolerance for every sector; `None` picks [`default_tol`] per sector.
    pub tol: Option<f64>,
    /// Maximum number of outer sweeps.
    pub budget: usize,
    /// Grid spacing; `None` picks the default for the tract.
    pub h: Option<f64>,
}

impl Default for DeltaParams {
    fn default() -> Self {
        DeltaParams { tol: None, budget: 5, h: None }
    }
}

#[derive(Debug, Clone)]
pub struct DeltaSolution {
    pub delta: Vec<f64>,
    pub tolerances: Vec<f64>,
    /// `φ_n` at the returned shifts, one per tuned sector.
    pub phi: Vec<PhiEvaluation>,
    pub sweeps: usize,
    pub solves: usize,
    /// `(n, φ_n(δ = 0), φ_n(δ = ε_n/8))` with the other shifts frozen, one
    /// entry per sector per sweep.
    pub endpoint_values: Vec<(usize, f64, f64)>,
    pub tract: TractGeometry,
    pub solution: Arc<HarmonicSolution>,
}

struct Evaluator<'a> {
    logspec: &'a LogSpec,
    ell: f64,
    h: Option<f64>,
    bound: PerturbationBound,
    solves: usize,
}

impl Evaluator<'_> {
    fn solve(&mut self, delta: &[f64]) -> Result<(TractGeometry, HarmonicSolution)> {
        let tract = build_tract(self.logspec, delta, self.ell, delta.len())?;
        let h = self.h.unwrap_or_else(|| default_tract_h(&tract));
        let sol = solve_reg(&tract, h)?;
        self.solves += 1;
        Ok((tract, sol))
    }

    fn phi(&mut self, delta: &[f64], n: usize) -> Result<f64> {
        let (tract, sol) = self.solve(delta)?;
        Ok(phi_n(&sol, &tract, n, &self.bound)?.value)
    }
}

/// Gauss–Seidel over `sectors`: each `δ_n` is bisected on `[0, ε_n/8]`
/// with the others frozen until `|φ_n| < tol`; sweeps repeat until all
/// sectors are within tolerance at once.
///
/// `logspec` must already contain any padding sector; its shift stays 0.
pub fn solve_delta(
    logspec: &LogSpec,
    sectors: &[usize],
    ell: f64,
    params: &DeltaParams,
    bound: &PerturbationBound,
) -> Result<DeltaSolution> {
    let total = logspec.x_seq.len();
    if sectors.iter().any(|&n| n == 0 || n >= total) {
        return Err(Error::InvalidParameter(format!(
            "tuned sectors must lie in 1..{total} (the last sector is padding)"
        )));
    }
    let tolerances: Vec<f64> = sectors
        .iter()
        .map(|&n| params.tol.unwrap_or_else(|| default_tol(logspec.eps_seq[n - 1])))
        .collect();
    let mut ev = Evaluator { logspec, ell, h: params.h, bound: *bound, solves: 0 };
    let mut delta = vec![0.0; total];
    let mut endpoint_values = Vec::new();
    for sweep in 1..=params.budget.max(1) {
        for (k, &n) in sectors.iter().enumerate() {
            let tol = tolerances[k];
            let top = logspec.eps_seq[n - 1] / 8.0;
            let mut d = delta.clone();
            d[n - 1] = 0.0;
            let at_lo = ev.phi(&d, n)?;
            d[n - 1] = top;
            let at_hi = ev.phi(&d, n)?;
            endpoint_values.push((n, at_lo, at_hi));
            if !(at_lo > 0.0 && at_hi < 0.0) {
                return Err(Error::Precondition(format!(
                    "endpoint signs of phi_{n} violated: {at_lo:e} at 0, {at_hi:e} at {top:e}"
                )));
            }
            let (mut a, mut b) = (0.0, top);
            let mut chosen = None;
            if at_lo.abs() < tol {
                chosen = Some(0.0);
            } else if at_hi.abs() < tol {
                chosen = Some(top);
            }
            let mut iterations = 0;
            while chosen.is_none() {
                iterations += 1;
                let m = 0.5 * (a + b);
                d[n - 1] = m;
                let v = ev.phi(&d, n)?;
                if v.abs() < tol || iterations > 60 {
                    chosen = Some(m);
                } else if v > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            delta[n - 1] = chosen.expect("bisection result");
        }
        let (tract, sol) = ev.solve(&delta)?;
        let phi: Vec<PhiEvaluation> = sectors
            .iter()
            .map(|&n| phi_n(&sol, &tract, n, bound))
            .collect::<Result<_>>()?;
        let done = phi.iter().zip(&tolerances).all(|(p, &t)| p.value.abs() < t);
        if done {
            return Ok(DeltaSolution {
                delta,
                tolerances,
                phi,
                sweeps: sweep,
                solves: ev.solves,
                endpoint_values,
                tract,
                solution: Arc::new(sol),
            });
        }
    }
    Err(Error::NonConvergence(format!(
        "shift tuning did not settle within {} sweeps",
        params.budget
    )))
}

/// Per-sector verdict with the margin of every inequality involved. Margins
/// are differences of log-moduli after the worst-case perturbation, except
/// the crosscut and gap margins which are in `Re G` directly.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuityCertificate {
    pub n: usize,
    pub x_n: f64,
    pub delta_n: f64,
    /// Real part at which the maximizer jumps.
    pub achieved: f64,
    /// `achieved − x_n`.
    pub target_miss: f64,
    /// Jump location over all admissible perturbations.
    pub robust_interval: (f64, f64),
    pub tol: f64,
    pub crosscut_margin: f64,
    pub gap_margin: f64,
    pub containment_margin: f64,
    pub transfer_margin: f64,
    pub robust: bool,
    pub within_tol: bool,
}

impl DiscontinuityCertificate {
    pub fn margins(&self) -> [f64; 4] {
        [self.crosscut_margin, self.gap_margin, self.containment_margin, self.transfer_margin]
    }
}

/// The vertical segment of sector `n` at `t` that separates the base point
/// from infinity.
fn separating_channel(tract: &TractGeometry, n: usize, t: f64) -> (f64, f64) {
    let (x, e) = (tract.x(n), tract.eps(n));
    if t <= x + e / 2.0 {
        (0.0, 1.0)
    } else if t <= x + e {
        (-1.0, -e / 32.0)
    } else {
        (-1.0, 1.0)
    }
}

/// Checks every inequality behind the jump of sector `n`. Failed checks
/// give a `−∞` margin and a non-robust certificate rather than an error.
pub fn certify_discontinuity(
    sol: &HarmonicSolution,
    tract: &TractGeometry,
    n: usize,
    bound: &PerturbationBound,
    tol: f64,
) -> Result<DiscontinuityCertificate> {
    let phi = phi_n(sol, tract, n, bound)?;
    let c = bound.ln_threshold();
    let (x, e) = (tract.x(n), tract.eps(n));
    let columns = |lo: f64, hi: f64| sol.xs.iter().cloned().filter(move |&t| t >= lo && t <= hi);

    // crosscuts of the sector
    let start = if n == 1 { 0.0 } else { tract.x(n - 1) + 1.5 * tract.eps(n - 1) };
    let crosscut = columns(start, x + 1.5 * e)
        .map(|t| {
            let (lo, hi) = separating_channel(tract, n, t);
            sol.column_max(t, lo, hi).0
        })
        .fold(f64::INFINITY, f64::min)
        - 4.0;

    let gap = match verify_gap(sol, tract, n) {
        Ok(g) => g.min_gap - crate::conformal::checks::GAP_THRESHOLD,
        Err(_) => f64::NEG_INFINITY,
    };

    // inside beats e⁴ − e⁻¹ at every column past x₁ − 2ε₁; outside is
    // the perturbation alone
    let inside = columns(tract.x(1) - 2.0 * tract.eps(1), tract.trust_x())
        .map(|t| sol.column_max(t, -1.0, 1.0).0)
        .fold(f64::INFINITY, f64::min);
    let containment = ln_sub(inside, c) - ln_sub(4.0, c);

    // worst-case comparison just before and just after the jump
    let wall = x - tract.delta_n(n);
    let eta = tol / 4.0;
    let below = wall + phi.robust.0.max(-tract.delta_n(n)) + tract.delta_n(n) - eta;
    let above = (wall + phi.robust.1 + tract.delta_n(n) + eta).min(wall + e / 8.0);
    let lower_ln = |t: f64| {
        let m4 = sol.column_max(t, -1.0, 0.0).0;
        if m4 > 0.0 {
            ln_add(m4, c)
        } else {
            c
        }
    };
    let m1_below = sol.column_max(below, 0.0, 1.0).0;
    let before = ln_sub(m1_below, c) - lower_ln(below);
    let m1_above = sol.column_max(above, 0.0, 1.0).0;
    let m4_above = sol.column_max(above, -1.0, 0.0).0;
    let after = ln_sub(m4_above, c) - ln_add(m1_above, c);
    let transfer = before.min(after);

    let need = 2.0 * bound.threshold;
    let robust = [crosscut, gap, containment, transfer].iter().all(|&m| m > need);
    Ok(DiscontinuityCertificate {
        n,
        x_n: x,
        delta_n: tract.delta_n(n),
        achieved: x + phi.value,
        target_miss: phi.value,
        robust_interval: (x + phi.robust.0, x + phi.robust.1),
        tol,
        crosscut_margin: crosscut,
        gap_margin: gap,
        containment_margin: containment,
        transfer_margin: transfer,
        robust,
        within_tol: phi.value.abs() < tol,
    })
}

/// `(x, y) ↦ (e^x, y mod 2π)`.
pub fn mlog_to_m(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|&(x, y)| (x.exp(), y.rem_euclid(2.0 * PI)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneParams {
    /// `L = ln M`.
    pub l: f64,
    /// Fixed opening width; `None` runs the opening check.
    pub ell: Option<f64>,
    pub ell_range: (f64, f64),
    pub ell_iterations: usize,
    pub delta: DeltaParams,
}

impl Default for TuneParams {
    fn default() -> Self {
        TuneParams {
            l: 2.5,
            ell: None,
            ell_range: (1.0 / 16.0, 7.0 / 8.0),
            ell_iterations: 6,
            delta: DeltaParams::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TuneReport {
    pub logspec: LogSpec,
    /// Number of requested sectors (the padding sector excluded).
    pub sectors: usize,
    pub ell: f64,
    pub ell_report: Option<EllReport>,
    pub delta: DeltaSolution,
    pub certificates: Vec<DiscontinuityCertificate>,
    /// Present when the radii are geometric with ratio `e`.
    pub growth: Option<GrowthProfile>,
}

/// True when consecutive radii have ratio `e` up to rounding.
pub fn is_ratio_e(radii: &[f64]) -> bool {
    radii.len() >= 2 && radii.windows(2).all(|w| ((w[1] / w[0]).ln() - 1.0).abs() < 1e-9)
}

/// Opening check over `[lo, hi]` for a padded log-spec, probing all tuned
/// shifts at zero and at their maximum.
pub fn fit_ell(logspec: &LogSpec, lo: f64, hi: f64, iterations: usize, h: Option<f64>) -> Result<EllReport> {
    let total = logspec.x_seq.len();
    let build = |ell: f64, at_max: bool| {
        let delta: Vec<f64> = (0..total)
            .map(|k| if at_max && k + 1 < total { logspec.eps_seq[k] / 8.0 } else { 0.0 })
            .collect();
        build_tract(logspec, &delta, ell, total)
    };
    verify_ell(&build, lo, hi, h, iterations)
}

/// Radii to certificates: normalize, pad, fix `ℓ`, tune the shifts and
/// certify every requested sector.
pub fn tune(radii: &RadiiSpec, params: &TuneParams) -> Result<TuneReport> {
    let bound = PerturbationBound::from_l(params.l)?;
    let logspec = normalize_radii(radii, params.l)?.with_padding();
    let sectors = logspec.x_seq.len() - 1;
    let (ell, ell_report) = match params.ell {
        Some(ell) => (ell, None),
        None => {
            let (lo, hi) = params.ell_range;
            let report = fit_ell(&logspec, lo, hi, params.ell_iterations, params.delta.h)?;
            (report.ell, Some(report))
        }
    };
    let tuned: Vec<usize> = (1..=sectors).collect();
    let delta = solve_delta(&logspec, &tuned, ell, &params.delta, &bound)?;
    let certificates = tuned
        .iter()
        .zip(&delta.tolerances)
        .map(|(&n, &tol)| certify_discontinuity(&delta.solution, &delta.tract, n, &bound, tol))
        .collect::<Result<Vec<_>>>()?;
    let growth = if is_ratio_e(&radii.r_seq) {
        let tract = &delta.tract;
        let (a, b) = (tract.x(1), tract.trust_x());
        let ts: Vec<f64> = (0..400).map(|k| a + (b - a) * k as f64 / 399.0).collect();
        Some(growth_profile(&delta.solution, tract, &ts)?)
    } else {
        None
    };
    Ok(TuneReport { logspec, sectors, ell, ell_report, delta, certificates, growth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::tests_support::unit_tract;

    fn bound() -> PerturbationBound {
        PerturbationBound::from_l(2.5).unwrap()
    }

    #[test]
    fn perturbation_bound_rules() {
        assert!(PerturbationBound::from_l(2.0).is_err());
        let b = bound();
        assert_eq!(b.threshold, (-1.0f64).exp());
        assert!((b.l() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn log_arithmetic() {
        assert!((ln_add(1.0, 2.0) - (1f64.exp() + 2f64.exp()).ln()).abs() < 1e-14);
        assert!((ln_sub(2.0, 1.0) - (2f64.exp() - 1f64.exp()).ln()).abs() < 1e-14);
        assert_eq!(ln_sub(1.0, 1.0), f64::NEG_INFINITY);
        assert_eq!(ln_add(3.0, f64::NEG_INFINITY), 3.0);
    }

    #[test]
    fn phi_endpoint_signs_single_sector() {
        for (frac, positive) in [(0.0, true), (1.0, false)] {
            let t = unit_tract(1, 0.5, frac);
            let sol = solve_reg(&t, default_tract_h(&t)).unwrap();
            let p = phi_n(&sol, &t, 1, &bound()).unwrap();
            assert_eq!(p.value > 0.0, positive, "{p:?}");
            assert!(p.value.abs() <= t.eps(1) / 8.0);
            assert!(p.robust.0 <= p.value && p.value <= p.robust.1);
        }
    }

    #[test]
    fn phi_changes_sign_once_over_delta_sweep() {
        let mut values = Vec::new();
        for k in 0..9 {
            let t = unit_tract(1, 0.5, k as f64 / 8.0);
            let sol = solve_reg(&t, default_tract_h(&t)).unwrap();
            values.push(phi_n(&sol, &t, 1, &bound()).unwrap().value);
        }
        assert!(values[0] > 0.0 && values[8] < 0.0);
        let changes = values.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
        assert_eq!(changes, 1, "{values:?}");
    }

    #[test]
    fn mlog_examples() {
        let out = mlog_to_m(&[(0.0, 0.0), (2f64.ln(), PI), (1.0, -0.5)]);
        assert_eq!(out[0], (1.0, 0.0));
        assert!((out[1].0 - 2.0).abs() < 1e-15 && out[1].1 == PI);
        assert!((out[2].1 - (2.0 * PI - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn untuned_sector_is_certified_with_reported_miss() {
        let t = unit_tract(1, 0.5, 0.0);
        let sol = solve_reg(&t, default_tract_h(&t)).unwrap();
        let tol = default_tol(t.eps(1));
        let cert = certify_discontinuity(&sol, &t, 1, &bound(), tol).unwrap();
        assert!(cert.target_miss > 0.0);
        assert!(cert.achieved >= cert.x_n);
        assert!(cert.robust, "{cert:?}");
        // a synthetic perturbation of 0.9 e⁻¹ against the winner cannot flip
        // the comparison on either side of the jump
        let h = 0.9 * (-1.0f64).exp();
        let (x, e) = (cert.x_n, t.eps(1));
        let after = x + e / 16.0;
        let m4 = sol.column_max(after, -1.0, 0.0).0;
        let m1 = sol.column_max(after, 0.0, 1.0).0;
        assert!(ln_sub(m4, h.ln()) > ln_add(m1, h.ln()));
        let before = x - e / 16.0;
        let m1 = sol.column_max(before, 0.0, 1.0).0;
        assert!(ln_sub(m1, h.ln()) > h.ln());
    }

    #[test]
    fn solve_delta_single_sector() {
        let radii = RadiiSpec::new(vec![6f64.exp()], None).unwrap();
        let spec = normalize_radii(&radii, 2.5).unwrap().with_padding();
        let sol = solve_delta(&spec, &[1], 0.5, &DeltaParams::default(), &bound()).unwrap();
        let tol = default_tol(spec.eps_seq[0]);
        assert!(sol.phi[0].value.abs() < tol);
        assert!(sol.delta[0] >= 0.0 && sol.delta[0] <= spec.eps_seq[0] / 8.0);
        assert_eq!(sol.delta[1], 0.0);
        // a tolerance wider than the shift range succeeds at once
        let wide = DeltaParams { tol: Some(1.0), ..DeltaParams::default() };
        let quick = solve_delta(&spec, &[1], 0.5, &wide, &bound()).unwrap();
        assert_eq!(quick.sweeps, 1);
        assert!(solve_delta(&spec, &[2], 0.5, &wide, &bound()).is_err());
    }
}
