//! End-to-end verification suite. Each criterion runs a complete scenario,
//! checks its quantitative claims and its wall-clock budget, and reports a
//! one-line verdict.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use crate::conformal::{
    default_tract_h, growth_profile, harmonic_conjugate, solve_reg, HalfStrip, HarmonicSolution,
};
use crate::construct::{certify_discontinuity, default_tol, fit_ell, phi_n, tune, PerturbationBound, TuneParams};
use crate::error::{Error, Result};
use crate::functions::{FunctionModel, PolyaKernel, PolyaSum, QuadratureParams};
use crate::geometry::{
    hyp_dist_upper, pick_bracket, rho_translation_monotone, verify_ahlfors, AhlforsOutcome, CrossSections,
};
use crate::maxmod::{
    circle_max, discontinuities_from_trace, isolated_points, trace_branches, CircleParams, CircleProfile,
    DiscontinuityKind, Scaled, TraceParams, DEFAULT_RADIAL_TOL,
};
use crate::conformal::checks::least_squares;
use crate::tract::{build_tract, clearance_curve, normalize_radii, ClearanceCurve, RadiiSpec, TractGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Criteria that finish within a few seconds each.
    Fast,
    Full,
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            other => Err(Error::InvalidParameter(format!("unknown level {other:?}; expected fast or full"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {:<28} {:>8.2}s / {:>4.0}s  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}

pub const CRITERIA: [(usize, &str, f64); 10] = [
    (1, "hardy-discontinuities", 30.0),
    (2, "tyler-isolated-points", 30.0),
    (3, "polya-asymptotics", 10.0),
    (4, "strip-jumping", 60.0),
    (5, "conformal-oracle", 60.0),
    (6, "tract-inequalities", 300.0),
    (7, "end-to-end-tuning", 600.0),
    (8, "growth-bound", 300.0),
    (9, "metric-layer", 60.0),
    (10, "global-properties", 60.0),
];

const FAST: [usize; 5] = [1, 2, 3, 9, 10];

pub fn criteria_for(level: Level) -> Vec<usize> {
    match level {
        Level::Fast => FAST.to_vec(),
        Level::Full => CRITERIA.iter().map(|c| c.0).collect(),
    }
}

/// Runs one criterion. Errors inside the scenario count as failures.
pub fn run_criterion(id: usize) -> Result<CriterionResult> {
    let &(_, name, budget) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::InvalidParameter(format!("no criterion {id}")))?;
    let start = Instant::now();
    let outcome = match id {
        1 => hardy_discontinuities(),
        2 => tyler_isolated_points(),
        3 => polya_asymptotics(),
        4 => strip_jumping(),
        5 => conformal_oracle(),
        6 => tract_inequalities(),
        7 => end_to_end_tuning(),
        8 => growth_bound(),
        9 => metric_layer(),
        _ => global_properties(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut pass, mut detail) = match outcome {
        Ok((p, d)) => (p, d),
        Err(e) => (false, format!("error: {e}")),
    };
    if seconds > budget {
        pass = false;
        detail.push_str(" (over time budget)");
    }
    Ok(CriterionResult { id, name, pass, detail, seconds, budget_seconds: budget })
}

pub fn run(level: Level) -> Vec<CriterionResult> {
    criteria_for(level)
        .into_iter()
        .map(|id| run_criterion(id).expect("known criterion"))
        .collect()
}

type Outcome = Result<(bool, String)>;

fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn hardy_discontinuities() -> Outcome {
    let g = FunctionModel::hardy(1.0)?;
    let params = TraceParams::default();
    let trace = trace_branches(&g, 3.0, 10.0, 700, &params)?;
    let found = discontinuities_from_trace(&g, &trace, DEFAULT_RADIAL_TOL, &params)?;
    let targets = [PI, 2.0 * PI, 3.0 * PI];
    let worst = if found.len() == 3 {
        found.iter().zip(targets).map(|(d, t)| (d.r - t).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    // positive axis exactly where sin r > 0, negative axis where sin r < 0
    let mut off_axis = 0;
    for (r, cm) in trace.radii.iter().zip(&trace.circles) {
        if (r / PI - (r / PI).round()).abs() * PI < 1e-6 {
            continue;
        }
        let side = if r.sin() > 0.0 { 0.0 } else { PI };
        if cm.maximizers.is_empty() || cm.maximizers.iter().any(|&t| angle_dist(t, side) > 1e-6) {
            off_axis += 1;
        }
    }
    let pass = worst < 1e-6 && off_axis == 0;
    Ok((pass, format!("{} jumps, worst radius error {worst:.2e}, {off_axis} circles off the expected half-axis", found.len())))
}

fn tyler_isolated_points() -> Outcome {
    let f = FunctionModel::Tyler;
    let params = TraceParams::default();
    let pts = isolated_points(&f, 3.0, 7.0, 400, 1e-4, &params)?;
    let mut good = 0;
    for p in &pts {
        let k = (p.r / PI).round();
        let near_multiple = (p.r - k * PI).abs() < 1e-4;
        let gap_at = |r: f64| -> Result<f64> {
            let cm = circle_max(&f, r, &params.circle)?;
            let own = cm
                .local_maxima
                .iter()
                .filter(|m| angle_dist(m.theta, p.theta) < 0.05)
                .map(|m| m.excess)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(cm.best_excess() - own)
        };
        let at = gap_at(k * PI)?;
        let before = gap_at(k * PI - 1e-3)?;
        let after = gap_at(k * PI + 1e-3)?;
        let single = at <= params.circle.refine_tol && before > params.circle.refine_tol && after > params.circle.refine_tol;
        if near_multiple && single && p.kind == DiscontinuityKind::IsolatedPoint {
            good += 1;
        }
    }
    Ok((good >= 1 && good == pts.len(), format!("{} isolated points, {good} at a multiple of pi and global at that radius only", pts.len())))
}

fn polya_asymptotics() -> Outcome {
    let kernel = PolyaKernel::new(QuadratureParams::default())?;
    let finer = PolyaKernel::new(QuadratureParams { nodes_per_unit: 128, ..Default::default() })?;
    // outside G₀: |g(z)|·|z| stays bounded as |z| grows
    let outside: Vec<Complex64> = (0..10)
        .map(|k| {
            let r = 2.0 * 1.6f64.powi(k);
            let a = PI / 2.0 + 0.1 + (k as f64) * 0.3;
            Complex64::from_polar(r, a)
        })
        .collect();
    let mut products = Vec::new();
    for &z in &outside {
        if PolyaKernel::in_strip(z) {
            return Err(Error::Precondition(format!("probe {z} inside the half-strip")));
        }
        products.push((kernel.eval_entire(z)?.ln_abs() + z.norm().ln()).exp());
    }
    let first_half = products[..5].iter().cloned().fold(0.0, f64::max);
    let bounded = products[5..].iter().all(|&p| p <= 2.0 * first_half);
    // inside: ln|g| against Re e^z
    let mut worst_inside: f64 = 0.0;
    for k in 0..10 {
        let z = Complex64::new(2.5 + 0.25 * k as f64, -0.8 + 0.16 * k as f64);
        let expect = z.exp().re;
        let got = kernel.eval(z)?.ln_abs();
        worst_inside = worst_inside.max(((got - expect) / expect).abs());
    }
    // the two rule orders agree at every probe (otherwise eval errors), and
    // doubling the nodes moves nothing
    let mut worst_refine: f64 = 0.0;
    for &z in outside.iter().take(5) {
        let a = kernel.eval_entire(z)?.ln_abs();
        let b = finer.eval_entire(z)?.ln_abs();
        worst_refine = worst_refine.max(((a - b) / b).abs());
    }
    let orientation = kernel.orientation_self_test()?;
    let pass = bounded && worst_inside < 1e-4 && worst_refine < 1e-6 && orientation < 1e-9;
    Ok((
        pass,
        format!(
            "max |g||z| {:.3e}, inside rel {worst_inside:.1e}, refinement rel {worst_refine:.1e}",
            products.iter().cloned().fold(0.0, f64::max)
        ),
    ))
}

fn strip_jumping() -> Outcome {
    let sum = PolyaSum::standard(3, QuadratureParams::default())?;
    let model = FunctionModel::PolyaSum(sum.clone());
    let params = TraceParams::default();
    let trace = trace_branches(&model, 16.0, 50.0, 170, &params)?;
    let found = discontinuities_from_trace(&model, &trace, 1e-6, &params)?;
    let mut idx = Vec::new();
    for (r, cm) in trace.radii.iter().zip(&trace.circles) {
        let best = cm
            .maximizers
            .iter()
            .map(|&t| sum.strip_index(Complex64::from_polar(*r, t)).unwrap_or(0))
            .max()
            .unwrap_or(0);
        idx.push(best);
    }
    let monotone = idx.windows(2).all(|w| w[1] >= w[0]);
    let mut increases = 0;
    let mut matched = 0;
    for i in 1..idx.len() {
        if idx[i] > idx[i - 1] {
            increases += 1;
            let (a, b) = (trace.radii[i - 1], trace.radii[i]);
            if found.iter().any(|d| d.kind == DiscontinuityKind::Jump && d.r >= a - 1e-6 && d.r <= b + 1e-6) {
                matched += 1;
            }
        }
    }
    let pass = monotone && increases >= 1 && matched == increases;
    Ok((pass, format!("strip index {} -> {}, {increases} increases, {matched} with a detected jump", idx[0], idx[idx.len() - 1])))
}

fn strip_oracle_error(sol: &HarmonicSolution) -> f64 {
    let g = |z: Complex64| ((z * (PI / 2.0)).sinh() / (PI / 2.0).sinh()).re;
    (0..20)
        .map(|k| {
            let z = Complex64::new(0.3 + 7.2 * k as f64 / 19.0, -0.9 + 1.8 * ((k * 7) % 20) as f64 / 19.0);
            let e = g(z);
            (sol.interp(z) - e).abs() / e.abs()
        })
        .fold(0.0, f64::max)
}

fn conformal_oracle() -> Outcome {
    let strip = HalfStrip::new(8.0, 1.0, Complex64::new(1.0, 0.0));
    let coarse = strip_oracle_error(&solve_reg(&strip, 1.0 / 64.0)?);
    let fine = strip_oracle_error(&solve_reg(&strip, 1.0 / 128.0)?);
    Ok((coarse < 0.01 && fine < coarse, format!("max relative error {coarse:.2e} at h = 1/64, {fine:.2e} at h = 1/128")))
}

fn radii_from(first: f64, count: usize) -> Result<RadiiSpec> {
    RadiiSpec::new((0..count).map(|k| (first + k as f64).exp()).collect(), None)
}

fn tract_inequalities() -> Outcome {
    let params = TuneParams::default();
    let bound = PerturbationBound::from_l(params.l)?;
    let spec = normalize_radii(&radii_from(6.0, 3)?, params.l)?.with_padding();
    let (lo, hi) = params.ell_range;
    let ell_report = fit_ell(&spec, lo, hi, params.ell_iterations, None)?;
    let ell = ell_report.ell;
    let opening = ell_report
        .probes
        .iter()
        .filter(|p| p.ell == ell)
        .flat_map(|p| p.opening_max)
        .fold(f64::INFINITY, f64::min);
    let total = spec.x_seq.len();
    let zero = vec![0.0; total];
    let base = build_tract(&spec, &zero, ell, total)?;
    let sol = solve_reg(&base, default_tract_h(&base))?;
    let mut gaps = Vec::new();
    let mut crosscuts = Vec::new();
    let mut signs = true;
    for n in 1..total {
        let gap = crate::conformal::verify_gap(&sol, &base, n)?;
        gaps.push(gap.min_gap);
        let cert = certify_discontinuity(&sol, &base, n, &bound, default_tol(base.eps(n)))?;
        crosscuts.push(cert.crosscut_margin + 4.0);
        signs &= phi_n(&sol, &base, n, &bound)?.value > 0.0;
        let mut d = zero.clone();
        d[n - 1] = spec.eps_seq[n - 1] / 8.0;
        let t = build_tract(&spec, &d, ell, total)?;
        let s = solve_reg(&t, default_tract_h(&t))?;
        signs &= phi_n(&s, &t, n, &bound)?.value < 0.0;
    }
    let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_cross = crosscuts.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = opening >= 4.0 && min_cross >= 4.0 && min_gap > 1.0 && signs;
    Ok((
        pass,
        format!("ell {ell:.4}, opening max {opening:.2}, min crosscut max {min_cross:.3e}, min gap {min_gap:.3e}, endpoint signs {}", if signs { "ok" } else { "wrong" }),
    ))
}

fn end_to_end_tuning() -> Outcome {
    let report = tune(&radii_from(6.0, 3)?, &TuneParams::default())?;
    let targets = [6.0, 7.0, 8.0];
    let mut ok = report.certificates.len() == 3;
    let mut worst: f64 = 0.0;
    for (c, x) in report.certificates.iter().zip(targets) {
        ok &= c.robust && c.within_tol && (c.x_n - x).abs() < 1e-12;
        ok &= (c.robust_interval.0 - x).abs() < c.tol && (c.robust_interval.1 - x).abs() < c.tol;
        worst = worst.max(c.target_miss.abs());
    }
    Ok((ok, format!("{} certificates, worst miss {worst:.2e}, {} solves", report.certificates.len(), report.delta.solves)))
}

/// Prefix of the curve up to its first point with real part `t`.
fn curve_prefix(curve: &ClearanceCurve, t: f64) -> Option<Vec<Complex64>> {
    let mut out = vec![*curve.vertices.first()?];
    for w in curve.vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.re == t {
            return Some(out);
        }
        if a.re < t && b.re >= t {
            out.push(a + (b - a) * ((t - a.re) / (b.re - a.re)));
            return Some(out);
        }
        out.push(b);
    }
    None
}

/// Largest deviation from the least-squares line, relative to the rise.
fn linear_deviation(points: &[(f64, f64)]) -> (f64, f64) {
    let (slope, intercept) = least_squares(points);
    let lo = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let worst = points.iter().map(|&(t, y)| (y - slope * t - intercept).abs()).fold(0.0, f64::max);
    (slope, if hi > lo { worst / (hi - lo) } else { 0.0 })
}

fn growth_bound() -> Outcome {
    let params = TuneParams::default();
    let spec = normalize_radii(&radii_from(6.0, 6)?, params.l)?.with_padding();
    let (lo, hi) = params.ell_range;
    let ell = fit_ell(&spec, lo, hi, params.ell_iterations, None)?.ell;
    let total = spec.x_seq.len();
    let tract = build_tract(&spec, &vec![0.0; total], ell, total)?;
    let sol = solve_reg(&tract, default_tract_h(&tract))?;
    let (a, b) = (tract.x(1), tract.trust_x());
    let ts: Vec<f64> = (0..400).map(|k| a + (b - a) * k as f64 / 399.0).collect();
    let growth = growth_profile(&sol, &tract, &ts)?;
    let curve = clearance_curve(&tract)?;
    let mut dist = Vec::new();
    for k in 0..40 {
        let t = a + (b - a) * k as f64 / 39.0;
        let path = curve_prefix(&curve, t).ok_or(Error::OutsideDomain { re: t, im: 0.0 })?;
        dist.push((t, hyp_dist_upper(&tract, &path)?));
    }
    let (dslope, ddev) = linear_deviation(&dist);
    let increasing = dist.windows(2).all(|w| w[1].1 >= w[0].1);
    let pass = growth.deviation < 0.15 && growth.slope > 0.0 && ddev < 0.15 && increasing;
    Ok((
        pass,
        format!(
            "ln max u slope {:.2} deviation {:.3}; distance along the curve slope {dslope:.2} deviation {ddev:.3}",
            growth.slope, growth.deviation
        ),
    ))
}

fn ahlfors_pairs<C: CrossSections + ?Sized>(pair: &crate::conformal::ConjugatePair, domain: &C, ts: &[f64]) -> Result<(usize, usize, usize)> {
    let (mut pass, mut fail, mut skipped) = (0, 0, 0);
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            match verify_ahlfors(pair, domain, ts[i], ts[j])?.outcome {
                AhlforsOutcome::Checked { pass: true, .. } => pass += 1,
                AhlforsOutcome::Checked { pass: false, .. } => fail += 1,
                AhlforsOutcome::Inapplicable => skipped += 1,
            }
        }
    }
    Ok((pass, fail, skipped))
}

fn solved_tract(first: f64, sectors: usize, ell: f64) -> Result<(TractGeometry, Arc<HarmonicSolution>)> {
    let spec = normalize_radii(&radii_from(first, sectors)?, 2.5)?.with_padding();
    let total = spec.x_seq.len();
    let tract = build_tract(&spec, &vec![0.0; total], ell, total)?;
    let sol = Arc::new(solve_reg(&tract, default_tract_h(&tract))?);
    Ok((tract, sol))
}

fn metric_layer() -> Outcome {
    let strip = HalfStrip::new(8.0, 1.0, Complex64::new(1.0, 0.0));
    let strip_sol = Arc::new(solve_reg(&strip, 1.0 / 64.0)?);
    let strip_pair = harmonic_conjugate(strip_sol)?;
    let sts: Vec<f64> = (0..16).map(|k| 0.25 + 7.5 * k as f64 / 15.0).collect();
    let (p1, f1, s1) = ahlfors_pairs(&strip_pair, &strip, &sts)?;

    let (tract, sol) = solved_tract(6.0, 3, 0.5)?;
    let pair = harmonic_conjugate(sol)?;
    let trust = tract.trust_x();
    let tts: Vec<f64> = (0..40).map(|k| -1.9 + (trust - 0.01 + 1.9) * k as f64 / 39.0).collect();
    let (p2, f2, s2) = ahlfors_pairs(&pair, &tract, &tts)?;

    let mut pick_ok = 0;
    let mut pick_total = 0;
    for n in 1..=3 {
        for k in 1..=6 {
            let r = tract.rect(n, k).ok_or(Error::TractInvariant("missing rectangle".into()))?.clone();
            let w = r.x.hi - r.x.lo;
            let a = Complex64::new(r.x.lo + 0.25 * w, r.y.mid());
            let b = Complex64::new(r.x.lo + 0.75 * w, r.y.mid());
            pick_total += 1;
            pick_ok += pick_bracket(&pair, &tract, a, b, Some(&r))?.holds as usize;
        }
    }
    for (a, b) in [((-1.5, 0.0), (-0.5, 0.3)), ((-1.8, -0.2), (-1.2, 0.2))] {
        pick_total += 1;
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        pick_ok += pick_bracket(&pair, &tract, a, b, None)?.holds as usize;
    }

    let mut rho_ok = 0;
    for k in 0..100 {
        let w = Complex64::new(0.05 + 0.1 * k as f64, (k as f64).sin() * 3.0);
        rho_ok += rho_translation_monotone(w, 0.5 + 0.01 * k as f64)? as usize;
    }
    let pass = f1 == 0 && f2 == 0 && p1 > 0 && p2 > 0 && pick_ok == pick_total && pick_total == 20 && rho_ok == 100;
    Ok((
        pass,
        format!(
            "ahlfors strip {p1} pass {f1} fail {s1} n/a, tract {p2} pass {f2} fail {s2} n/a; pick {pick_ok}/{pick_total}; rho {rho_ok}/100"
        ),
    ))
}

fn log_m_grid<P: CircleProfile + ?Sized>(p: &P, radii: &[f64], params: &CircleParams) -> Result<Vec<crate::maxmod::CircleMax>> {
    radii.iter().map(|&r| circle_max(p, r, params)).collect()
}

fn global_properties() -> Outcome {
    let q = QuadratureParams::default();
    let models: Vec<(FunctionModel, f64, f64)> = vec![
        (FunctionModel::Exponential, 0.5, 20.0),
        (FunctionModel::Monomial { c: Complex64::new(2.0, 1.0), n: 3 }, 0.5, 20.0),
        (
            FunctionModel::Polynomial {
                coefficients: vec![Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
            },
            0.5,
            20.0,
        ),
        (FunctionModel::hardy(1.0)?, 0.5, 6.0),
        (FunctionModel::Tyler, 0.5, 6.0),
        (FunctionModel::polya_core(q)?, 0.5, 6.0),
        (FunctionModel::polya_sum(3, q)?, 14.0, 40.0),
    ];
    let params = CircleParams::default();
    let ln_c = 3.7f64.ln();
    let mut failures = Vec::new();
    for (model, r0, r1) in &models {
        let radii: Vec<f64> = (0..12).map(|k| r0 * (r1 / r0).powf(k as f64 / 11.0)).collect();
        let cms = log_m_grid(model, &radii, &params)?;
        let lm: Vec<f64> = cms.iter().map(|c| c.log_m).collect();
        let scale = lm.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let slack = 1e-9 * scale;
        if lm.windows(2).any(|w| w[1] < w[0] - slack) {
            failures.push(format!("{} not monotone", model.name()));
        }
        // uniform in ln r, so second differences must be nonnegative
        if lm.windows(3).any(|w| w[0] - 2.0 * w[1] + w[2] < -4.0 * slack) {
            failures.push(format!("{} not log-convex", model.name()));
        }
        let scaled = Scaled { inner: model, ln_c };
        for (r, cm) in radii.iter().zip(&cms).step_by(4) {
            let s = circle_max(&scaled, *r, &params)?;
            let same = s.maximizers.len() == cm.maximizers.len()
                && s.maximizers.iter().zip(&cm.maximizers).all(|(a, b)| a == b);
            let shift = s.log_m - cm.log_m - ln_c;
            if !same || shift.abs() > 1e-12 * cm.log_m.abs().max(1.0) {
                failures.push(format!("{} scaling at r = {r}", model.name()));
            }
            if model.has_real_coefficients() && !cm.degenerate {
                let symmetric = cm
                    .maximizers
                    .iter()
                    .all(|&t| cm.maximizers.iter().any(|&u| angle_dist(u, -t) < 1e-6));
                if !symmetric {
                    failures.push(format!("{} not conjugation symmetric at r = {r}", model.name()));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{} models checked", models.len())
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_parsing() {
        assert_eq!("fast".parse::<Level>().unwrap(), Level::Fast);
        assert_eq!("full".parse::<Level>().unwrap(), Level::Full);
        assert!("medium".parse::<Level>().is_err());
        assert_eq!(criteria_for(Level::Full).len(), 10);
        assert!(run_criterion(11).is_err());
    }

    #[test]
    fn curve_prefix_ends_at_first_crossing() {
        let t = crate::conformal::tests_support::unit_tract(1, 0.5, 0.0);
        let c = clearance_curve(&t).unwrap();
        let p = curve_prefix(&c, 3.0).unwrap();
        assert_eq!(p[0], Complex64::new(-1.0, 0.0));
        assert_eq!(p.last().unwrap().re, 3.0);
        assert!(p.iter().all(|z| z.re <= 3.0));
    }
}
