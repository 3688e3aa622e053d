use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::*;
use super::tests_support::unit_tract;
use crate::tract::{build_tract, normalize_radii, RadiiSpec};

/// `G(z) = sinh(πz/2) / sinh(π/2)` on `(0, 8) × (−1, 1)`.
fn oracle(z: Complex64) -> Complex64 {
    (z * (PI / 2.0)).sinh() / (PI / 2.0).sinh()
}

fn strip() -> HalfStrip {
    HalfStrip::new(8.0, 1.0, Complex64::new(1.0, 0.0))
}

fn probes() -> Vec<Complex64> {
    let mut out = Vec::new();
    for k in 0..20 {
        let x = 0.3 + 7.2 * k as f64 / 19.0;
        let y = -0.9 + 1.8 * ((k * 7) % 20) as f64 / 19.0;
        out.push(Complex64::new(x, y));
    }
    out
}

fn max_rel_error(sol: &HarmonicSolution) -> f64 {
    probes()
        .into_iter()
        .map(|z| {
            let e = oracle(z).re;
            (sol.interp(z) - e).abs() / e.abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn half_strip_matches_closed_form() {
    let sol = solve_reg(&strip(), 1.0 / 64.0).unwrap();
    assert!(sol.residual < 1e-10, "residual {}", sol.residual);
    let err = max_rel_error(&sol);
    assert!(err < 0.01, "relative error {err}");
    assert_eq!(sol.interp(Complex64::new(1.0, 0.0)), 1.0);
}

#[test]
fn half_strip_error_drops_under_refinement() {
    let coarse = max_rel_error(&solve_reg(&strip(), 1.0 / 32.0).unwrap());
    let fine = max_rel_error(&solve_reg(&strip(), 1.0 / 64.0).unwrap());
    assert!(fine < coarse, "{fine} !< {coarse}");
    // second order: roughly a factor four
    assert!(fine < 0.5 * coarse, "{fine} vs {coarse}");
}

#[test]
fn half_strip_conjugate_and_strip_coordinate() {
    let sol = Arc::new(solve_reg(&strip(), 1.0 / 64.0).unwrap());
    let pair = harmonic_conjugate(sol).unwrap();
    assert!(pair.closure_residual < 1e-10, "{}", pair.closure_residual);
    for z in probes() {
        let g = oracle(z);
        let v = pair.value(z).unwrap();
        assert!((v - g.im).abs() < 0.02 * g.norm(), "v({z}) = {v}, oracle {}", g.im);
    }
    let phi = strip_coordinate(&pair, Complex64::new(1.0, 0.0)).unwrap();
    assert!(phi.norm() < 1e-12);
    let z = Complex64::new(5.0, 0.3);
    let phi = strip_coordinate(&pair, z).unwrap();
    let g = oracle(z);
    let expect = Complex64::new(g.norm().ln(), g.arg()) / PI;
    assert!((phi - expect).norm() < 0.01, "{phi} vs {expect}");
    assert!(strip_coordinate(&pair, Complex64::new(5.0, 1.0)).is_err());
}

#[test]
fn half_strip_maximum_principle_and_boundary_decay() {
    let sol = solve_reg(&strip(), 1.0 / 32.0).unwrap();
    assert!(sol.u.iter().all(|&v| v >= 0.0));
    let inner = sol
        .u
        .iter()
        .zip(&sol.kind)
        .filter(|p| *p.1 == NodeKind::Unknown)
        .map(|p| *p.0)
        .fold(0.0, f64::max);
    assert!(inner <= sol.cap_amplitude);
    // monotone along the inward normal from y = 1
    let vals: Vec<f64> = (0..8)
        .map(|k| sol.interp(Complex64::new(4.0, 1.0 - k as f64 / 32.0)))
        .collect();
    assert_eq!(vals[0], 0.0);
    assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
}

#[test]
fn half_strip_growth_is_sinh() {
    let sol = solve_reg(&strip(), 1.0 / 64.0).unwrap();
    // ln max_y u(t) − πt/2 is constant up to the sinh correction
    let a = sol.column_max(4.0, -1.0, 1.0).0.ln();
    let b = sol.column_max(6.0, -1.0, 1.0).0.ln();
    let slope = (b - a) / 2.0;
    assert!((slope - PI / 2.0).abs() < 0.01 * PI / 2.0, "{slope}");
    let at_base = sol.column_max(1.0, -1.0, 1.0).0;
    assert!(at_base >= 1.0);
}

#[test]
fn segment_max_rules() {
    let sol = solve_reg(&strip(), 1.0 / 32.0).unwrap();
    let on_boundary = max_reg_on_segment(&sol, Complex64::new(1.0, 1.0), Complex64::new(3.0, 1.0)).unwrap();
    assert_eq!(on_boundary, 0.0);
    let across = max_reg_on_segment(&sol, Complex64::new(2.0, -1.0), Complex64::new(2.0, 1.0)).unwrap();
    let oracle_max = oracle(Complex64::new(2.0, 0.0)).re;
    assert!((across - oracle_max).abs() < 0.01 * oracle_max);
    assert!(max_reg_on_segment(&sol, Complex64::new(2.0, 0.0), Complex64::new(9.0, 0.0)).is_err());
}


#[test]
fn tract_solution_is_positive_inside_and_zero_outside() {
    let tract = unit_tract(1, 0.5, 0.0);
    let sol = solve_reg(&tract, default_tract_h(&tract)).unwrap();
    assert!(sol.residual < 1e-10, "{}", sol.residual);
    for (p, k) in sol.kind.iter().enumerate() {
        match k {
            NodeKind::Unknown => assert!(sol.u[p] > 0.0),
            NodeKind::Zero => assert_eq!(sol.u[p], 0.0),
            NodeKind::Cap => {}
        }
    }
    assert_eq!(sol.interp(Complex64::new(-1.0, 0.0)), 1.0);
    assert_eq!(sol.interp(Complex64::new(-0.5, 0.9)), 0.0);
    // lower channel of I_1 dominates the upper one away from its left wall
    let report = verify_gap(&sol, &tract, 1).unwrap();
    assert!(report.min_gap > checks::GAP_THRESHOLD);
    // the gap already holds at the first column inside I_1
    assert_eq!(report.t, report.columns[0].0);
    let (a, _) = tract.i_interval(1);
    assert_eq!(sol.column_max(a, -1.0, 0.0).0, 0.0);
}

#[test]
fn tract_upstream_values_converge() {
    let tract = unit_tract(1, 0.5, 0.0);
    let h = default_tract_h(&tract);
    let a = solve_reg(&tract, h).unwrap();
    let b = solve_reg(&tract, h / 2.0).unwrap();
    for z in [Complex64::new(-0.5, 0.1), Complex64::new(0.0, 0.25), Complex64::new(3.0, 0.5)] {
        let (p, q) = (a.interp(z), b.interp(z));
        assert!((p - q).abs() < 0.01 * q, "{z}: {p} vs {q}");
    }
}

#[test]
fn tract_function_evaluates_through_the_logarithm() {
    let tract = unit_tract(1, 0.5, 0.0);
    let sol = Arc::new(solve_reg(&tract, default_tract_h(&tract)).unwrap());
    let pair = Arc::new(harmonic_conjugate(sol.clone()).unwrap());
    assert!(pair.closure_residual < 1e-10, "{}", pair.closure_residual);
    let f = TractFunction::new(sol.clone(), Some(pair.clone()));
    let w = Complex64::new(-1.0, 0.0).exp();
    let v = f.eval_log(w).unwrap();
    assert!((v.ln_abs() - 1.0).abs() < 1e-12);
    assert!(f.eval_log(Complex64::new(0.0, 0.0)).unwrap().ln_abs() == f64::NEG_INFINITY);
    let outside = Complex64::new(-0.5, 0.9).exp();
    assert_eq!(f.eval_log(outside).unwrap().ln_abs(), f64::NEG_INFINITY);
}

#[test]
fn cap_stability_in_trust_region() {
    let radii: Vec<f64> = (0..2).map(|k| (6.0 + k as f64).exp()).collect();
    let spec = normalize_radii(&RadiiSpec::new(radii, None).unwrap(), 2.5).unwrap();
    let one = spec.with_padding();
    let two = one.with_padding();
    let a = build_tract(&one, &[0.0; 3], 0.5, 3).unwrap();
    let b = build_tract(&two, &[0.0; 4], 0.5, 4).unwrap();
    let h = default_tract_h(&a);
    let (sa, sb) = (solve_reg(&a, h).unwrap(), solve_reg(&b, h).unwrap());
    let trust = a.trust_x();
    for x in [-1.5, 0.0, 3.0, 6.5, 7.002, trust - 1e-3] {
        for y in [-0.5, -1e-4, 0.5] {
            let z = Complex64::new(x, y);
            let p = sa.interp(z);
            if p > 0.0 {
                let q = sb.interp(z);
                assert!((p - q).abs() < 0.01 * p, "{z}: {p} vs {q}");
            }
        }
    }
}
