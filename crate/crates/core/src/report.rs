//! Deterministic text output: CSV with a fixed float format, hand-written
//! SVG, and a plain grid dump.

use std::fmt::Write;

use num_complex::Complex64;

use crate::conformal::HarmonicSolution;
use crate::construct::DiscontinuityCertificate;
use crate::functions::LogComplex;
use crate::maxmod::{Discontinuity, Trace};
use crate::tract::TractGeometry;

/// 17 significant digits, so that every `f64` round-trips.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Comma-separated table with a header row.
#[derive(Debug, Clone)]
pub struct Csv {
    width: usize,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { width: header.len(), text }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.width, "row width");
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// `(x, y, log_modulus, argument)` per evaluation point.
pub fn eval_csv(points: &[(Complex64, LogComplex)]) -> String {
    let mut csv = Csv::new(&["x", "y", "log_modulus", "argument"]);
    for (z, v) in points {
        csv.row(&[fmt_f64(z.re), fmt_f64(z.im), fmt_f64(v.ln_abs()), fmt_f64(v.argument)]);
    }
    csv.finish()
}

/// One row per branch sample, ordered by branch then radius.
pub fn branches_csv(trace: &Trace) -> String {
    let mut csv = Csv::new(&["branch_id", "r", "theta", "log_modulus", "is_global"]);
    for b in &trace.branches {
        for s in &b.samples {
            csv.row(&[
                b.id.to_string(),
                fmt_f64(s.r),
                fmt_f64(s.theta),
                fmt_f64(s.log_value),
                s.is_global.to_string(),
            ]);
        }
    }
    csv.finish()
}

pub fn discontinuities_csv(found: &[Discontinuity]) -> String {
    let mut csv = Csv::new(&["r", "theta", "kind", "left_gap"]);
    for d in found {
        csv.row(&[fmt_f64(d.r), fmt_f64(d.theta), d.kind.as_str().into(), fmt_f64(d.left_gap)]);
    }
    csv.finish()
}

pub fn certificates_csv(certs: &[DiscontinuityCertificate]) -> String {
    let mut csv = Csv::new(&[
        "sector",
        "x_n",
        "delta_n",
        "achieved",
        "target_miss",
        "robust_lo",
        "robust_hi",
        "tol",
        "crosscut_margin",
        "gap_margin",
        "containment_margin",
        "transfer_margin",
        "robust",
        "within_tol",
    ]);
    for c in certs {
        csv.row(&[
            c.n.to_string(),
            fmt_f64(c.x_n),
            fmt_f64(c.delta_n),
            fmt_f64(c.achieved),
            fmt_f64(c.target_miss),
            fmt_f64(c.robust_interval.0),
            fmt_f64(c.robust_interval.1),
            fmt_f64(c.tol),
            fmt_f64(c.crosscut_margin),
            fmt_f64(c.gap_margin),
            fmt_f64(c.containment_margin),
            fmt_f64(c.transfer_margin),
            c.robust.to_string(),
            c.within_tol.to_string(),
        ]);
    }
    csv.finish()
}

/// Human-readable summary of one certificate.
pub fn certificate_block(c: &DiscontinuityCertificate) -> String {
    let verdict = if c.robust && c.within_tol { "CERTIFIED" } else { "NOT CERTIFIED" };
    let mut s = String::new();
    let _ = writeln!(s, "sector {}: {verdict}", c.n);
    let _ = writeln!(s, "  target x_n        {:.6}   (radius e^{:.6})", c.x_n, c.x_n);
    let _ = writeln!(s, "  shift delta_n     {:.6e}", c.delta_n);
    let _ = writeln!(s, "  jump at           x_n {:+.3e}   (tol {:.3e})", c.target_miss, c.tol);
    let _ = writeln!(
        s,
        "  under perturbation [x_n {:+.3e}, x_n {:+.3e}]",
        c.robust_interval.0 - c.x_n,
        c.robust_interval.1 - c.x_n
    );
    for (name, m) in [
        ("crosscut", c.crosscut_margin),
        ("gap", c.gap_margin),
        ("containment", c.containment_margin),
        ("transfer", c.transfer_margin),
    ] {
        let _ = writeln!(s, "  margin {name:<12} {m:.6e}");
    }
    s
}

/// Plain grid dump: header with bounds and spacing, the coordinate lines,
/// then one row of `u` per `y` line from bottom to top.
pub fn grid_dump(sol: &HarmonicSolution) -> String {
    let (nx, ny) = (sol.nx(), sol.ny());
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# x {} {} y {} {} h {} nx {nx} ny {ny}",
        fmt_f64(sol.xs[0]),
        fmt_f64(sol.xs[nx - 1]),
        fmt_f64(sol.ys[0]),
        fmt_f64(sol.ys[ny - 1]),
        fmt_f64(sol.h)
    );
    let line = |v: &mut String, label: &str, vals: &mut dyn Iterator<Item = f64>| {
        v.push_str(label);
        for x in vals {
            v.push(' ');
            v.push_str(&fmt_f64(x));
        }
        v.push('\n');
    };
    line(&mut s, "xs", &mut sol.xs.iter().cloned());
    line(&mut s, "ys", &mut sol.ys.iter().cloned());
    for j in 0..ny {
        line(&mut s, "u", &mut (0..nx).map(|i| sol.at(i, j)));
    }
    s
}

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 400.0;
const PAD: f64 = 40.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (SVG_W - 2.0 * PAD)
    }
    fn py(&self, y: f64) -> f64 {
        SVG_H - PAD - (y - self.y0) / (self.y1 - self.y0) * (SVG_H - 2.0 * PAD)
    }
}

fn svg_open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{PAD}" y="20" font-family="monospace" font-size="12">{title}</text>"#);
    s
}

fn axes(s: &mut String, f: &Frame, xl: &str, yl: &str) {
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        SVG_W - 2.0 * PAD,
        SVG_H - 2.0 * PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="11">{xl} {:.3} .. {:.3}</text>"#,
        PAD,
        SVG_H - 12.0,
        f.x0,
        f.x1
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="11" text-anchor="end">{yl} {:.3} .. {:.3}</text>"#,
        SVG_W - PAD,
        SVG_H - 12.0,
        f.y0,
        f.y1
    );
}

/// Branches in the `(r, θ)` plane; global samples drawn darker, jumps as
/// red circles, isolated points as blue squares.
pub fn branch_svg(trace: &Trace, found: &[Discontinuity]) -> String {
    let (r0, r1) = match (trace.radii.first(), trace.radii.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        _ => (0.0, 1.0),
    };
    let f = Frame { x0: r0, x1: r1, y0: 0.0, y1: std::f64::consts::TAU };
    let mut s = svg_open("maximum curves");
    axes(&mut s, &f, "r", "theta");
    for b in &trace.branches {
        let mut pts = String::new();
        for p in &b.samples {
            let _ = write!(pts, "{:.2},{:.2} ", f.px(p.r), f.py(p.theta));
        }
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#bbbbbb" stroke-width="1"/>"##, pts.trim_end());
        for p in b.samples.iter().filter(|p| p.is_global) {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.2" fill="black"/>"#, f.px(p.r), f.py(p.theta));
        }
    }
    for d in found {
        let (x, y) = (f.px(d.r), f.py(d.theta));
        match d.kind {
            crate::maxmod::DiscontinuityKind::Jump => {
                let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="none" stroke="red" stroke-width="2"/>"#);
            }
            crate::maxmod::DiscontinuityKind::IsolatedPoint => {
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="none" stroke="blue" stroke-width="2"/>"#,
                    x - 4.0,
                    y - 4.0
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Polyline of `points` with vertical markers at `marks`.
pub fn line_svg(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)], marks: &[f64]) -> String {
    let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64)) -> f64| points.iter().map(pick).fold(init, f);
    let (mut x0, mut x1) = (fold(f64::min, f64::INFINITY, |p| p.0), fold(f64::max, f64::NEG_INFINITY, |p| p.0));
    let (mut y0, mut y1) = (fold(f64::min, f64::INFINITY, |p| p.1), fold(f64::max, f64::NEG_INFINITY, |p| p.1));
    if !(x1 > x0) {
        (x0, x1) = (x0.min(0.0), x0.max(0.0) + 1.0);
    }
    if !(y1 > y0) {
        (y0, y1) = (y0.min(0.0) - 0.5, y0.max(0.0) + 0.5);
    }
    let f = Frame { x0, x1, y0, y1 };
    let mut s = svg_open(title);
    axes(&mut s, &f, x_label, y_label);
    for &m in marks {
        let x = f.px(m);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{PAD}" x2="{x:.2}" y2="{:.2}" stroke="red" stroke-dasharray="4 3"/>"#,
            SVG_H - PAD
        );
    }
    let mut pts = String::new();
    for p in points {
        let _ = write!(pts, "{:.2},{:.2} ", f.px(p.0), f.py(p.1));
    }
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.2"/>"#, pts.trim_end());
    s.push_str("</svg>\n");
    s
}

/// Outline of the tract rectangles.
pub fn tract_svg(tract: &TractGeometry) -> String {
    let (x0, x1) = tract.extent();
    let f = Frame { x0, x1, y0: -1.1, y1: 1.1 };
    let mut s = svg_open("tract");
    axes(&mut s, &f, "Re", "Im");
    for r in &tract.rects {
        let (a, b) = (f.px(r.x.lo), f.px(r.x.hi));
        let (c, d) = (f.py(r.y.hi), f.py(r.y.lo));
        let _ = writeln!(
            s,
            r##"<rect x="{a:.3}" y="{c:.3}" width="{:.3}" height="{:.3}" fill="#cfe3f7" stroke="#1f4e79" stroke-width="0.5"/>"##,
            (b - a).max(0.1),
            (d - c).max(0.1)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Heat map of `ln(1 + u)`, at most `max_cells` blocks per direction.
pub fn heatmap_svg(sol: &HarmonicSolution, max_cells: usize) -> String {
    let (nx, ny) = (sol.nx(), sol.ny());
    let f = Frame { x0: sol.xs[0], x1: sol.xs[nx - 1], y0: sol.ys[0], y1: sol.ys[ny - 1] };
    let sx = (nx - 1).div_ceil(max_cells.max(1)).max(1);
    let sy = (ny - 1).div_ceil(max_cells.max(1)).max(1);
    let top = sol.u.iter().fold(0.0f64, |m, &v| m.max(v)).ln_1p().max(f64::MIN_POSITIVE);
    let mut s = svg_open("ln(1 + u)");
    let mut i = 0;
    while i + 1 < nx {
        let i2 = (i + sx).min(nx - 1);
        let mut j = 0;
        while j + 1 < ny {
            let j2 = (j + sy).min(ny - 1);
            let v = sol.at(i, j).max(sol.at(i2, j)).max(sol.at(i, j2)).max(sol.at(i2, j2));
            if v > 0.0 {
                let t = (v.ln_1p() / top).clamp(0.0, 1.0);
                let (r, g, b) = ((255.0 * t) as u8, (80.0 + 100.0 * (1.0 - t)) as u8, (255.0 * (1.0 - t)) as u8);
                let (a, c) = (f.px(sol.xs[i]), f.py(sol.ys[j2]));
                let _ = writeln!(
                    s,
                    r##"<rect x="{a:.2}" y="{c:.2}" width="{:.2}" height="{:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                    f.px(sol.xs[i2]) - a,
                    f.py(sol.ys[j]) - c
                );
            }
            j = j2;
        }
        i = i2;
    }
    axes(&mut s, &f, "Re", "Im");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_has_header_and_fixed_width() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(&["1".into(), "2".into()]);
        assert_eq!(c.finish(), "a,b\n1,2\n");
        assert_eq!(discontinuities_csv(&[]), "r,theta,kind,left_gap\n");
    }

    #[test]
    fn tract_outputs_are_deterministic() {
        let t = crate::conformal::tests_support::unit_tract(1, 0.5, 0.0);
        let a = tract_svg(&t);
        assert_eq!(a, tract_svg(&t));
        assert_eq!(a.matches("<rect").count(), t.rects.len() + 2);
    }
}
