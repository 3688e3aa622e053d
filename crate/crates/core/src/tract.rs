//! The winding tract `V(δ)`: a chain of axis-parallel rectangles with exact
//! open/closed edges, plus the cross-section and clearance-curve geometry.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;

/// One-dimensional interval with independent endpoint closedness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: false, hi_closed: false }
    }
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }
    pub fn closed_open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: true, hi_closed: false }
    }

    pub fn contains(&self, v: f64) -> bool {
        (v > self.lo || (self.lo_closed && v == self.lo)) && (v < self.hi || (self.hi_closed && v == self.hi))
    }

    pub fn contains_closure(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn fmt_text(&self) -> String {
        format!(
            "{}{:.17e},{:.17e}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }

    fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        let lo_closed = match s.chars().next()? {
            '[' => true,
            '(' => false,
            _ => return None,
        };
        let hi_closed = match s.chars().last()? {
            ']' => true,
            ')' => false,
            _ => return None,
        };
        let (a, b) = s[1..s.len() - 1].split_once(',')?;
        Some(Interval {
            lo: a.trim().parse().ok()?,
            hi: b.trim().parse().ok()?,
            lo_closed,
            hi_closed,
        })
    }
}

/// `index` 0 is the leftmost rectangle, 1..=6 the six rectangles of a sector.
/// The truncation cap is a clipped first rectangle of sector `N + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub sector: usize,
    pub index: usize,
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn contains(&self, z: Complex64) -> bool {
        self.x.contains(z.re) && self.y.contains(z.im)
    }

    pub fn contains_closure(&self, z: Complex64) -> bool {
        self.x.contains_closure(z.re) && self.y.contains_closure(z.im)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.x.mid(), self.y.mid())
    }
}

/// Radii `r_n` at which discontinuities are requested.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiiSpec {
    pub r_seq: Vec<f64>,
    pub geometric_c: Option<f64>,
}

impl RadiiSpec {
    pub fn new(r_seq: Vec<f64>, geometric_c: Option<f64>) -> Result<Self> {
        let spec = RadiiSpec { r_seq, geometric_c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_seq.is_empty() {
            return Err(Error::InvalidParameter("at least one radius is required".into()));
        }
        if self.r_seq.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidParameter("radii must be positive and finite".into()));
        }
        if let Some(w) = self.r_seq.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(format!(
                "radii must be strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        if let Some(c) = self.geometric_c {
            if !(c > 1.0) {
                return Err(Error::InvalidParameter(format!("geometric C must exceed 1, got {c}")));
            }
            if let Some(w) = self.r_seq.windows(2).find(|w| !(w[1] > c * w[0])) {
                return Err(Error::InvalidParameter(format!(
                    "radii {} and {} violate r_(n+1) > C r_n for C = {c}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}

/// Logarithmic data of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSpec {
    /// `x_n = ln(λ r_n)`, `n = 1..`.
    pub x_seq: Vec<f64>,
    pub eps_seq: Vec<f64>,
    /// `L = ln M`.
    pub l: f64,
    pub lambda: f64,
}

impl LogSpec {
    pub fn validate(&self) -> Result<()> {
        if self.x_seq.is_empty() || self.x_seq.len() != self.eps_seq.len() {
            return Err(Error::InvalidParameter("x_seq and eps_seq must be nonempty and of equal length".into()));
        }
        if !(self.l > 2.0) {
            return Err(Error::InvalidParameter(format!("L must exceed 2, got {}", self.l)));
        }
        if !(self.x_seq[0] > self.l + 3.0) {
            return Err(Error::InvalidParameter(format!(
                "x_1 = {} must exceed L + 3 = {}",
                self.x_seq[0],
                self.l + 3.0
            )));
        }
        let n = self.x_seq.len();
        for i in 0..n {
            let back = self.x_seq[i] - if i == 0 { 0.0 } else { self.x_seq[i - 1] };
            let fwd = if i + 1 < n { self.x_seq[i + 1] - self.x_seq[i] } else { f64::INFINITY };
            let sup = back.min(fwd).min(0.5) / 8.0;
            if !(self.eps_seq[i] > 0.0 && self.eps_seq[i] < sup) {
                return Err(Error::InvalidParameter(format!(
                    "eps_{} = {} must lie in (0, {sup})",
                    i + 1,
                    self.eps_seq[i]
                )));
            }
        }
        Ok(())
    }

    /// Appends a sector half a unit beyond the last one. Its only purpose is
    /// to move the truncation cap away from the last requested sector.
    pub fn with_padding(&self) -> LogSpec {
        let mut x_seq = self.x_seq.clone();
        x_seq.push(x_seq.last().expect("nonempty") + 0.5);
        LogSpec {
            eps_seq: choose_epsilons(&x_seq),
            x_seq,
            l: self.l,
            lambda: self.lambda,
        }
    }
}

/// `ε_n = min{x_{n+1} − x_n, x_n − x_{n−1}, 1/2} / 16` with `x_0 = 0` and an
/// infinite forward gap after the last point.
pub fn choose_epsilons(x_seq: &[f64]) -> Vec<f64> {
    let n = x_seq.len();
    (0..n)
        .map(|i| {
            let back = x_seq[i] - if i == 0 { 0.0 } else { x_seq[i - 1] };
            let fwd = if i + 1 < n { x_seq[i + 1] - x_seq[i] } else { f64::INFINITY };
            back.min(fwd).min(0.5) / 16.0
        })
        .collect()
}

/// Rescales the radii by the smallest power of two putting `λ r₁` above
/// `e^{L+3}`, then takes logarithms and chooses the ε's.
pub fn normalize_radii(spec: &RadiiSpec, l: f64) -> Result<LogSpec> {
    spec.validate()?;
    if !(l > 2.0 && l.is_finite()) {
        return Err(Error::InvalidParameter(format!("L must exceed 2, got {l}")));
    }
    let threshold = l + 3.0;
    let mut lambda = 1.0f64;
    while !(spec.r_seq[0].ln() + lambda.ln() > threshold) {
        lambda *= 2.0;
    }
    let x_seq: Vec<f64> = spec.r_seq.iter().map(|r| r.ln() + lambda.ln()).collect();
    let eps_seq = choose_epsilons(&x_seq);
    let out = LogSpec { x_seq, eps_seq, l, lambda };
    out.validate()?;
    Ok(out)
}

/// Axis-parallel boundary segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Complex64,
    pub b: Complex64,
}

impl Segment {
    pub fn distance(&self, z: Complex64) -> f64 {
        let d = self.b - self.a;
        let len2 = d.norm_sqr();
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((z - self.a) * d.conj()).re / len2).clamp(0.0, 1.0)
        };
        (z - (self.a + d * t)).norm()
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TractGeometry {
    pub ell: f64,
    pub delta: Vec<f64>,
    /// Number of sectors.
    pub n: usize,
    pub x_seq: Vec<f64>,
    pub eps_seq: Vec<f64>,
    pub rects: Vec<Rect>,
    /// Right end of the truncated tract.
    pub cap_x: f64,
    pub boundary: Vec<Segment>,
}

/// The six rectangles of sector `n` (1-based) for left neighbour data
/// `(x_prev, eps_prev)`.
fn sector_rects(n: usize, x_prev: f64, eps_prev: f64, x: f64, eps: f64, delta: f64) -> [Rect; 6] {
    let r = |index, x, y| Rect { sector: n, index, x, y };
    let a = x - delta + eps / 8.0;
    [
        r(1, Interval::closed(x_prev + 1.5 * eps_prev, x + eps / 2.0), Interval::open(0.0, 1.0)),
        r(2, Interval::open(x + eps / 2.0, x + eps), Interval::open(-eps / 32.0, 1.0)),
        r(3, Interval::closed(a, x + eps / 2.0), Interval::open(-eps / 32.0, 0.0)),
        r(4, Interval::open(x - delta, a), Interval::open(-1.0, 0.0)),
        r(5, Interval::closed(a, x + eps), Interval::open(-1.0, -eps / 32.0)),
        r(6, Interval::open(x + eps, x + 1.5 * eps), Interval::open(-1.0, 1.0)),
    ]
}

/// Builds `V(δ)` truncated after `n` sectors with a vertical cap at
/// `x_n + 2ε_n`.
pub fn build_tract(logspec: &LogSpec, delta: &[f64], ell: f64, n: usize) -> Result<TractGeometry> {
    if n == 0 || n > logspec.x_seq.len() {
        return Err(Error::InvalidParameter(format!(
            "sector count {n} must lie in 1..={}",
            logspec.x_seq.len()
        )));
    }
    if delta.len() != n {
        return Err(Error::InvalidParameter(format!("need {n} shifts, got {}", delta.len())));
    }
    if !(ell > 0.0 && ell < 1.0) {
        return Err(Error::InvalidParameter(format!("ell must lie in (0, 1), got {ell}")));
    }
    for (i, &d) in delta.iter().enumerate() {
        let hi = logspec.eps_seq[i] / 8.0;
        if !(d >= 0.0 && d <= hi) {
            return Err(Error::InvalidParameter(format!(
                "delta_{} = {d} outside [0, {hi}]",
                i + 1
            )));
        }
    }
    let x_seq = logspec.x_seq[..n].to_vec();
    let eps_seq = logspec.eps_seq[..n].to_vec();
    let mut rects = vec![Rect {
        sector: 0,
        index: 0,
        x: Interval::open(-2.0, 0.0),
        y: Interval::open(-ell, ell),
    }];
    for i in 0..n {
        let (xp, ep) = if i == 0 { (0.0, 0.0) } else { (x_seq[i - 1], eps_seq[i - 1]) };
        rects.extend(sector_rects(i + 1, xp, ep, x_seq[i], eps_seq[i], delta[i]));
    }
    let cap_x = x_seq[n - 1] + 2.0 * eps_seq[n - 1];
    rects.push(Rect {
        sector: n + 1,
        index: 1,
        x: Interval::closed_open(x_seq[n - 1] + 1.5 * eps_seq[n - 1], cap_x),
        y: Interval::open(0.0, 1.0),
    });
    let mut tract = TractGeometry {
        ell,
        delta: delta.to_vec(),
        n,
        x_seq,
        eps_seq,
        rects,
        cap_x,
        boundary: Vec::new(),
    };
    tract.boundary = tract.compute_boundary();
    tract.check_invariants()?;
    Ok(tract)
}

impl TractGeometry {
    /// 1-based sector data.
    pub fn x(&self, n: usize) -> f64 {
        self.x_seq[n - 1]
    }
    pub fn eps(&self, n: usize) -> f64 {
        self.eps_seq[n - 1]
    }
    pub fn delta_n(&self, n: usize) -> f64 {
        self.delta[n - 1]
    }

    pub fn rect(&self, sector: usize, index: usize) -> Option<&Rect> {
        self.rects.iter().find(|r| r.sector == sector && r.index == index)
    }

    /// `I_n = (x_n − δ_n, x_n − δ_n + ε_n/8)`.
    pub fn i_interval(&self, n: usize) -> (f64, f64) {
        let a = self.x(n) - self.delta_n(n);
        (a, a + self.eps(n) / 8.0)
    }

    /// Solver outputs are trusted for real parts up to this value.
    pub fn trust_x(&self) -> f64 {
        if self.n >= 2 {
            self.x(self.n - 1) + 2.0 * self.eps(self.n - 1)
        } else {
            self.x(1) + 1.5 * self.eps(1)
        }
    }

    pub fn extent(&self) -> (f64, f64) {
        (-2.0, self.cap_x)
    }

    fn in_union(&self, z: Complex64) -> bool {
        self.rects.iter().any(|r| r.contains(z))
    }

    /// Every small quadrant around `z` is covered by a closed rectangle.
    fn in_closure_interior(&self, z: Complex64) -> bool {
        [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].iter().all(|&(sx, sy)| {
            self.rects.iter().any(|r| {
                r.contains_closure(z)
                    && if sx > 0.0 { z.re < r.x.hi } else { z.re > r.x.lo }
                    && if sy > 0.0 { z.im < r.y.hi } else { z.im > r.y.lo }
            })
        })
    }

    /// Exact membership: the union of the rectangles with their stated
    /// edges, minus every point whose neighbourhood leaves the closed union
    /// (this removes the slit at `x = 0` and all other zero-width cuts).
    pub fn contains(&self, z: Complex64) -> bool {
        self.in_union(z) && self.in_closure_interior(z)
    }

    fn coords(&self) -> (Vec<f64>, Vec<f64>) {
        let mut xs: Vec<f64> = self.rects.iter().flat_map(|r| [r.x.lo, r.x.hi]).collect();
        let mut ys: Vec<f64> = self.rects.iter().flat_map(|r| [r.y.lo, r.y.hi]).collect();
        for v in [&mut xs, &mut ys] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        (xs, ys)
    }

    fn compute_boundary(&self) -> Vec<Segment> {
        let (xs, ys) = self.coords();
        let mut out: Vec<Segment> = Vec::new();
        let push = |a: Complex64, b: Complex64, out: &mut Vec<Segment>| {
            if !self.contains(0.5 * (a + b)) {
                out.push(Segment { a, b });
            }
        };
        for r in &self.rects {
            for &y in &[r.y.lo, r.y.hi] {
                let mut cuts: Vec<f64> = xs.iter().cloned().filter(|&x| x > r.x.lo && x < r.x.hi).collect();
                cuts.insert(0, r.x.lo);
                cuts.push(r.x.hi);
                for w in cuts.windows(2) {
                    push(Complex64::new(w[0], y), Complex64::new(w[1], y), &mut out);
                }
            }
            for &x in &[r.x.lo, r.x.hi] {
                let mut cuts: Vec<f64> = ys.iter().cloned().filter(|&y| y > r.y.lo && y < r.y.hi).collect();
                cuts.insert(0, r.y.lo);
                cuts.push(r.y.hi);
                for w in cuts.windows(2) {
                    push(Complex64::new(x, w[0]), Complex64::new(x, w[1]), &mut out);
                }
            }
        }
        let key = |s: &Segment| (s.a.re, s.a.im, s.b.re, s.b.im);
        out.sort_by(|p, q| {
            let (a, b) = (key(p), key(q));
            a.0.total_cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.total_cmp(&b.2))
                .then(a.3.total_cmp(&b.3))
        });
        out.dedup();
        out
    }

    /// Exact Euclidean distance to `∂V`.
    pub fn boundary_dist(&self, z: Complex64) -> f64 {
        self.boundary
            .iter()
            .map(|s| s.distance(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximal open intervals of `V ∩ {Re z = s}`.
    pub fn channels_at(&self, s: f64) -> Vec<(f64, f64)> {
        let (_, ys) = self.coords();
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut open = false;
        for w in ys.windows(2) {
            let inside = self.contains(Complex64::new(s, 0.5 * (w[0] + w[1])));
            if inside {
                let joined = open && self.contains(Complex64::new(s, w[0]));
                if joined {
                    out.last_mut().expect("open channel").1 = w[1];
                } else {
                    out.push((w[0], w[1]));
                }
            }
            open = inside;
        }
        out
    }

    /// Length of the vertical segment at real part `s` separating the far
    /// left of `V` from the far right. With more than one channel the full
    /// span is returned.
    pub fn cross_section_theta(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.extent();
        if !(s > lo && s < hi) {
            return Err(Error::OutsideDomain { re: s, im: 0.0 });
        }
        let ch = self.channels_at(s);
        match ch.len() {
            0 => Err(Error::OutsideDomain { re: s, im: 0.0 }),
            1 => Ok(ch[0].1 - ch[0].0),
            _ => Ok(ch.last().expect("nonempty").1 - ch[0].0),
        }
    }

    /// Rectangles share an edge piece whose midpoint lies in `V`.
    fn adjacent(&self, a: &Rect, b: &Rect) -> bool {
        let overlap = |p: &Interval, q: &Interval| (p.lo.max(q.lo), p.hi.min(q.hi));
        for (xa, xb) in [(a.x.hi, b.x.lo), (a.x.lo, b.x.hi)] {
            if xa == xb {
                let (lo, hi) = overlap(&a.y, &b.y);
                if hi > lo && self.contains(Complex64::new(xa, 0.5 * (lo + hi))) {
                    return true;
                }
            }
        }
        for (ya, yb) in [(a.y.hi, b.y.lo), (a.y.lo, b.y.hi)] {
            if ya == yb {
                let (lo, hi) = overlap(&a.x, &b.x);
                if hi > lo && self.contains(Complex64::new(0.5 * (lo + hi), ya)) {
                    return true;
                }
            }
        }
        false
    }

    fn check_invariants(&self) -> Result<()> {
        let k = self.rects.len();
        for i in 0..k {
            let a = &self.rects[i];
            if !(a.x.hi > a.x.lo && a.y.hi > a.y.lo) {
                return Err(Error::TractInvariant(format!(
                    "rectangle ({}, {}) is empty",
                    a.sector, a.index
                )));
            }
            if a.index != 0 && !(a.y.lo >= -1.0 && a.y.hi <= 1.0) {
                return Err(Error::TractInvariant("rectangle leaves the unit strip".into()));
            }
            for b in &self.rects[i + 1..] {
                let ox = a.x.lo.max(b.x.lo) < a.x.hi.min(b.x.hi);
                let oy = a.y.lo.max(b.y.lo) < a.y.hi.min(b.y.hi);
                if ox && oy {
                    return Err(Error::TractInvariant(format!(
                        "rectangles ({}, {}) and ({}, {}) overlap",
                        a.sector, a.index, b.sector, b.index
                    )));
                }
            }
        }
        // interiors are disjoint; the union is simply connected when the
        // adjacency graph is a tree
        let mut edges = 0usize;
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut i = i;
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for i in 0..k {
            for j in i + 1..k {
                if self.adjacent(&self.rects[i], &self.rects[j]) {
                    edges += 1;
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a == b {
                        return Err(Error::TractInvariant("tract encloses a hole".into()));
                    }
                    parent[a] = b;
                }
            }
        }
        if edges + 1 != k {
            return Err(Error::TractInvariant(format!(
                "tract is disconnected: {k} rectangles, {edges} adjacencies"
            )));
        }
        Ok(())
    }

    /// One rectangle per line: `sector index x-interval y-interval`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# ell {:.17e}", self.ell);
        for r in &self.rects {
            let _ = writeln!(s, "{} {} {} {}", r.sector, r.index, r.x.fmt_text(), r.y.fmt_text());
        }
        s
    }

    /// Parses the rectangle lines written by [`to_text`](Self::to_text).
    pub fn rects_from_text(text: &str) -> Result<Vec<Rect>> {
        let mut out = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::InvalidParameter(format!("line {}: malformed rectangle", no + 1));
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(bad());
            }
            out.push(Rect {
                sector: parts[0].parse().map_err(|_| bad())?,
                index: parts[1].parse().map_err(|_| bad())?,
                x: Interval::parse_text(parts[2]).ok_or_else(bad)?,
                y: Interval::parse_text(parts[3]).ok_or_else(bad)?,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClearanceCurve {
    pub vertices: Vec<Complex64>,
    pub alpha: f64,
    /// Largest sampled `length(t)/t` over `t ≥ 2`.
    pub length_bound_k: f64,
    /// Smallest measured distance to `∂V` over the sampled points.
    pub measured_clearance: f64,
}

impl ClearanceCurve {
    /// Arc length from the start until the curve first reaches real part `t`.
    pub fn length_to(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.re >= t && a.re < t {
                return acc + (t - a.re);
            }
            if a.re >= t {
                return acc;
            }
            acc += (b - a).norm();
        }
        acc
    }

    pub fn total_length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// First point of the curve with real part `t`.
    pub fn point_at(&self, t: f64) -> Option<Complex64> {
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.re <= t && b.re >= t && b.re > a.re {
                let s = (t - a.re) / (b.re - a.re);
                return Some(a + (b - a) * s);
            }
            if a.re == t {
                return Some(a);
            }
        }
        None
    }

    /// Points every `spacing` of arc length, endpoints included.
    pub fn sample(&self, spacing: f64) -> Vec<Complex64> {
        let mut out = Vec::new();
        for w in self.vertices.windows(2) {
            let len = (w[1] - w[0]).norm();
            let k = (len / spacing).ceil().max(1.0) as usize;
            for i in 0..k {
                out.push(w[0] + (w[1] - w[0]) * (i as f64 / k as f64));
            }
        }
        if let Some(&v) = self.vertices.last() {
            out.push(v);
        }
        out
    }
}

/// A polyline from `−1` threading every rectangle along its mid-lines.
pub fn clearance_curve(tract: &TractGeometry) -> Result<ClearanceCurve> {
    let eps_min = tract.eps_seq.iter().cloned().fold(f64::INFINITY, f64::min);
    let alpha = (eps_min / 64.0).min(tract.ell / 2.0);
    let mut v = vec![Complex64::new(-1.0, 0.0), Complex64::new(-1.0, tract.ell / 2.0)];
    let rise_x = (0.5f64).min(0.5 * (tract.x(1) + tract.eps(1) / 2.0));
    v.push(Complex64::new(rise_x, tract.ell / 2.0));
    v.push(Complex64::new(rise_x, 0.5));
    for n in 1..=tract.n {
        let (x, e, d) = (tract.x(n), tract.eps(n), tract.delta_n(n));
        let c2 = x + 0.75 * e;
        let c4 = x - d + e / 16.0;
        let c6 = x + 1.25 * e;
        v.push(Complex64::new(c2, 0.5));
        v.push(Complex64::new(c2, -e / 64.0));
        v.push(Complex64::new(c4, -e / 64.0));
        v.push(Complex64::new(c4, -0.5));
        v.push(Complex64::new(c6, -0.5));
        v.push(Complex64::new(c6, 0.5));
    }
    let end = tract.cap_x - tract.eps(tract.n) / 4.0;
    v.push(Complex64::new(end, 0.5));
    let mut curve = ClearanceCurve {
        vertices: v,
        alpha,
        length_bound_k: 0.0,
        measured_clearance: f64::INFINITY,
    };
    let spacing = alpha.max(1e-4);
    for z in curve.sample(spacing) {
        curve.measured_clearance = curve.measured_clearance.min(tract.boundary_dist(z));
    }
    if !(curve.measured_clearance >= alpha * (1.0 - 1e-12)) {
        return Err(Error::TractInvariant(format!(
            "clearance curve comes within {} of the boundary, below alpha = {alpha}",
            curve.measured_clearance
        )));
    }
    // length(t) ≥ 1 as t → 0, so the ratio is only bounded away from the origin
    let t_hi = end;
    let mut ts: Vec<f64> = (0..=1000).map(|i| 2.0 + (t_hi - 2.0) * i as f64 / 1000.0).collect();
    ts.extend(curve.vertices.iter().map(|z| z.re).filter(|&x| x >= 2.0));
    curve.length_bound_k = ts
        .into_iter()
        .map(|t| curve.length_to(t) / t)
        .fold(0.0, f64::max);
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec3() -> LogSpec {
        let r = RadiiSpec::new(vec![6f64.exp(), 7f64.exp(), 8f64.exp()], None).unwrap();
        normalize_radii(&r, 2.5).unwrap()
    }

    fn tract3(delta: [f64; 3]) -> TractGeometry {
        build_tract(&spec3(), &delta, 0.25, 3).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let a = normalize_radii(&RadiiSpec::new(vec![6f64.exp(), 7f64.exp()], None).unwrap(), 2.5).unwrap();
        assert_eq!(a.lambda, 1.0);
        assert!((a.x_seq[0] - 6.0).abs() < 1e-14 && (a.x_seq[1] - 7.0).abs() < 1e-14);
        let b = normalize_radii(&RadiiSpec::new(vec![1.0, 2.0, 4.0], None).unwrap(), 2.5).unwrap();
        assert_eq!(b.lambda, 256.0);
        assert!(RadiiSpec::new(vec![2.0, 2.0], None).is_err());
        assert!(RadiiSpec::new(vec![], None).is_err());
        assert!(RadiiSpec::new(vec![1.0, 2.0], Some(3.0)).is_err());
        assert!(normalize_radii(&RadiiSpec::new(vec![1.0], None).unwrap(), 2.0).is_err());
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(choose_epsilons(&[6.0, 7.0, 9.0]), vec![1.0 / 32.0; 3]);
        let e = choose_epsilons(&[6.0, 6.25, 6.5]);
        assert_eq!(e, vec![0.25 / 16.0; 3]);
    }

    #[test]
    fn first_sector_coordinates() {
        let s = spec3();
        let t = build_tract(&s, &[0.0], 0.25, 1).unwrap();
        let r4 = t.rect(1, 4).unwrap();
        assert_eq!((r4.x.lo, r4.x.hi), (6.0, 6.0 + 1.0 / 256.0));
        assert!(t.contains(Complex64::new(6.0, 0.5)));
        let c = r4.center();
        assert!((t.boundary_dist(c) - 1.0 / 512.0).abs() < 1e-15);
        let e = t.eps(1);
        assert!(t.contains(Complex64::new(6.0 + e / 2.0, -e / 64.0)));
        assert!(!t.contains(Complex64::new(-0.5, 0.9)));
        assert!(t.contains(Complex64::new(-0.5, 0.1)));
        assert!(t.contains(Complex64::new(0.5, 0.9)));
    }

    #[test]
    fn slits_and_openings() {
        let t = tract3([0.0; 3]);
        let e = t.eps(1);
        // x = 0: open below ell, closed above
        assert!(t.contains(Complex64::new(0.0, 0.1)));
        assert!(!t.contains(Complex64::new(0.0, 0.5)));
        assert!(!t.contains(Complex64::new(0.0, -0.1)));
        // y = 0 above R4/R3, y = −ε/32 between R3/R2 and R5, x = x+ε between R2 and R6
        assert!(!t.contains(Complex64::new(6.0 + e / 4.0, 0.0)));
        assert!(!t.contains(Complex64::new(6.0 + e / 4.0, -e / 32.0)));
        assert!(!t.contains(Complex64::new(6.0 + 0.75 * e, -e / 32.0)));
        assert!(!t.contains(Complex64::new(6.0 + e, 0.5)));
        assert!(t.contains(Complex64::new(6.0 + e, -0.5)));
        // R3 joins R2 across x + ε/2
        assert!(t.contains(Complex64::new(6.0 + e / 2.0, -e / 64.0)));
        assert!(!t.contains(Complex64::new(6.0 + e / 2.0, 0.0)));
        // R4 joins R3 and R5 across its right edge
        assert!(t.contains(Complex64::new(6.0 + e / 8.0, -e / 64.0)));
        assert!(t.contains(Complex64::new(6.0 + e / 8.0, -0.5)));
        assert!(!t.contains(Complex64::new(t.cap_x, 0.5)));
    }

    #[test]
    fn boundary_dist_examples() {
        let t = tract3([0.0; 3]);
        assert!((t.boundary_dist(Complex64::new(-1.0, 0.0)) - 0.25).abs() < 1e-15);
        assert!((t.boundary_dist(Complex64::new(3.0, 0.5)) - 0.5).abs() < 1e-15);
        let e = t.eps(2);
        assert!((t.boundary_dist(Complex64::new(7.0 + e / 4.0, -e / 64.0)) - e / 64.0).abs() < 1e-15);
        assert_eq!(t.boundary_dist(Complex64::new(0.0, 0.5)), 0.0);
    }

    #[test]
    fn cross_sections() {
        let t = tract3([0.0, 0.0, 0.0]);
        let e = t.eps(1);
        assert_eq!(t.cross_section_theta(3.0).unwrap(), 1.0);
        assert_eq!(t.cross_section_theta(6.0 + e / 16.0).unwrap(), 2.0);
        assert_eq!(t.cross_section_theta(6.0 + e / 4.0).unwrap(), 2.0);
        assert_eq!(t.cross_section_theta(6.0 + 1.25 * e).unwrap(), 2.0);
        assert_eq!(t.cross_section_theta(-1.0).unwrap(), 0.5);
        assert!(t.cross_section_theta(-3.0).is_err());
        assert_eq!(t.channels_at(6.0 + 0.75 * e).len(), 2);
    }

    #[test]
    fn rejects_bad_construction() {
        let s = spec3();
        assert!(build_tract(&s, &[1.0, 0.0, 0.0], 0.25, 3).is_err());
        assert!(build_tract(&s, &[0.0, 0.0], 0.25, 3).is_err());
        assert!(build_tract(&s, &[0.0, 0.0, 0.0], 0.0, 3).is_err());
        assert!(build_tract(&s, &[0.0; 4], 0.25, 4).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = tract3([0.001, 0.002, 0.0]);
        let rects = TractGeometry::rects_from_text(&t.to_text()).unwrap();
        assert_eq!(rects, t.rects);
        assert!(TractGeometry::rects_from_text("1 2 [0,1 (0,1)").is_err());
    }

    #[test]
    fn clearance_single_sector() {
        let s = spec3();
        let t = build_tract(&s, &[0.0], 0.25, 1).unwrap();
        let g = clearance_curve(&t).unwrap();
        assert_eq!(g.alpha, t.eps(1) / 64.0);
        let pts = g.sample(g.total_length() / 100.0);
        assert!(pts.len() >= 100);
        assert!(pts.iter().all(|&z| t.boundary_dist(z) >= g.alpha * (1.0 - 1e-12)));
    }

    #[test]
    fn clearance_three_sectors() {
        let s = normalize_radii(&RadiiSpec::new(vec![6f64.exp(), 7f64.exp(), 8f64.exp()], Some(2.0)).unwrap(), 2.5)
            .unwrap();
        let t = build_tract(&s, &[0.0; 3], 0.25, 3).unwrap();
        let g = clearance_curve(&t).unwrap();
        assert!(g.length_bound_k <= 2.0 + 4.0 / 1.0);
        let tiny = build_tract(&s, &[0.0; 3], 1e-4, 3).unwrap();
        assert_eq!(clearance_curve(&tiny).unwrap().alpha, 5e-5);
    }

    proptest! {
        #[test]
        fn delta_moves_only_middle_rectangles(d1 in 0.0f64..1.0, d2 in 0.0f64..1.0, d3 in 0.0f64..1.0) {
            let e = 1.0 / 256.0;
            let a = tract3([0.0; 3]);
            let b = tract3([d1 * e, d2 * e, d3 * e]);
            for n in 1..=3 {
                for j in [1, 2, 6] {
                    prop_assert_eq!(a.rect(n, j), b.rect(n, j));
                }
                let (lo, hi) = b.i_interval(n);
                prop_assert!(lo > b.x(n) - b.eps(n) / 8.0 - 1e-15 && hi < b.x(n) + b.eps(n) / 8.0 + 1e-15);
            }
        }

        #[test]
        fn theta_bounded(s in -1.999f64..8.06) {
            let t = tract3([0.001, 0.0, 0.003]);
            let th = t.cross_section_theta(s).unwrap();
            prop_assert!(th > 0.0 && th <= 2.0);
        }

        #[test]
        fn boundary_dist_is_a_clear_disk(x in -2.0f64..8.1, y in -1.0f64..1.0, a in 0.0f64..6.3) {
            let t = tract3([0.002, 0.001, 0.0]);
            let z = Complex64::new(x, y);
            if t.contains(z) {
                let d = t.boundary_dist(z);
                prop_assert!(d > 0.0);
                let w = z + Complex64::from_polar(0.999 * d, a);
                prop_assert!(t.contains(w));
                prop_assert!(w.im.abs() < 1.0);
            }
        }
    }
}
