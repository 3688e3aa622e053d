//! Discrete harmonic measure of a tract: `Re G` with zero boundary values,
//! a sine profile on the right cap, normalized to `1` at the base point.

mod band;
pub mod checks;
pub mod conjugate;
pub mod grid;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functions::LogComplex;
use band::BandMatrix;

pub use checks::{
    growth_profile, max_reg_on_segment, verify_ell, verify_gap, EllProbe, EllReport, GapReport,
    GrowthProfile,
};
pub use conjugate::{harmonic_conjugate, strip_coordinate, ConjugatePair};
pub use grid::{default_tract_h, AxisSpec, Cap, HalfStrip, Region, Zone, DEFAULT_RATIO};

/// Role of a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Unknown,
    Zero,
    Cap,
}

/// Grid solution of the discrete Dirichlet problem.
#[derive(Debug, Clone)]
pub struct HarmonicSolution {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Column-major (`i * ny + j`) node roles.
    pub kind: Vec<NodeKind>,
    /// Column-major node values, boundary values included.
    pub u: Vec<f64>,
    /// Largest local residual `|(A u − b)_p| / (a_pp · max neighbour |u|)`.
    pub residual: f64,
    pub cap: Cap,
    /// Cap amplitude after normalization.
    pub cap_amplitude: f64,
    pub base_point: Complex64,
    pub h: f64,
}

impl HarmonicSolution {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }
    pub fn ny(&self) -> usize {
        self.ys.len()
    }
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.u[i * self.ys.len() + j]
    }
    pub fn kind_at(&self, i: usize, j: usize) -> NodeKind {
        self.kind[i * self.ys.len() + j]
    }
    pub fn unknowns(&self) -> usize {
        self.kind.iter().filter(|&&k| k == NodeKind::Unknown).count()
    }

    /// Cell index `i` with `xs[i] ≤ x ≤ xs[i+1]`, or `None` outside.
    fn cell(v: &[f64], x: f64) -> Option<usize> {
        if !(x >= v[0] && x <= v[v.len() - 1]) {
            return None;
        }
        let k = v.partition_point(|&t| t <= x);
        Some(k.saturating_sub(1).min(v.len() - 2))
    }

    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        Some((Self::cell(&self.xs, z.re)?, Self::cell(&self.ys, z.im)?))
    }

    /// Bilinear interpolation; `0` outside the grid box.
    pub fn interp(&self, z: Complex64) -> f64 {
        let Some((i, j)) = self.cell_of(z) else {
            return 0.0;
        };
        let tx = (z.re - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        let ty = (z.im - self.ys[j]) / (self.ys[j + 1] - self.ys[j]);
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        (1.0 - tx) * ((1.0 - ty) * v00 + ty * v01) + tx * ((1.0 - ty) * v10 + ty * v11)
    }

    /// Gradient of the bilinear interpolant at `z`.
    pub fn gradient(&self, z: Complex64) -> Option<(f64, f64)> {
        let (i, j) = self.cell_of(z)?;
        let hx = self.xs[i + 1] - self.xs[i];
        let hy = self.ys[j + 1] - self.ys[j];
        let tx = (z.re - self.xs[i]) / hx;
        let ty = (z.im - self.ys[j]) / hy;
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        let gx = ((1.0 - ty) * (v10 - v00) + ty * (v11 - v01)) / hx;
        let gy = ((1.0 - tx) * (v01 - v00) + tx * (v11 - v10)) / hy;
        Some((gx, gy))
    }

    /// Largest interpolated value on `{Re = t, y_lo < Im < y_hi}`, with the
    /// height where it is attained. The interpolant is piecewise linear
    /// along the segment, so grid crossings and endpoints suffice.
    pub fn column_max(&self, t: f64, y_lo: f64, y_hi: f64) -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, y_lo);
        let mut probe = |y: f64| {
            let v = self.interp(Complex64::new(t, y));
            if v > best.0 {
                best = (v, y);
            }
        };
        probe(y_lo);
        probe(y_hi);
        let a = self.ys.partition_point(|&y| y <= y_lo);
        for &y in self.ys[a..].iter().take_while(|&&y| y < y_hi) {
            probe(y);
        }
        best
    }

    /// Largest nodal value.
    pub fn max_value(&self) -> f64 {
        self.u.iter().cloned().fold(0.0, f64::max)
    }
}

fn column_major_index(kind: &[NodeKind]) -> (Vec<usize>, usize) {
    let mut idx = vec![usize::MAX; kind.len()];
    let mut n = 0;
    for (p, k) in kind.iter().enumerate() {
        if *k == NodeKind::Unknown {
            idx[p] = n;
            n += 1;
        }
    }
    (idx, n)
}

/// Solves the discrete Dirichlet problem on `region` with finest spacing `h`.
///
/// Five-point finite-volume stencil on the graded grid; the symmetric
/// M-matrix is factored with [`band::BandMatrix`] so that values decaying
/// through thin channels keep full relative accuracy.
pub fn solve_reg<R: Region + ?Sized>(region: &R, h: f64) -> Result<HarmonicSolution> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("grid spacing {h} must be positive")));
    }
    let (ax, ay) = region.axes(h)?;
    let xs = ax.nodes()?;
    let ys = ay.nodes()?;
    region.check_grid(&xs, &ys)?;
    let (nx, ny) = (xs.len(), ys.len());
    let cap = region.cap();
    let mut kind = vec![NodeKind::Zero; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            let z = Complex64::new(xs[i], ys[j]);
            kind[i * ny + j] = if region.contains(z) {
                if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                    return Err(Error::InvalidParameter(
                        "region touches the edge of its grid box".into(),
                    ));
                }
                NodeKind::Unknown
            } else if xs[i] == cap.x && ys[j] > cap.y_lo && ys[j] < cap.y_hi {
                NodeKind::Cap
            } else {
                NodeKind::Zero
            };
        }
    }
    let base = region.base_point();
    let (bi, bj) = match (
        xs.iter().position(|&x| x == base.re),
        ys.iter().position(|&y| y == base.im),
    ) {
        (Some(i), Some(j)) if kind[i * ny + j] == NodeKind::Unknown => (i, j),
        _ => {
            return Err(Error::InvalidParameter(
                "base point must be an interior grid node".into(),
            ))
        }
    };
    let (idx, n) = column_major_index(&kind);
    let mut bw = 1;
    for i in 0..nx - 1 {
        for j in 0..ny {
            let p = i * ny + j;
            let q = p + ny;
            if kind[p] == NodeKind::Unknown && kind[q] == NodeKind::Unknown {
                bw = bw.max(idx[q] - idx[p]);
            }
        }
    }

    // couplings: a_E = Δy_c / h_x, a_N = Δx_c / h_y
    let dual = |v: &[f64], k: usize| 0.5 * (v[(k + 1).min(v.len() - 1)] - v[k.saturating_sub(1)]);
    let mut m = BandMatrix::new(n, bw);
    let mut rhs = vec![0.0; n];
    let capv = |j: usize| cap.profile(ys[j]);
    let mut link = |p: usize, q: usize, w: f64, qj: usize, m: &mut BandMatrix| match (kind[p], kind[q]) {
        (NodeKind::Unknown, NodeKind::Unknown) => m.add_coupling(idx[p], idx[q], w),
        (NodeKind::Unknown, other) => {
            m.add_excess(idx[p], w);
            if other == NodeKind::Cap {
                rhs[idx[p]] += w * capv(qj);
            }
        }
        (other, NodeKind::Unknown) => {
            m.add_excess(idx[q], w);
            if other == NodeKind::Cap {
                rhs[idx[q]] += w * capv(qj);
            }
        }
        _ => {}
    };
    for i in 0..nx {
        for j in 0..ny {
            let p = i * ny + j;
            if i + 1 < nx {
                let w = dual(&ys, j) / (xs[i + 1] - xs[i]);
                // cap value index is the Cap node's row; both nodes share row j
                link(p, p + ny, w, j, &mut m);
            }
            if j + 1 < ny {
                let w = dual(&xs, i) / (ys[j + 1] - ys[j]);
                let qj = if kind[p] == NodeKind::Cap { j } else { j + 1 };
                link(p, p + 1, w, qj, &mut m);
            }
        }
    }
    let factor = m.factor()?;
    let mut amplitude = 1.0;
    let mut sol = factor.solve(&rhs);
    let base_idx = idx[bi * ny + bj];
    if !(sol[base_idx] > 1e-250) {
        // the base value underflowed: drive the cap harder
        amplitude = 1e250;
        let scaled: Vec<f64> = rhs.iter().map(|&b| b * amplitude).collect();
        sol = factor.solve(&scaled);
    }
    let ub = sol[base_idx];
    if !(ub > 0.0 && ub.is_finite()) {
        return Err(Error::NonConvergence(format!(
            "base value {ub} is not a positive finite number"
        )));
    }
    let scale = 1.0 / ub;
    let mut u = vec![0.0; nx * ny];
    for p in 0..nx * ny {
        u[p] = match kind[p] {
            NodeKind::Unknown => sol[idx[p]] * scale,
            NodeKind::Cap => capv(p % ny) * amplitude * scale,
            NodeKind::Zero => 0.0,
        };
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("harmonic solution"));
    }
    let mut out = HarmonicSolution {
        xs,
        ys,
        kind,
        u,
        residual: 0.0,
        cap,
        cap_amplitude: amplitude * scale,
        base_point: base,
        h,
    };
    out.residual = local_residual(&out);
    Ok(out)
}

/// Largest relative five-point residual over unknown nodes.
pub fn local_residual(sol: &HarmonicSolution) -> f64 {
    let (nx, ny) = (sol.nx(), sol.ny());
    let (xs, ys) = (&sol.xs, &sol.ys);
    let mut worst: f64 = 0.0;
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            if sol.kind_at(i, j) != NodeKind::Unknown {
                continue;
            }
            let dyc = 0.5 * (ys[j + 1] - ys[j - 1]);
            let dxc = 0.5 * (xs[i + 1] - xs[i - 1]);
            let nb = [
                (dyc / (xs[i + 1] - xs[i]), sol.at(i + 1, j)),
                (dyc / (xs[i] - xs[i - 1]), sol.at(i - 1, j)),
                (dxc / (ys[j + 1] - ys[j]), sol.at(i, j + 1)),
                (dxc / (ys[j] - ys[j - 1]), sol.at(i, j - 1)),
            ];
            let up = sol.at(i, j);
            let diag: f64 = nb.iter().map(|p| p.0).sum();
            let r: f64 = nb.iter().map(|&(w, v)| w * (v - up)).sum();
            let scale = nb.iter().map(|p| p.1.abs()).fold(up.abs(), f64::max);
            if scale > 0.0 {
                worst = worst.max(r.abs() / (diag * scale));
            }
        }
    }
    worst
}

/// `e^{G}` pulled back to the plane: `f(w) = exp(G(ln w))` inside the
/// tract and `0` outside.
#[derive(Debug, Clone)]
pub struct TractFunction {
    pub solution: Arc<HarmonicSolution>,
    pub conjugate: Option<Arc<ConjugatePair>>,
}

impl TractFunction {
    pub fn new(solution: Arc<HarmonicSolution>, conjugate: Option<Arc<ConjugatePair>>) -> Self {
        TractFunction { solution, conjugate }
    }

    /// Log-modulus and argument at the logarithmic coordinate `z`.
    pub fn eval_log_coordinate(&self, z: Complex64) -> LogComplex {
        let u = self.solution.interp(z);
        if !(u > 0.0) {
            return LogComplex::ZERO;
        }
        let v = self
            .conjugate
            .as_ref()
            .and_then(|c| c.value(z))
            .unwrap_or(0.0);
        LogComplex::new(u, v)
    }

    pub fn eval_log(&self, w: Complex64) -> Result<LogComplex> {
        if w.norm() == 0.0 {
            return Ok(LogComplex::ZERO);
        }
        Ok(self.eval_log_coordinate(w.ln()))
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use crate::tract::{build_tract, normalize_radii, RadiiSpec, TractGeometry};

    /// `n` sectors at `x = 6, 7, …` plus one padding sector.
    pub(crate) fn unit_tract(n: usize, ell: f64, delta_frac: f64) -> TractGeometry {
        let radii: Vec<f64> = (0..n).map(|k| (6.0 + k as f64).exp()).collect();
        let spec = normalize_radii(&RadiiSpec::new(radii, None).unwrap(), 2.5).unwrap();
        let spec = spec.with_padding();
        let delta: Vec<f64> = spec.eps_seq.iter().map(|e| e / 8.0 * delta_frac).collect();
        build_tract(&spec, &delta, ell, n + 1).unwrap()
    }
}

#[cfg(test)]
mod tests;
