//! Harmonic conjugate on the dual grid and the strip coordinate.

use std::collections::VecDeque;
use std::sync::Arc;

use num_complex::Complex64;

use super::{HarmonicSolution, NodeKind};
use crate::error::{Error, Result};

/// `u + iv` with `v` defined on cell centres and `v(base) = 0`.
#[derive(Debug, Clone)]
pub struct ConjugatePair {
    pub solution: Arc<HarmonicSolution>,
    /// Row-major over cells (`i * (ny − 1) + j`); `NaN` for cells outside.
    pub v: Vec<f64>,
    /// Largest mismatch of `Δv` across any dual edge, relative to the local
    /// flux and `|v|`; zero up to rounding when every discrete loop closes.
    pub closure_residual: f64,
}

impl ConjugatePair {
    fn cells_y(&self) -> usize {
        self.solution.ny() - 1
    }

    fn cell_value(&self, i: usize, j: usize) -> f64 {
        self.v[i * self.cells_y() + j]
    }

    /// `v` at `z`: the containing cell's value corrected to first order
    /// through the Cauchy–Riemann equations. `None` outside every active cell.
    pub fn value(&self, z: Complex64) -> Option<f64> {
        let s = &self.solution;
        let (i0, j0) = s.cell_of(z)?;
        let mut cands = vec![(i0, j0)];
        if z.re == s.xs[i0] && i0 > 0 {
            cands.push((i0 - 1, j0));
        }
        if z.re == s.xs[i0 + 1] && i0 + 2 < s.nx() {
            cands.push((i0 + 1, j0));
        }
        let extra: Vec<(usize, usize)> = cands
            .iter()
            .flat_map(|&(i, j)| {
                let mut e = Vec::new();
                if z.im == s.ys[j] && j > 0 {
                    e.push((i, j - 1));
                }
                if z.im == s.ys[j + 1] && j + 2 < s.ny() {
                    e.push((i, j + 1));
                }
                e
            })
            .collect();
        cands.extend(extra);
        for (i, j) in cands {
            let vc = self.cell_value(i, j);
            if vc.is_nan() {
                continue;
            }
            let cx = 0.5 * (s.xs[i] + s.xs[i + 1]);
            let cy = 0.5 * (s.ys[j] + s.ys[j + 1]);
            let (gx, gy) = s.gradient(Complex64::new(cx, cy))?;
            // v_x = −u_y, v_y = u_x
            return Some(vc - gy * (z.re - cx) + gx * (z.im - cy));
        }
        None
    }
}

/// Builds the conjugate by integrating the discrete flux of `u` across
/// primal edges, breadth-first from the cell at the base point. Crossing an
/// edge with both endpoints on the boundary is forbidden, so slits are
/// never crossed.
pub fn harmonic_conjugate(solution: Arc<HarmonicSolution>) -> Result<ConjugatePair> {
    let s = &*solution;
    let (nx, ny) = (s.nx(), s.ny());
    let (cx, cy) = (nx - 1, ny - 1);
    let unknown = |i: usize, j: usize| s.kind_at(i, j) == NodeKind::Unknown;
    let active = |i: usize, j: usize| unknown(i, j) || unknown(i + 1, j) || unknown(i, j + 1) || unknown(i + 1, j + 1);
    let hx = |i: usize| s.xs[i + 1] - s.xs[i];
    let hy = |j: usize| s.ys[j + 1] - s.ys[j];

    // Δv from cell (i, j) to its right / upper neighbour
    let step_right = |i: usize, j: usize| -> Option<(f64, f64)> {
        if !(unknown(i + 1, j) || unknown(i + 1, j + 1)) {
            return None;
        }
        let dxc = 0.5 * (hx(i) + hx(i + 1));
        let du = s.at(i + 1, j + 1) - s.at(i + 1, j);
        let scale = (s.at(i + 1, j + 1).abs() + s.at(i + 1, j).abs()) * dxc / hy(j);
        Some((-du / hy(j) * dxc, scale))
    };
    let step_up = |i: usize, j: usize| -> Option<(f64, f64)> {
        if !(unknown(i, j + 1) || unknown(i + 1, j + 1)) {
            return None;
        }
        let dyc = 0.5 * (hy(j) + hy(j + 1));
        let du = s.at(i + 1, j + 1) - s.at(i, j + 1);
        let scale = (s.at(i + 1, j + 1).abs() + s.at(i, j + 1).abs()) * dyc / hx(i);
        Some((du / hx(i) * dyc, scale))
    };

    let base = s.base_point;
    let (bi, bj) = s
        .cell_of(base)
        .ok_or(Error::OutsideDomain { re: base.re, im: base.im })?;
    if !active(bi, bj) {
        return Err(Error::OutsideDomain { re: base.re, im: base.im });
    }
    let mut v = vec![f64::NAN; cx * cy];
    v[bi * cy + bj] = 0.0;
    let mut queue = VecDeque::from([(bi, bj)]);
    while let Some((i, j)) = queue.pop_front() {
        let here = v[i * cy + j];
        let visit = |ni: usize, nj: usize, dv: f64, v: &mut Vec<f64>, q: &mut VecDeque<(usize, usize)>| {
            if active(ni, nj) && v[ni * cy + nj].is_nan() {
                v[ni * cy + nj] = here + dv;
                q.push_back((ni, nj));
            }
        };
        if i + 1 < cx {
            if let Some((d, _)) = step_right(i, j) {
                visit(i + 1, j, d, &mut v, &mut queue);
            }
        }
        if i > 0 {
            if let Some((d, _)) = step_right(i - 1, j) {
                visit(i - 1, j, -d, &mut v, &mut queue);
            }
        }
        if j + 1 < cy {
            if let Some((d, _)) = step_up(i, j) {
                visit(i, j + 1, d, &mut v, &mut queue);
            }
        }
        if j > 0 {
            if let Some((d, _)) = step_up(i, j - 1) {
                visit(i, j - 1, -d, &mut v, &mut queue);
            }
        }
    }

    // every crossing, tree or not, must agree with the integrated values
    let mut closure: f64 = 0.0;
    for i in 0..cx {
        for j in 0..cy {
            let a = v[i * cy + j];
            if a.is_nan() {
                continue;
            }
            let mut check = |b: f64, step: Option<(f64, f64)>| {
                if let (false, Some((d, scale))) = (b.is_nan(), step) {
                    let denom = scale.max(a.abs()).max(b.abs());
                    if denom > 0.0 {
                        closure = closure.max((b - a - d).abs() / denom);
                    }
                }
            };
            if i + 1 < cx {
                check(v[(i + 1) * cy + j], step_right(i, j));
            }
            if j + 1 < cy {
                check(v[i * cy + j + 1], step_up(i, j));
            }
        }
    }

    let mut pair = ConjugatePair {
        solution: solution.clone(),
        v,
        closure_residual: closure,
    };
    let offset = pair
        .value(base)
        .ok_or(Error::OutsideDomain { re: base.re, im: base.im })?;
    for x in pair.v.iter_mut() {
        *x -= offset;
    }
    Ok(pair)
}

/// `φ = (ln |G| + i arg G) / π` with `G = u + iv`.
pub fn strip_coordinate(pair: &ConjugatePair, z: Complex64) -> Result<Complex64> {
    let u = pair.solution.interp(z);
    if !(u > 0.0) {
        return Err(Error::OutsideDomain { re: z.re, im: z.im });
    }
    let v = pair.value(z).ok_or(Error::OutsideDomain { re: z.re, im: z.im })?;
    Ok(Complex64::new(u.hypot(v).ln(), v.atan2(u)) / std::f64::consts::PI)
}
