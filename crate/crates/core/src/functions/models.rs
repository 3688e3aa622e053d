use super::angle::{polar_turns, sin_cos_turns, sin_turns};
use super::logcomplex::LogComplex;
use super::polya::{PolyaKernel, QuadratureParams};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Largest argument accepted by `exp` before overflow.
const EXP_MAX: f64 = 709.0;

/// Terms this many nats below the running maximum are dropped from Pólya sums.
pub const DROP_NATS: f64 = 40.0;

/// `a_n (z − b_n)` for one summand of a Pólya sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripTerm {
    pub a: Complex64,
    pub b: Complex64,
}

impl StripTerm {
    /// Whether `z` lies in the half-strip `{z : a(z − b) ∈ G₀}`.
    pub fn contains(&self, z: Complex64) -> bool {
        PolyaKernel::in_strip(self.a * (z - self.b))
    }
}

/// Parameters of `Σ_{n=1}^{N} g(a_n (z − b_n))`.
#[derive(Debug, Clone)]
pub struct PolyaSum {
    pub terms: Vec<StripTerm>,
    pub kernel: Arc<PolyaKernel>,
}

impl PolyaSum {
    /// `a_n = 2ⁿ`, `b_n = n(1 + 4πi)` for `n = 1..=N`.
    pub fn standard(n_terms: usize, quad: QuadratureParams) -> Result<Self> {
        let a: Vec<Complex64> = (1..=n_terms)
            .map(|n| Complex64::new(2f64.powi(n as i32), 0.0))
            .collect();
        let b: Vec<Complex64> = (1..=n_terms)
            .map(|n| Complex64::new(n as f64, 4.0 * PI * n as f64))
            .collect();
        Self::new(a, b, quad)
    }

    pub fn new(a_seq: Vec<Complex64>, b_seq: Vec<Complex64>, quad: QuadratureParams) -> Result<Self> {
        if a_seq.is_empty() || a_seq.len() != b_seq.len() {
            return Err(Error::InvalidParameter(
                "a_seq and b_seq must be nonempty and of equal length".into(),
            ));
        }
        for a in &a_seq {
            if !(a.im == 0.0 && a.re > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "a_n must be a positive real so the strips stay horizontal, got {a}"
                )));
            }
        }
        // horizontal half-strips {Re z > Re b, |Im z − Im b| < π/a}: disjoint
        // iff their vertical bands are disjoint
        for i in 0..a_seq.len() {
            for j in i + 1..a_seq.len() {
                let (ci, hi) = (b_seq[i].im, PI / a_seq[i].re);
                let (cj, hj) = (b_seq[j].im, PI / a_seq[j].re);
                if (ci - cj).abs() < hi + hj {
                    return Err(Error::InvalidParameter(format!(
                        "half-strips {} and {} overlap",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let terms = a_seq
            .into_iter()
            .zip(b_seq)
            .map(|(a, b)| StripTerm { a, b })
            .collect();
        Ok(PolyaSum {
            terms,
            kernel: Arc::new(PolyaKernel::new(quad)?),
        })
    }

    /// 1-based index of the half-strip containing `z`, if any.
    pub fn strip_index(&self, z: Complex64) -> Option<usize> {
        self.terms.iter().position(|t| t.contains(z)).map(|i| i + 1)
    }

    /// Log-sum-exp accumulation of the summands. Summands whose far-field
    /// bound is `DROP_NATS` below the running maximum are skipped.
    pub fn eval(&self, z: Complex64, strict: bool) -> Result<LogComplex> {
        let args: Vec<Complex64> = self.terms.iter().map(|t| t.a * (z - t.b)).collect();
        let mut total = LogComplex::ZERO;
        let mut running_max = f64::NEG_INFINITY;
        // residue-carrying terms first: they dominate when present
        let mut order: Vec<(usize, Option<f64>)> = args
            .iter()
            .enumerate()
            .map(|(i, &w)| (i, self.kernel.far_field_ln_bound(w)))
            .collect();
        order.sort_by(|a, b| match (a.1, b.1) {
            (None, None) => a.0.cmp(&b.0),
            (None, Some(_)) => std::cmp::Ordering::Less,
            (Some(_), None) => std::cmp::Ordering::Greater,
            (Some(x), Some(y)) => y.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)),
        });
        for (i, bound) in order {
            if let Some(bound) = bound {
                if bound < running_max - DROP_NATS {
                    continue;
                }
            }
            let term = if strict {
                self.kernel.eval(args[i])?
            } else {
                self.kernel.eval_entire(args[i])?
            };
            running_max = running_max.max(term.ln_abs());
            total = total.add(term);
        }
        Ok(total)
    }
}

/// The closed family of entire functions handled by the crate.
#[derive(Debug, Clone)]
pub enum FunctionModel {
    /// `c zⁿ`
    Monomial { c: Complex64, n: u32 },
    /// `e^z`
    Exponential,
    /// `Σ c_k z^k`, coefficients from the constant term up.
    Polynomial { coefficients: Vec<Complex64> },
    /// `α exp(e^{z²} + sin z)`
    Hardy { alpha: f64 },
    /// `exp(e^{z²} + 2z sin² z)`
    Tyler,
    /// The Pólya function `g` alone.
    PolyaCore { kernel: Arc<PolyaKernel> },
    /// `Σ g(a_n (z − b_n))`
    PolyaSum(PolyaSum),
    /// `e^{G}` composed with the logarithm on the tract; nominal error term zero.
    TractModel(crate::conformal::TractFunction),
}

impl FunctionModel {
    pub fn hardy(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Hardy alpha must be positive, got {alpha}"
            )));
        }
        Ok(FunctionModel::Hardy { alpha })
    }

    pub fn polya_core(quad: QuadratureParams) -> Result<Self> {
        Ok(FunctionModel::PolyaCore {
            kernel: Arc::new(PolyaKernel::new(quad)?),
        })
    }

    pub fn polya_sum(n_terms: usize, quad: QuadratureParams) -> Result<Self> {
        Ok(FunctionModel::PolyaSum(PolyaSum::standard(n_terms, quad)?))
    }

    pub fn name(&self) -> &'static str {
        match self {
            FunctionModel::Monomial { .. } => "monomial",
            FunctionModel::Exponential => "exponential",
            FunctionModel::Polynomial { .. } => "polynomial",
            FunctionModel::Hardy { .. } => "hardy",
            FunctionModel::Tyler => "tyler",
            FunctionModel::PolyaCore { .. } => "polya-core",
            FunctionModel::PolyaSum(_) => "polya-sum",
            FunctionModel::TractModel(_) => "tract",
        }
    }

    /// True when every defining coefficient is real, so `f(z̄) = conj f(z)`.
    pub fn has_real_coefficients(&self) -> bool {
        match self {
            FunctionModel::Monomial { c, .. } => c.im == 0.0,
            FunctionModel::Polynomial { coefficients } => coefficients.iter().all(|c| c.im == 0.0),
            FunctionModel::Exponential
            | FunctionModel::Hardy { .. }
            | FunctionModel::Tyler
            | FunctionModel::PolyaCore { .. } => true,
            FunctionModel::PolyaSum(_) | FunctionModel::TractModel(_) => false,
        }
    }

    /// `c zⁿ` has the whole plane as its maximum modulus set.
    pub fn is_monomial(&self) -> bool {
        match self {
            FunctionModel::Monomial { .. } => true,
            FunctionModel::Polynomial { coefficients } => {
                coefficients.iter().filter(|c| c.norm() != 0.0).count() <= 1
            }
            _ => false,
        }
    }

    /// `f(z)` in log scale.
    pub fn eval_log(&self, z: Complex64) -> Result<LogComplex> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParameter("z must be finite".into()));
        }
        match self {
            FunctionModel::Monomial { c, n } => {
                if *n > 0 && z.norm() == 0.0 {
                    return Ok(LogComplex::ZERO);
                }
                Ok(LogComplex::from_complex(*c).mul(LogComplex::from_complex(z).pow_int(*n)))
            }
            FunctionModel::Exponential => Ok(LogComplex::exp(z)),
            FunctionModel::Polynomial { coefficients } => {
                Ok(LogComplex::from_complex(horner(coefficients, z)))
            }
            FunctionModel::Hardy { alpha } => {
                let w = exp_z_squared(z)? + z.sin();
                finite_exponent(w)?;
                Ok(LogComplex::exp(w).scale_ln(alpha.ln()))
            }
            FunctionModel::Tyler => {
                let s = z.sin();
                let w = exp_z_squared(z)? + 2.0 * z * s * s;
                finite_exponent(w)?;
                Ok(LogComplex::exp(w))
            }
            FunctionModel::PolyaCore { kernel } => kernel.eval_entire(z),
            FunctionModel::PolyaSum(sum) => sum.eval(z, false),
            FunctionModel::TractModel(tf) => tf.eval_log(z),
        }
    }

    /// Strict evaluation: Pólya models refuse points near their contours
    /// instead of deforming the contour.
    pub fn eval_log_strict(&self, z: Complex64) -> Result<LogComplex> {
        match self {
            FunctionModel::PolyaCore { kernel } => kernel.eval(z),
            FunctionModel::PolyaSum(sum) => sum.eval(z, true),
            _ => self.eval_log(z),
        }
    }

    /// A radius-dependent offset `B(r)` such that
    /// `ln |f(r e^{2πiq})| = B(r) + excess(r, q)`. Comparisons on one circle
    /// use the excess only, which is computed without the catastrophic
    /// cancellation of the full log-modulus.
    pub fn baseline(&self, r: f64) -> f64 {
        match self {
            FunctionModel::Monomial { c, n } => c.norm().ln() + *n as f64 * r.ln(),
            FunctionModel::Exponential => r,
            FunctionModel::Hardy { alpha } => alpha.ln() + (r * r).exp(),
            FunctionModel::Tyler => (r * r).exp(),
            _ => 0.0,
        }
    }

    /// `ln |f(r e^{2πiq})| − baseline(r)`, angle in turns.
    pub fn excess(&self, r: f64, q: f64) -> Result<f64> {
        match self {
            FunctionModel::Monomial { .. } => Ok(0.0),
            FunctionModel::Exponential => {
                let s = sin_turns(0.5 * q);
                Ok(-2.0 * r * s * s)
            }
            FunctionModel::Hardy { .. } => {
                let z = polar_turns(r, q);
                let v = exp_z_squared_excess(r, q)? + z.re.sin() * z.im.cosh();
                finite(v, "hardy excess")
            }
            FunctionModel::Tyler => {
                let z = polar_turns(r, q);
                let s = z.sin();
                let v = exp_z_squared_excess(r, q)? + (2.0 * z * s * s).re;
                finite(v, "tyler excess")
            }
            _ => {
                let v = self.eval_log(polar_turns(r, q))?;
                Ok(v.ln_abs())
            }
        }
    }

    /// Full log-modulus on the circle, `baseline + excess`.
    pub fn ln_abs_polar(&self, r: f64, q: f64) -> Result<f64> {
        Ok(self.baseline(r) + self.excess(r, q)?)
    }
}

fn horner(coefficients: &[Complex64], z: Complex64) -> Complex64 {
    coefficients
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_nan() || v == f64::INFINITY {
        Err(Error::NonFinite(what))
    } else {
        Ok(v)
    }
}

fn finite_exponent(w: Complex64) -> Result<()> {
    if w.re.is_finite() && w.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("exponent"))
    }
}

fn exp_z_squared(z: Complex64) -> Result<Complex64> {
    let z2 = z * z;
    if z2.re > EXP_MAX {
        return Err(Error::NonFinite("e^{z^2}"));
    }
    Ok(z2.exp())
}

/// `Re e^{z²} − e^{r²}` at `z = r e^{2πiq}`, as
/// `e^{r²}·(expm1(−2r² sin²θ)·cos(r² sin 2θ) − 2 sin²(r² sinθ cosθ))`.
fn exp_z_squared_excess(r: f64, q: f64) -> Result<f64> {
    let r2 = r * r;
    if r2 > EXP_MAX {
        return Err(Error::NonFinite("e^{r^2}"));
    }
    let (s, c) = sin_cos_turns(q);
    let a = -2.0 * r2 * s * s;
    let phase = r2 * s * c;
    let cos2 = (2.0 * phase).cos();
    let sin_half = phase.sin();
    Ok(r2.exp() * (a.exp_m1() * cos2 - 2.0 * sin_half * sin_half))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardy_on_real_axis() {
        let m = FunctionModel::hardy(1.0).unwrap();
        let v = m.eval_log(Complex64::new(2.0, 0.0)).unwrap();
        assert!((v.log_modulus - (4f64.exp() + 2f64.sin())).abs() < 1e-12);
        assert!((v.log_modulus - 55.507).abs() < 1e-3);
        assert!((m.ln_abs_polar(2.0, 0.0).unwrap() - v.log_modulus).abs() < 1e-12);
        assert!(FunctionModel::hardy(0.0).is_err());
    }

    #[test]
    fn monomial_value() {
        let m = FunctionModel::Monomial {
            c: Complex64::new(1.0, 0.0),
            n: 3,
        };
        let v = m.eval_log(Complex64::new(0.0, 2.0)).unwrap();
        assert!((v.log_modulus - 3.0 * 2f64.ln()).abs() < 1e-14);
        assert!((v.argument + PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn tyler_on_imaginary_axis() {
        let m = FunctionModel::Tyler;
        let v = m.eval_log(Complex64::new(0.0, 1.0)).unwrap();
        assert!((v.log_modulus - (-1f64).exp()).abs() < 1e-14);
        let e = m.ln_abs_polar(1.0, 0.25).unwrap();
        assert!((e - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn excess_matches_direct_evaluation() {
        for m in [FunctionModel::hardy(2.0).unwrap(), FunctionModel::Tyler, FunctionModel::Exponential] {
            for &(r, q) in &[(1.3, 0.1), (2.0, 0.37), (0.7, 0.81), (2.2, 0.5)] {
                let direct = m.eval_log(polar_turns(r, q)).unwrap().log_modulus;
                let split = m.ln_abs_polar(r, q).unwrap();
                assert!((direct - split).abs() < 1e-9 * direct.abs().max(1.0), "{} {r} {q}", m.name());
            }
        }
    }

    #[test]
    fn hardy_axes_resolve_sine_difference_at_large_radius() {
        // at r = 9 the baseline is e^81; the axis values must still differ by 2 sin r
        let m = FunctionModel::hardy(1.0).unwrap();
        let r = 9.0;
        let d = m.excess(r, 0.0).unwrap() - m.excess(r, 0.5).unwrap();
        assert!((d - 2.0 * r.sin()).abs() < 1e-12);
    }

    #[test]
    fn overflow_is_reported() {
        let m = FunctionModel::Tyler;
        assert!(matches!(
            m.eval_log(Complex64::new(30.0, 0.0)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn polya_sum_rejects_overlapping_strips() {
        let q = QuadratureParams::default();
        let a = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let b = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)];
        assert!(PolyaSum::new(a, b, q).is_err());
        assert!(PolyaSum::standard(3, q).is_ok());
    }

    #[test]
    fn polya_sum_single_term_equals_core() {
        let q = QuadratureParams::default();
        let sum = PolyaSum::standard(1, q).unwrap();
        let core = PolyaKernel::new(q).unwrap();
        let z = Complex64::new(3.0, 4.0 * PI + 0.2);
        let a = sum.eval(z, true).unwrap();
        let t = sum.terms[0];
        let b = core.eval(t.a * (z - t.b)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn polya_sum_dominated_by_containing_strip() {
        let q = QuadratureParams::default();
        let sum = PolyaSum::standard(3, q).unwrap();
        let z = Complex64::new(3.5, 8.0 * PI);
        assert_eq!(sum.strip_index(z), Some(2));
        let full = sum.eval(z, true).unwrap().log_modulus;
        let t = sum.terms[1];
        let single = sum.kernel.eval(t.a * (z - t.b)).unwrap().log_modulus;
        assert!(((full - single) / single).abs() < 1e-6);
    }

    #[test]
    fn polya_sum_small_outside_strips() {
        let q = QuadratureParams::default();
        let sum = PolyaSum::standard(3, q).unwrap();
        for z in [Complex64::new(-2.0, 0.0), Complex64::new(-1.5, 5.0), Complex64::new(-3.0, -2.0)] {
            assert!(sum.eval(z, false).unwrap().log_modulus < 0.0);
        }
    }
}
