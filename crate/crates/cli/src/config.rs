//! Run configuration. TOML with five optional tables:
//!
//! ```toml
//! [model]            # kind = exponential | monomial | polynomial | hardy
//! kind = "hardy"     #        | tyler | polya-core | polya-sum
//! alpha = 1.0        # hardy
//! c = [1.0, 0.0]     # monomial coefficient (re, im), with n = degree
//! coefficients = [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]  # polynomial, constant first
//! terms = 3          # polya-sum
//! nodes_per_unit = 64
//! truncation_x = 5.0
//!
//! [grid]             # eval
//! x = [-4.0, 4.0]
//! y = [-4.0, 4.0]
//! points = [400, 400]
//!
//! [radius]           # maxmod, trace, discont, polya
//! min = 3.0
//! max = 10.0
//! steps = 700
//! samples = 4096
//! refine_tol = 1e-9
//! radial_tol = 1e-6
//! angle_tol = 0.05
//!
//! [tract]            # tract, solve, tune
//! log_radii = [6.0, 7.0, 8.0]   # or radii = [...]
//! sectors = 3        # use only the first N radii
//! l = 2.5
//! ell = 0.5          # fixed opening width; tune fits it when absent
//! delta = [0.0, 0.0, 0.0]
//! h = 0.0003
//! tol = 0.0003
//! budget = 5
//!
//! [output]
//! dir = "out"
//! format = "both"    # csv | svg | both
//! ```
//!
//! Unknown keys are rejected. Every value is checked before any
//! computation starts.

use std::path::{Path, PathBuf};

use maxmod_core::functions::{FunctionModel, QuadratureParams};
use maxmod_core::maxmod::{CircleParams, TraceParams, DEFAULT_ANGLE_TOL, DEFAULT_RADIAL_TOL, DEFAULT_REFINE_TOL, DEFAULT_SAMPLES};
use maxmod_core::tract::RadiiSpec;
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelConfig>,
    pub grid: Option<GridConfig>,
    pub radius: Option<RadiusConfig>,
    pub tract: Option<TractConfig>,
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: String,
    pub alpha: Option<f64>,
    pub c: Option<[f64; 2]>,
    pub n: Option<u32>,
    pub coefficients: Option<Vec<[f64; 2]>>,
    pub terms: Option<usize>,
    pub nodes_per_unit: Option<usize>,
    pub truncation_x: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x: Option<[f64; 2]>,
    pub y: Option<[f64; 2]>,
    pub points: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusConfig {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: Option<usize>,
    pub samples: Option<usize>,
    pub refine_tol: Option<f64>,
    pub radial_tol: Option<f64>,
    pub angle_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TractConfig {
    pub radii: Option<Vec<f64>>,
    pub log_radii: Option<Vec<f64>>,
    pub sectors: Option<usize>,
    pub l: Option<f64>,
    pub ell: Option<f64>,
    pub delta: Option<Vec<f64>>,
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
    pub format: Option<String>,
}

/// A configuration problem, with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad(field: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{field}: {msg}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            "both" => Ok(Format::Both),
            other => Err(bad("output.format", format!("expected csv, svg or both, got {other:?}"))),
        }
    }

    pub fn csv(self) -> bool {
        self != Format::Svg
    }

    pub fn svg(self) -> bool {
        self != Format::Csv
    }
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError(e.to_string().trim_end().to_string()))
}

fn positive(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(field, format!("must be positive and finite, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(field, format!("must be finite, got {v}")))
    }
}

fn range(field: &str, r: [f64; 2]) -> Result<(f64, f64), ConfigError> {
    let (a, b) = (finite(field, r[0])?, finite(field, r[1])?);
    if a > b {
        return Err(bad(field, format!("lower end {a} exceeds upper end {b}")));
    }
    Ok((a, b))
}

impl RunConfig {
    pub fn model(&self, default_kind: &str) -> Result<FunctionModel, ConfigError> {
        let fallback = ModelConfig { kind: default_kind.into(), ..Default::default() };
        let m = self.model.as_ref().unwrap_or(&fallback);
        let quad = QuadratureParams {
            nodes_per_unit: m.nodes_per_unit.unwrap_or(QuadratureParams::default().nodes_per_unit),
            truncation_x: m.truncation_x.unwrap_or(QuadratureParams::default().truncation_x),
            ..QuadratureParams::default()
        };
        let core = |e: maxmod_core::Error| bad("model", e);
        let model = match m.kind.as_str() {
            "exponential" => FunctionModel::Exponential,
            "monomial" => {
                let c = m.c.unwrap_or([1.0, 0.0]);
                FunctionModel::Monomial {
                    c: Complex64::new(finite("model.c", c[0])?, finite("model.c", c[1])?),
                    n: m.n.ok_or_else(|| bad("model.n", "required for a monomial"))?,
                }
            }
            "polynomial" => {
                let cs = m.coefficients.as_ref().ok_or_else(|| bad("model.coefficients", "required for a polynomial"))?;
                if cs.is_empty() {
                    return Err(bad("model.coefficients", "must not be empty"));
                }
                let mut coefficients = Vec::with_capacity(cs.len());
                for c in cs {
                    coefficients.push(Complex64::new(finite("model.coefficients", c[0])?, finite("model.coefficients", c[1])?));
                }
                FunctionModel::Polynomial { coefficients }
            }
            "hardy" => FunctionModel::hardy(m.alpha.unwrap_or(1.0)).map_err(|e| bad("model.alpha", e))?,
            "tyler" => FunctionModel::Tyler,
            "polya-core" => FunctionModel::polya_core(quad).map_err(core)?,
            "polya-sum" => {
                let terms = m.terms.unwrap_or(3);
                if terms == 0 {
                    return Err(bad("model.terms", "must be at least 1"));
                }
                FunctionModel::polya_sum(terms, quad).map_err(core)?
            }
            other => return Err(bad("model.kind", format!("unknown model {other:?}"))),
        };
        Ok(model)
    }

    /// `(x range, y range, points per axis)`; `spacing` overrides the point
    /// counts.
    pub fn grid(&self, spacing: Option<f64>) -> Result<((f64, f64), (f64, f64), [usize; 2]), ConfigError> {
        let g = self.grid.clone().unwrap_or_default();
        let x = range("grid.x", g.x.unwrap_or([-4.0, 4.0]))?;
        let y = range("grid.y", g.y.unwrap_or([-4.0, 4.0]))?;
        let mut points = g.points.unwrap_or([400, 400]);
        if let Some(h) = spacing {
            let h = positive("--grid", h)?;
            points = [((x.1 - x.0) / h).round() as usize + 1, ((y.1 - y.0) / h).round() as usize + 1];
        }
        for (k, p) in points.iter().enumerate() {
            let span = if k == 0 { x.1 - x.0 } else { y.1 - y.0 };
            if *p == 0 || (*p == 1 && span > 0.0) {
                return Err(bad("grid.points", "need at least two points along a non-degenerate range"));
            }
        }
        if points[0].saturating_mul(points[1]) > 25_000_000 {
            return Err(bad("grid.points", "more than 25 million points"));
        }
        Ok((x, y, points))
    }

    pub fn radius(&self, default: (f64, f64), per_unit: f64, spacing: Option<f64>, tol: Option<f64>) -> Result<RadiusPlan, ConfigError> {
        let r = self.radius.clone().unwrap_or_default();
        let min = positive("radius.min", r.min.unwrap_or(default.0))?;
        let max = positive("radius.max", r.max.unwrap_or(default.1))?;
        if min >= max {
            return Err(bad("radius", format!("min {min} must be below max {max}")));
        }
        let steps = match spacing {
            Some(h) => ((max - min) / positive("--grid", h)?).ceil() as usize,
            None => r.steps.unwrap_or(((max - min) * per_unit).ceil() as usize),
        };
        if steps < 2 {
            return Err(bad("radius.steps", "must be at least 2"));
        }
        let circle = CircleParams {
            samples: r.samples.unwrap_or(DEFAULT_SAMPLES),
            refine_tol: positive("radius.refine_tol", r.refine_tol.unwrap_or(DEFAULT_REFINE_TOL))?,
        };
        circle.validate().map_err(|e| bad("radius.samples", e))?;
        let angle_tol = positive("radius.angle_tol", r.angle_tol.unwrap_or(DEFAULT_ANGLE_TOL))?;
        let radial_tol = match tol {
            Some(t) => positive("--tol", t)?,
            None => positive("radius.radial_tol", r.radial_tol.unwrap_or(DEFAULT_RADIAL_TOL))?,
        };
        Ok(RadiusPlan { min, max, steps, radial_tol, trace: TraceParams { circle, angle_tol } })
    }

    pub fn tract(&self, spacing: Option<f64>, tol: Option<f64>) -> Result<TractPlan, ConfigError> {
        let t = self.tract.clone().ok_or_else(|| bad("tract", "table required"))?;
        let mut radii = match (&t.radii, &t.log_radii) {
            (Some(r), None) => r.clone(),
            (None, Some(x)) => x.iter().map(|v| v.exp()).collect(),
            (Some(_), Some(_)) => return Err(bad("tract", "give either radii or log_radii, not both")),
            (None, None) => return Err(bad("tract.radii", "required")),
        };
        if let Some(n) = t.sectors {
            if n == 0 || n > radii.len() {
                return Err(bad("tract.sectors", format!("must lie in 1..={}", radii.len())));
            }
            radii.truncate(n);
        }
        let spec = RadiiSpec::new(radii, None).map_err(|e| bad("tract.radii", e))?;
        let l = t.l.unwrap_or(2.5);
        if !(l > 2.0 && l.is_finite()) {
            return Err(bad("tract.l", format!("must exceed 2, got {l}")));
        }
        if let Some(ell) = t.ell {
            if !(ell > 0.0 && ell < 1.0) {
                return Err(bad("tract.ell", format!("must lie in (0, 1), got {ell}")));
            }
        }
        let h = match spacing.or(t.h) {
            Some(h) => Some(positive("tract.h", h)?),
            None => None,
        };
        let tol = match tol.or(t.tol) {
            Some(v) => Some(positive("tract.tol", v)?),
            None => None,
        };
        let budget = t.budget.unwrap_or(5);
        if budget == 0 {
            return Err(bad("tract.budget", "must be at least 1"));
        }
        Ok(TractPlan { radii: spec, l, ell: t.ell, delta: t.delta, h, tol, budget })
    }

    pub fn output(&self, dir: Option<&Path>, format: Option<&str>) -> Result<(PathBuf, Format), ConfigError> {
        let o = self.output.clone().unwrap_or_default();
        let dir = dir
            .map(Path::to_path_buf)
            .or_else(|| o.dir.map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        let format = Format::parse(format.or(o.format.as_deref()).unwrap_or("csv"))?;
        Ok((dir, format))
    }
}

#[derive(Debug, Clone)]
pub struct RadiusPlan {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub radial_tol: f64,
    pub trace: TraceParams,
}

impl RadiusPlan {
    pub fn radii(&self) -> Vec<f64> {
        let h = (self.max - self.min) / self.steps as f64;
        (0..=self.steps)
            .map(|i| if i == self.steps { self.max } else { self.min + i as f64 * h })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct TractPlan {
    pub radii: RadiiSpec,
    pub l: f64,
    pub ell: Option<f64>,
    pub delta: Option<Vec<f64>>,
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub budget: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_defaults() {
        let c = parse("").unwrap();
        let (x, y, p) = c.grid(None).unwrap();
        assert_eq!((x, y, p), ((-4.0, 4.0), (-4.0, 4.0), [400, 400]));
        assert_eq!(c.model("hardy").unwrap().name(), "hardy");
        let (_, f) = c.output(None, None).unwrap();
        assert_eq!(f, Format::Csv);
    }

    #[test]
    fn unknown_keys_report_their_line() {
        let e = parse("[model]\nkind = \"hardy\"\nalhpa = 2.0\n").unwrap_err();
        assert!(e.0.contains("alhpa") && e.0.contains("line 3"), "{e}");
    }

    #[test]
    fn field_diagnostics() {
        let c = parse("[model]\nkind = \"gamma\"\n").unwrap();
        assert!(c.model("hardy").unwrap_err().0.starts_with("model.kind"));
        let c = parse("[tract]\nlog_radii = [7.0, 6.0]\n").unwrap();
        assert!(c.tract(None, None).unwrap_err().0.starts_with("tract.radii"));
        let c = parse("[radius]\nmin = 5.0\nmax = 4.0\n").unwrap();
        assert!(c.radius((3.0, 10.0), 100.0, None, None).is_err());
        assert!(Format::parse("png").is_err());
    }

    #[test]
    fn spacing_overrides_counts() {
        let c = parse("[grid]\nx = [0.0, 1.0]\ny = [0.0, 0.0]\npoints = [2, 1]\n").unwrap();
        assert_eq!(c.grid(None).unwrap().2, [2, 1]);
        assert_eq!(c.grid(Some(0.25)).unwrap().2, [5, 1]);
    }
}
