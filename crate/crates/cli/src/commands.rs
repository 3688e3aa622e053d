use std::path::{Path, PathBuf};

use maxmod_core::acceptance::{self, Level};
use maxmod_core::conformal::{checks::opening_max, default_tract_h, solve_reg, verify_gap};
use maxmod_core::construct::{tune, DeltaParams, TuneParams};
use maxmod_core::functions::FunctionModel;
use maxmod_core::maxmod::{circle_max, discontinuities_from_trace, isolated_points_from_trace, trace_branches};
use maxmod_core::report;
use maxmod_core::tract::{build_tract, normalize_radii, TractGeometry};
use num_complex::Complex64;

use crate::config::{ConfigError, Format, RunConfig, TractPlan};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Core(maxmod_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(e) if e.is_numerical() || matches!(e, maxmod_core::Error::NonFinite(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<maxmod_core::Error> for CliError {
    fn from(e: maxmod_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// Everything a command needs besides its own arguments.
pub struct Ctx {
    pub config: RunConfig,
    pub out: PathBuf,
    pub format: Format,
    pub grid: Option<f64>,
    pub tol: Option<f64>,
}

impl Ctx {
    fn write(&self, name: &str, body: &str) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out).map_err(|e| CliError::Io(format!("{}: {e}", self.out.display())))?;
        let path: PathBuf = Path::new(&self.out).join(name);
        std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

/// `Ok(false)` marks a verification failure.
pub type Status = Result<bool, CliError>;

pub fn eval(ctx: &Ctx) -> Status {
    let model = ctx.config.model("hardy")?;
    let ((x0, x1), (y0, y1), [nx, ny]) = ctx.config.grid(ctx.grid)?;
    let coord = |a: f64, b: f64, n: usize, i: usize| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
    let mut points = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let z = Complex64::new(coord(x0, x1, nx, i), coord(y0, y1, ny, j));
            points.push((z, model.eval_log(z)?));
        }
    }
    ctx.write("eval.csv", &report::eval_csv(&points))?;
    Ok(true)
}

pub fn maxmod(ctx: &Ctx) -> Status {
    let model = ctx.config.model("hardy")?;
    let plan = ctx.config.radius((3.0, 10.0), 100.0, ctx.grid, ctx.tol)?;
    let mut csv = report::Csv::new(&["r", "log_m", "theta", "degenerate"]);
    let mut curve = Vec::new();
    for r in plan.radii() {
        let cm = circle_max(&model, r, &plan.trace.circle)?;
        curve.push((r, cm.log_m));
        if cm.maximizers.is_empty() {
            csv.row(&[report::fmt_f64(r), report::fmt_f64(cm.log_m), "nan".into(), cm.degenerate.to_string()]);
        }
        for t in &cm.maximizers {
            csv.row(&[report::fmt_f64(r), report::fmt_f64(cm.log_m), report::fmt_f64(*t), cm.degenerate.to_string()]);
        }
    }
    if ctx.format.csv() {
        ctx.write("maxmod.csv", &csv.finish())?;
    }
    if ctx.format.svg() {
        ctx.write("maxmod.svg", &report::line_svg("log M(r)", "r", "log M", &curve, &[]))?;
    }
    Ok(true)
}

pub fn trace(ctx: &Ctx) -> Status {
    let model = ctx.config.model("hardy")?;
    let plan = ctx.config.radius((3.0, 10.0), 100.0, ctx.grid, ctx.tol)?;
    let t = trace_branches(&model, plan.min, plan.max, plan.steps, &plan.trace)?;
    if ctx.format.csv() {
        ctx.write("branches.csv", &report::branches_csv(&t))?;
    }
    if ctx.format.svg() {
        ctx.write("branches.svg", &report::branch_svg(&t, &[]))?;
    }
    println!("{} branches over {} radii", t.branches.len(), t.radii.len());
    Ok(true)
}

pub fn discont(ctx: &Ctx) -> Status {
    let model = ctx.config.model("hardy")?;
    let plan = ctx.config.radius((3.0, 10.0), 100.0, ctx.grid, ctx.tol)?;
    let t = trace_branches(&model, plan.min, plan.max, plan.steps, &plan.trace)?;
    let mut found = discontinuities_from_trace(&model, &t, plan.radial_tol, &plan.trace)?;
    found.extend(isolated_points_from_trace(&model, &t, plan.radial_tol, &plan.trace)?);
    found.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.theta.total_cmp(&b.theta)));
    if ctx.format.csv() {
        ctx.write("discontinuities.csv", &report::discontinuities_csv(&found))?;
    }
    if ctx.format.svg() {
        ctx.write("discontinuities.svg", &report::branch_svg(&t, &found))?;
    }
    for d in &found {
        println!("{:<15} r = {:.9}  theta = {:.6}  left gap {:.3e}", d.kind.as_str(), d.r, d.theta, d.left_gap);
    }
    Ok(true)
}

pub fn polya(ctx: &Ctx) -> Status {
    let model = ctx.config.model("polya-sum")?;
    let FunctionModel::PolyaSum(sum) = &model else {
        return Err(CliError::Config("model.kind: polya needs kind = \"polya-sum\"".into()));
    };
    println!("orientation self-test discrepancy {:.3e}", sum.kernel.orientation_self_test()?);
    let plan = ctx.config.radius((16.0, 50.0), 5.0, ctx.grid, ctx.tol)?;
    let t = trace_branches(&model, plan.min, plan.max, plan.steps, &plan.trace)?;
    let jumps = discontinuities_from_trace(&model, &t, plan.radial_tol, &plan.trace)?;
    let mut csv = report::Csv::new(&["r", "theta", "log_m", "strip_index"]);
    let mut index = Vec::new();
    for (r, cm) in t.radii.iter().zip(&t.circles) {
        let mut best = 0;
        for &th in &cm.maximizers {
            let k = sum.strip_index(Complex64::from_polar(*r, th)).unwrap_or(0);
            best = best.max(k);
            csv.row(&[report::fmt_f64(*r), report::fmt_f64(th), report::fmt_f64(cm.log_m), k.to_string()]);
        }
        index.push((*r, best as f64));
    }
    if ctx.format.csv() {
        ctx.write("polya.csv", &csv.finish())?;
        ctx.write("discontinuities.csv", &report::discontinuities_csv(&jumps))?;
    }
    if ctx.format.svg() {
        let marks: Vec<f64> = jumps.iter().map(|d| d.r).collect();
        ctx.write("polya.svg", &report::line_svg("maximizing strip", "r", "strip", &index, &marks))?;
    }
    let monotone = index.windows(2).all(|w| w[1].1 >= w[0].1);
    println!("strip index {} -> {}, {} jumps, nondecreasing: {monotone}", index[0].1, index[index.len() - 1].1, jumps.len());
    Ok(monotone)
}

fn tract_from(plan: &TractPlan) -> Result<TractGeometry, CliError> {
    let spec = normalize_radii(&plan.radii, plan.l)?.with_padding();
    let total = spec.x_seq.len();
    let mut delta = vec![0.0; total];
    if let Some(d) = &plan.delta {
        if d.len() != total - 1 {
            return Err(CliError::Config(format!("tract.delta: need {} values, got {}", total - 1, d.len())));
        }
        delta[..total - 1].copy_from_slice(d);
    }
    Ok(build_tract(&spec, &delta, plan.ell.unwrap_or(0.5), total)?)
}

pub fn tract(ctx: &Ctx) -> Status {
    let plan = ctx.config.tract(ctx.grid, ctx.tol)?;
    let t = tract_from(&plan)?;
    ctx.write("tract.txt", &t.to_text())?;
    if ctx.format.svg() {
        ctx.write("tract.svg", &report::tract_svg(&t))?;
    }
    println!("{} sectors (+1 padding), {} rectangles, trusted up to Re z = {:.6}", t.n - 1, t.rects.len(), t.trust_x());
    Ok(true)
}

pub fn solve(ctx: &Ctx) -> Status {
    let plan = ctx.config.tract(ctx.grid, ctx.tol)?;
    let t = tract_from(&plan)?;
    let h = plan.h.unwrap_or_else(|| default_tract_h(&t));
    let sol = solve_reg(&t, h)?;
    println!("grid {} x {}, h = {h:.3e}, relative residual {:.2e}", sol.nx(), sol.ny(), sol.residual);
    println!("opening max {:.4}", opening_max(&sol, t.ell)?);
    for n in 1..t.n {
        let g = verify_gap(&sol, &t, n)?;
        println!("sector {n}: gap {:.3e} from Re z = {:.6}", g.min_gap, g.t);
    }
    if ctx.format.csv() {
        ctx.write("solution.txt", &report::grid_dump(&sol))?;
    }
    if ctx.format.svg() {
        ctx.write("heatmap.svg", &report::heatmap_svg(&sol, 200))?;
    }
    Ok(true)
}

pub fn tune_cmd(ctx: &Ctx) -> Status {
    let plan = ctx.config.tract(ctx.grid, ctx.tol)?;
    let params = TuneParams {
        l: plan.l,
        ell: plan.ell,
        delta: DeltaParams { tol: plan.tol, budget: plan.budget, h: plan.h },
        ..TuneParams::default()
    };
    let rep = tune(&plan.radii, &params)?;
    let mut text = format!("opening width {:.6}\nsweeps {}, harmonic solves {}\n\n", rep.ell, rep.delta.sweeps, rep.delta.solves);
    for c in &rep.certificates {
        text.push_str(&report::certificate_block(c));
    }
    if let Some(g) = &rep.growth {
        text.push_str(&format!(
            "\ngrowth: ln max u = {:.6} t + {:.6}, deviation {:.4} of the rise\n",
            g.slope, g.intercept, g.deviation
        ));
    }
    print!("{text}");
    ctx.write("report.txt", &text)?;
    if ctx.format.csv() {
        ctx.write("certificates.csv", &report::certificates_csv(&rep.certificates))?;
        if let Some(g) = &rep.growth {
            let mut csv = report::Csv::new(&["t", "max_u"]);
            for &(t, m) in &g.points {
                csv.row(&[report::fmt_f64(t), report::fmt_f64(m)]);
            }
            ctx.write("growth.csv", &csv.finish())?;
        }
    }
    if ctx.format.svg() {
        ctx.write("tract.svg", &report::tract_svg(&rep.delta.tract))?;
    }
    Ok(rep.certificates.iter().all(|c| c.robust && c.within_tol))
}

pub fn verify(level: &str) -> Status {
    let level: Level = level.parse().map_err(|e: maxmod_core::Error| CliError::Config(e.to_string()))?;
    let mut ok = true;
    for id in acceptance::criteria_for(level) {
        let r = acceptance::run_criterion(id)?;
        println!("{}", r.line());
        ok &= r.pass;
    }
    Ok(ok)
}
