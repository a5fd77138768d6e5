use super::ModeOutput;
use crate::config::{parse_list, Settings};
use crate::error::{CliError, CliResult};
use crate::input::read_columns;
use crate::output::{format_real, Table};
use ffd_adapt::bernstein::BezierCurve2D;
use ffd_adapt::inverse2d::{
    two_phase_reconstruct, FitTolerance, InverseSolver, ReconstructConfig, SampledCurve, TargetShape2D,
    TikhonovConfig,
};

const SECTION: &str = "reconstruct2d";

pub fn resolve(s: &Settings) -> CliResult<(ReconstructConfig, TargetShape2D)> {
    let degree: u32 = s.value(SECTION, "degree", "8")?;
    let cycles: usize = s.value(SECTION, "cycles", "3")?;
    let mut cfg = ReconstructConfig::new(degree, cycles);
    cfg.solver = match s.value::<String>(SECTION, "solver", "exact")?.as_str() {
        "exact" => InverseSolver::Exact,
        "tikhonov" => InverseSolver::Tikhonov(TikhonovConfig::new(s.value(SECTION, "rho", "1e-10")?)?),
        other => return Err(CliError::Config(format!("reconstruct2d.solver '{other}' is not exact|tikhonov"))),
    };
    cfg.adapt.fit_tolerance = match s.value::<String>(SECTION, "tolerance", "relative")?.as_str() {
        "relative" => FitTolerance::Relative {
            factor: s.value(SECTION, "tolerance_factor", "1.05")?,
            floor: s.value(SECTION, "tolerance_floor", "1e-3")?,
        },
        "absolute" => FitTolerance::Absolute(s.value(SECTION, "tolerance_value", "1e-3")?),
        other => {
            return Err(CliError::Config(format!(
                "reconstruct2d.tolerance '{other}' is not relative|absolute"
            )))
        }
    };
    cfg.adapt.penalty = s.value(SECTION, "penalty", "1e6")?;
    cfg.adapt.optimizer.max_evaluations = s.value(SECTION, "adapt_max_evaluations", "3000")?;
    cfg.adapt.optimizer.initial_step = s.value(SECTION, "adapt_initial_step", "0.5")?;
    cfg.adapt.optimizer.validate()?;
    if cfg.cycles == 0 || cfg.degree == 0 {
        return Err(CliError::Config("reconstruct2d needs degree >= 1 and cycles >= 1".into()));
    }

    let samples: usize = s.value(SECTION, "samples", "2001")?;
    let target = match s.value::<String>(SECTION, "target", "ramp")?.as_str() {
        "ramp" => {
            let k: f64 = s.value(SECTION, "steepness", "10")?;
            TargetShape2D::Samples(SampledCurve::from_fn(samples, move |x| 0.5 * (1.0 + (k * (x - 0.5)).tanh()))?)
        }
        "line" => {
            let a: f64 = s.value(SECTION, "intercept", "0")?;
            let b: f64 = s.value(SECTION, "slope", "1")?;
            TargetShape2D::Samples(SampledCurve::from_fn(samples, move |x| a + b * x)?)
        }
        "bezier" => {
            let design = s.value_with(SECTION, "design", "0,1", parse_list::<f64>)?;
            TargetShape2D::Bezier(BezierCurve2D::with_uniform_support(design)?)
        }
        "file" => {
            let path = s
                .input_path("paths", "target")?
                .ok_or_else(|| CliError::Config("reconstruct2d.target = file needs paths.target".into()))?;
            let rows = read_columns(&path, &["x", "y"])?;
            let (xs, ys) = rows.iter().map(|r| (r[0], r[1])).unzip();
            TargetShape2D::Samples(SampledCurve::new(xs, ys).map_err(|e| CliError::input(path.display().to_string(), e))?)
        }
        other => {
            return Err(CliError::Config(format!(
                "reconstruct2d.target '{other}' is not ramp|line|bezier|file"
            )))
        }
    };
    Ok((cfg, target))
}

pub fn execute(cfg: &ReconstructConfig, target: &TargetShape2D) -> CliResult<ModeOutput> {
    let records = two_phase_reconstruct(target, cfg)?;
    let mut history = Table::new(&["cycle", "phase", "fit_error", "tv"]);
    for r in &records {
        history.push(vec![r.cycle.into(), r.phase.as_str().into(), r.fit_error.into(), r.tv.into()]);
    }
    let last = records.last().expect("at least one cycle");
    let mut curve = Table::new(&["index", "x", "y"]);
    for (i, (x, y)) in last.curve.support().iter().zip(last.curve.design()).enumerate() {
        curve.push(vec![i.into(), (*x).into(), (*y).into()]);
    }
    let mut out = ModeOutput::default();
    out.result("final_fit_error", format_real(last.fit_error));
    out.result("final_tv", format_real(last.tv));
    out.result("initial_tv", format_real(records[0].tv));
    out.line(format!(
        "degree {} over {} cycles: TV {} -> {}, fit error {}",
        cfg.degree, cfg.cycles, records[0].tv, last.tv, last.fit_error
    ));
    out.artifacts.add_table("history.csv", &history);
    out.artifacts.add_table("curve.csv", &curve);
    Ok(out)
}
