use super::{resolve_bounds, resolve_degrees, resolve_freeze, resolve_geometry, Geometry, ModeOutput};
use crate::config::{parse_auto, parse_triple, Settings};
use crate::error::{CliError, CliResult};
use crate::input::{obj_bytes, read_columns, read_mesh, tagged_or_all};
use crate::output::{format_real, Table};
use ffd_adapt::ffd::{DofMap, FfdLattice, LatticeBounds, Mesh};
use ffd_adapt::objectives::{penalized_cost, AeroCoefficients, PenaltyConfig, SurfaceTarget, WingFitProblem};
use ffd_adapt::optimizer::{run_with_adaption, AdaptionSchedule, AdaptiveProblem, AdaptiveRun, NmConfig};
use ffd_adapt::par;
use ffd_adapt::wing::{seeded_target, TargetSpec};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Basic,
    Adaptive,
    Both,
    None,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "basic" => Ok(Strategy::Basic),
            "adaptive" => Ok(Strategy::Adaptive),
            "both" => Ok(Strategy::Both),
            "none" => Ok(Strategy::None),
            other => Err(format!("'{other}' is not basic|adaptive|both|none")),
        }
    }
}

pub struct OptimizeConfig {
    pub geometry: Geometry,
    pub bounds: LatticeBounds,
    pub dofs: DofMap,
    pub target: SurfaceTarget,
    pub optimizer: NmConfig,
    pub strategy: Strategy,
    pub adaptive: AdaptionSchedule,
    pub replay: Option<(PathBuf, PenaltyConfig)>,
}

pub fn resolve(s: &Settings, seed: u64) -> CliResult<OptimizeConfig> {
    let geometry = resolve_geometry(s)?;
    let bounds = resolve_bounds(s, &geometry)?;
    let degrees = resolve_degrees(s)?;
    let freeze = resolve_freeze(s)?;
    let dofs = DofMap::new(degrees, &freeze).map_err(|e| CliError::input("lattice", e))?;
    let design_mesh = tagged_or_all(&geometry.mesh)?;

    let target = match s.value::<String>("target", "kind", "seeded")?.as_str() {
        "seeded" => {
            let d = TargetSpec::default();
            let degrees_text = format!("{},{},{}", d.degrees[0], d.degrees[1], d.degrees[2]);
            let spec = TargetSpec {
                degrees: s.value_with("target", "degrees", &degrees_text, parse_triple::<usize>)?,
                amplitude: s.value("target", "amplitude", &d.amplitude.to_string())?,
            };
            seeded_target(&design_mesh, bounds, spec, seed).map_err(|e| CliError::input("seeded target", e))?.0
        }
        "file" => {
            let path = s
                .input_path("paths", "target")?
                .ok_or_else(|| CliError::Config("target.kind = file needs paths.target".into()))?;
            let ctx = path.display().to_string();
            let is_obj = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj"));
            if is_obj {
                let mesh = tagged_or_all(&read_mesh(&path)?)?;
                SurfaceTarget::from_mesh(&mesh, dofs.motion()).map_err(|e| CliError::input(ctx, e))?
            } else {
                let rows = read_columns(&path, &["x", "y", "z"])?;
                let points = rows.iter().map(|r| [r[0], r[1], r[2]]).collect();
                SurfaceTarget::new(points, dofs.motion()).map_err(|e| CliError::input(ctx, e))?
            }
        }
        other => return Err(CliError::Config(format!("target.kind '{other}' is not seeded|file"))),
    };

    let d = NmConfig::default();
    let step = s.value_with("optimizer", "initial_step", "auto", parse_auto)?;
    let optimizer = NmConfig {
        reflection: s.value("optimizer", "reflection", &d.reflection.to_string())?,
        expansion: s.value("optimizer", "expansion", &d.expansion.to_string())?,
        contraction: s.value("optimizer", "contraction", &d.contraction.to_string())?,
        shrink: s.value("optimizer", "shrink", &d.shrink.to_string())?,
        initial_step: step.unwrap_or(0.05 * bounds.span()[dofs.motion().index()]),
        max_evaluations: s.value("optimizer", "max_evaluations", "600")?,
        simplex_size_tol: s.value("optimizer", "simplex_size_tol", &d.simplex_size_tol.to_string())?,
        value_tol: s.value("optimizer", "value_tol", &d.value_tol.to_string())?,
    };
    optimizer.validate().map_err(|e| CliError::input("optimizer", e))?;

    let strategy: Strategy = s.value("schedule", "strategy", "both")?;
    let adaptive = AdaptionSchedule {
        period: s.value("schedule", "period", "100")?,
        max_cycles: s.value_with("schedule", "max_cycles", "unbounded", |t| {
            if t == "unbounded" {
                Ok(usize::MAX)
            } else {
                t.parse::<usize>().map_err(|e| e.to_string())
            }
        })?,
    };
    adaptive.validate().map_err(|e| CliError::input("schedule", e))?;

    let replay = match s.input_path("paths", "coefficients")? {
        Some(path) => {
            let d = PenaltyConfig::default();
            let cfg = PenaltyConfig {
                weight: s.value("penalty", "weight", &d.weight.to_string())?,
                lift_floor: s.value("penalty", "lift_floor", &d.lift_floor.to_string())?,
            };
            Some((path, cfg))
        }
        None => None,
    };

    Ok(OptimizeConfig {
        geometry,
        bounds,
        dofs,
        target,
        optimizer,
        strategy,
        adaptive,
        replay,
    })
}

/// Costs of every coefficient row relative to the first one.
pub fn replay_costs(rows: &[AeroCoefficients], config: PenaltyConfig) -> Vec<f64> {
    rows.iter().map(|c| penalized_cost(*c, rows[0], config)).collect()
}

fn convergence_table(run: &AdaptiveRun) -> Table {
    let mut t = Table::new(&["evaluations", "iterations", "best_cost", "event"]);
    for r in &run.history.records {
        t.push(vec![r.evaluations.into(), r.iterations.into(), r.best_value.into(), r.event.as_str().into()]);
    }
    t
}

fn with_original_tags(run_mesh: &Mesh, original: &Mesh) -> CliResult<Mesh> {
    Ok(Mesh::new(
        run_mesh.vertices().to_vec(),
        original.triangles().to_vec(),
        original.surface_tag().map(<[bool]>::to_vec),
    )?)
}

pub fn execute(cfg: &OptimizeConfig) -> CliResult<ModeOutput> {
    let mut out = ModeOutput::default();
    out.result("dof", cfg.dofs.len().to_string());
    out.line(format!("dof = {}", cfg.dofs.len()));

    if let Some((path, penalty)) = &cfg.replay {
        let rows: Vec<AeroCoefficients> = read_columns(path, &["lift", "drag"])?
            .iter()
            .map(|r| AeroCoefficients { lift: r[0], drag: r[1] })
            .collect();
        if !(rows[0].lift != 0.0 && rows[0].drag != 0.0) {
            return Err(CliError::Config(format!("{}: baseline lift and drag must be non-zero", path.display())));
        }
        let mut t = Table::new(&["row", "lift", "drag", "cost"]);
        for (i, (c, cost)) in rows.iter().zip(replay_costs(&rows, *penalty)).enumerate() {
            t.push(vec![i.into(), c.lift.into(), c.drag.into(), cost.into()]);
        }
        out.artifacts.add_table("cost_replay.csv", &t);
    }

    let runs: Vec<(&str, AdaptionSchedule)> = match cfg.strategy {
        Strategy::Basic => vec![("basic", AdaptionSchedule::basic())],
        Strategy::Adaptive => vec![("adaptive", cfg.adaptive)],
        Strategy::Both => vec![("basic", AdaptionSchedule::basic()), ("adaptive", cfg.adaptive)],
        Strategy::None => Vec::new(),
    };
    if runs.is_empty() {
        return Ok(out);
    }

    let design_mesh = tagged_or_all(&cfg.geometry.mesh)?;
    let problem = WingFitProblem::new(&design_mesh, cfg.bounds, cfg.dofs.clone(), cfg.target.clone())?;
    let lattice = FfdLattice::zeros(cfg.bounds, cfg.dofs.degrees())?;
    let run = |schedule: AdaptionSchedule| {
        let p = AdaptiveProblem {
            embedded: problem.embedded(),
            lattice: &lattice,
            dofs: &cfg.dofs,
            objective: problem.mesh_objective(),
        };
        run_with_adaption(p, schedule, &cfg.optimizer)
    };
    let results: Vec<AdaptiveRun> = match runs.as_slice() {
        [(_, a), (_, b)] => {
            let (ra, rb) = par::join(|| run(*a), || run(*b));
            vec![ra?, rb?]
        }
        _ => runs.iter().map(|(_, s)| run(*s)).collect::<Result<_, _>>()?,
    };

    let mut summary = Table::new(&["strategy", "final_cost", "evaluations", "iterations", "adaptions", "escaped", "dof"]);
    for ((name, _), r) in runs.iter().zip(&results) {
        summary.push(vec![
            (*name).into(),
            r.best_value.into(),
            r.evaluations.into(),
            r.iterations.into(),
            r.adaptions.into(),
            r.escaped.into(),
            cfg.dofs.len().into(),
        ]);
        out.result(&format!("{name}_final_cost"), format_real(r.best_value));
        out.result(&format!("{name}_evaluations"), r.evaluations.to_string());
        out.result(&format!("{name}_adaptions"), r.adaptions.to_string());
        out.line(format!(
            "{name}: final cost {} after {} evaluations, {} adaptions",
            r.best_value, r.evaluations, r.adaptions
        ));
        out.artifacts.add_table(format!("convergence_{name}.csv"), &convergence_table(r));
        let mesh = with_original_tags(&r.mesh, &cfg.geometry.mesh)?;
        out.artifacts.add(format!("deformed_{name}.obj"), obj_bytes(&mesh));
    }
    out.artifacts.add_table("summary.csv", &summary);
    Ok(out)
}
