use super::nelder_mead::{minimize_segment, Event, NmConfig, RunHistory, SegmentLimits};
use crate::error::{Error, Result};
use crate::ffd::{apply_deformation, rebaseline, DofMap, EmbeddedMesh, FfdLattice, Mesh};

/// When to re-baseline the lattice during an optimization run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaptionSchedule {
    /// Nelder-Mead iterations per segment before an adaption.
    pub period: usize,
    /// Upper bound on the number of optimization segments.
    pub max_cycles: usize,
}

impl AdaptionSchedule {
    /// One segment run to convergence or budget, never re-baselined.
    pub fn basic() -> Self {
        Self {
            period: usize::MAX,
            max_cycles: 1,
        }
    }

    pub fn every(period: usize) -> Self {
        Self {
            period,
            max_cycles: usize::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.period == 0 {
            return Err(Error::InvalidConfig("adaption period must be at least 1".into()));
        }
        if self.max_cycles == 0 {
            return Err(Error::InvalidConfig("max_cycles must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for AdaptionSchedule {
    fn default() -> Self {
        Self::every(100)
    }
}

/// An FFD optimization problem: embedded mesh, lattice template, DOF map and a
/// pure objective over deformed meshes.
pub struct AdaptiveProblem<'a, O> {
    pub embedded: &'a EmbeddedMesh,
    /// Bounds and degrees of the lattice; its displacements are ignored.
    pub lattice: &'a FfdLattice,
    pub dofs: &'a DofMap,
    pub objective: O,
}

#[derive(Debug, Clone)]
pub struct AdaptiveRun {
    pub history: RunHistory,
    /// Best mesh of the final segment.
    pub mesh: Mesh,
    pub best_value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub adaptions: usize,
    /// Vertices that left the lattice across all adaptions.
    pub escaped: usize,
    /// Embedding the final segment worked on.
    pub embedded: EmbeddedMesh,
    /// Best design vector of the final segment.
    pub design: Vec<f64>,
}

/// Optimizes the design vector, re-baselining the lattice every `period`
/// iterations and restarting from the zero design with a fresh simplex.
///
/// Stops at `max_cycles`, when the evaluation budget is spent, or when a
/// segment converges without improving on its starting value.
pub fn run_with_adaption<O>(
    problem: AdaptiveProblem<'_, O>,
    schedule: AdaptionSchedule,
    config: &NmConfig,
) -> Result<AdaptiveRun>
where
    O: Fn(&Mesh) -> f64,
{
    schedule.validate()?;
    config.validate()?;
    if problem.lattice.bounds() != problem.embedded.bounds() {
        return Err(Error::BoundsMismatch);
    }
    if problem.lattice.degrees() != problem.dofs.degrees() {
        return Err(Error::DimensionMismatch("lattice degrees differ from the DOF map".into()));
    }
    let bounds = *problem.lattice.bounds();
    let dofs = problem.dofs;
    let objective = &problem.objective;
    let mut embedded = problem.embedded.clone();
    let mut history = RunHistory::default();
    let (mut evaluations, mut iterations) = (0usize, 0usize);
    let (mut adaptions, mut escaped) = (0usize, 0usize);
    let zero = vec![0.0; dofs.len()];
    let mut cycle = 0usize;
    loop {
        let segment_objective = |x: &[f64]| -> f64 {
            match dofs.decode(x, bounds).and_then(|l| apply_deformation(&embedded, &l)) {
                Ok(mesh) => objective(&mesh),
                Err(_) => f64::INFINITY,
            }
        };
        let limits = SegmentLimits {
            max_iterations: (schedule.period != usize::MAX).then_some(schedule.period),
            evaluation_offset: evaluations,
            iteration_offset: iterations,
            first_event: if cycle == 0 { Event::Step } else { Event::Restart },
        };
        let out = minimize_segment(segment_objective, &zero, config, limits)?;
        let start_value = out.history.records.first().map(|r| r.best_value);
        history.records.extend(out.history.records.iter().copied());
        evaluations += out.evaluations;
        iterations += out.iterations;
        cycle += 1;

        let lattice = dofs.decode(&out.best_point, bounds)?;
        let stalled = out.termination.converged() && start_value.is_some_and(|s| !(out.best_value < s));
        let done = out.evaluations == 0
            || cycle >= schedule.max_cycles
            || evaluations >= config.max_evaluations
            || stalled;
        if done {
            let (mesh, best_value, design) = if out.evaluations == 0 {
                (embedded.reference().clone(), history.last_best().unwrap_or(f64::INFINITY), zero.clone())
            } else {
                (apply_deformation(&embedded, &lattice)?, out.best_value, out.best_point)
            };
            return Ok(AdaptiveRun {
                history,
                mesh,
                best_value,
                evaluations,
                iterations,
                adaptions,
                escaped,
                embedded,
                design,
            });
        }

        history.push(evaluations, iterations, out.best_value, Event::Adaption);
        let next = rebaseline(&embedded, &lattice)?;
        embedded = next.embedded;
        escaped += next.escaped;
        adaptions += 1;
    }
}
