//! Nelder-Mead downhill simplex.

use crate::error::{Error, Result};

/// Nelder-Mead coefficients and stopping rules.
#[derive(Debug, Clone, PartialEq)]
pub struct NmConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Offset added to each coordinate of `x0` to build the initial simplex.
    pub initial_step: f64,
    pub max_evaluations: usize,
    /// Stop when every vertex is within this distance (max norm) of the best one.
    pub simplex_size_tol: f64,
    /// Stop when `f_worst - f_best` falls to this value.
    pub value_tol: f64,
}

impl Default for NmConfig {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.1,
            max_evaluations: 10_000,
            simplex_size_tol: 1e-10,
            value_tol: 1e-14,
        }
    }
}

impl NmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if !(self.reflection > 0.0) {
            return bad("reflection must be positive");
        }
        if !(self.expansion > 1.0) {
            return bad("expansion must exceed 1");
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return bad("contraction must lie in (0, 1)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must lie in (0, 1)");
        }
        if !(self.initial_step != 0.0 && self.initial_step.is_finite()) {
            return bad("initial_step must be finite and non-zero");
        }
        if !(self.simplex_size_tol >= 0.0 && self.value_tol >= 0.0) {
            return bad("tolerances must be non-negative");
        }
        Ok(())
    }
}

/// What a history record marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    /// The best value improved (or the first evaluation of a run).
    Step,
    /// The deformation was absorbed into the reference geometry.
    Adaption,
    /// First evaluation of a fresh simplex after an adaption.
    Restart,
}

impl Event {
    pub fn as_str(&self) -> &'static str {
        match self {
            Event::Step => "step",
            Event::Adaption => "adaption",
            Event::Restart => "restart",
        }
    }
}

impl std::fmt::Display for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRecord {
    /// Objective evaluations spent so far, counting this one.
    pub evaluations: usize,
    /// Nelder-Mead iterations completed so far.
    pub iterations: usize,
    pub best_value: f64,
    pub event: Event,
}

/// Convergence history, one record per improvement or adaption event.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunHistory {
    pub records: Vec<HistoryRecord>,
}

impl RunHistory {
    pub fn push(&mut self, evaluations: usize, iterations: usize, best_value: f64, event: Event) {
        self.records.push(HistoryRecord {
            evaluations,
            iterations,
            best_value,
            event,
        });
    }

    pub fn last_best(&self) -> Option<f64> {
        self.records.last().map(|r| r.best_value)
    }

    /// Splits the records into optimization segments, breaking at each restart.
    pub fn segments(&self) -> Vec<&[HistoryRecord]> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, r) in self.records.iter().enumerate() {
            if r.event == Event::Restart && i > start {
                out.push(&self.records[start..i]);
                start = i;
            }
        }
        if start < self.records.len() {
            out.push(&self.records[start..]);
        }
        out
    }

    pub fn adaptions(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.event == Event::Adaption)
            .count()
    }
}

/// Why a minimization stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    SimplexSize,
    ValueSpread,
    MaxEvaluations,
    IterationLimit,
}

impl Termination {
    pub fn converged(&self) -> bool {
        matches!(self, Termination::SimplexSize | Termination::ValueSpread)
    }
}

#[derive(Debug, Clone)]
pub struct NmOutcome {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub termination: Termination,
    pub history: RunHistory,
}

/// Limits and bookkeeping offsets for one optimization segment.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SegmentLimits {
    pub max_iterations: Option<usize>,
    /// Evaluations already spent by earlier segments of the same run.
    pub evaluation_offset: usize,
    pub iteration_offset: usize,
    pub first_event: Event,
}

/// Minimizes `objective` from `x0` with the classic reflect/expand/contract/shrink loop.
///
/// Non-finite objective values are treated as `+inf`. Ties between vertices
/// are broken by insertion order, so runs are deterministic.
pub fn nelder_mead<F>(objective: F, x0: &[f64], config: &NmConfig) -> Result<NmOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    minimize_segment(
        objective,
        x0,
        config,
        SegmentLimits {
            max_iterations: None,
            evaluation_offset: 0,
            iteration_offset: 0,
            first_event: Event::Step,
        },
    )
}

struct Vertex {
    point: Vec<f64>,
    value: f64,
    id: usize,
}

struct Counter<F> {
    objective: F,
    evaluations: usize,
    budget: usize,
    next_id: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn eval(&mut self, x: Vec<f64>) -> Option<Vertex> {
        if self.evaluations >= self.budget {
            return None;
        }
        self.evaluations += 1;
        let v = (self.objective)(&x);
        let value = if v.is_nan() { f64::INFINITY } else { v };
        let id = self.next_id;
        self.next_id += 1;
        Some(Vertex {
            point: x,
            value,
            id,
        })
    }
}

pub(crate) fn minimize_segment<F>(
    objective: F,
    x0: &[f64],
    config: &NmConfig,
    limits: SegmentLimits,
) -> Result<NmOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let dim = x0.len();
    if dim == 0 {
        return Err(Error::InvalidConfig("dimension must be at least 1".into()));
    }
    let mut counter = Counter {
        objective,
        evaluations: 0,
        budget: config.max_evaluations.saturating_sub(limits.evaluation_offset),
        next_id: 0,
    };
    let mut history = RunHistory::default();
    let iteration_offset = limits.iteration_offset;
    let offset = limits.evaluation_offset;

    let Some(start) = counter.eval(x0.to_vec()) else {
        return Ok(NmOutcome {
            best_point: x0.to_vec(),
            best_value: f64::INFINITY,
            evaluations: 0,
            iterations: 0,
            termination: Termination::MaxEvaluations,
            history,
        });
    };
    if !start.value.is_finite() {
        return Err(Error::NonFiniteStart);
    }
    history.push(offset + 1, iteration_offset, start.value, limits.first_event);
    let mut best_value = start.value;
    let mut simplex = vec![start];

    let record = |history: &mut RunHistory, best: &mut f64, v: &Vertex, evals: usize, iters: usize| {
        if v.value < *best {
            *best = v.value;
            history.push(offset + evals, iteration_offset + iters, v.value, Event::Step);
        }
    };

    let mut iterations = 0usize;
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += config.initial_step;
        match counter.eval(p) {
            Some(v) => {
                record(&mut history, &mut best_value, &v, counter.evaluations, 0);
                simplex.push(v);
            }
            None => return Ok(finish(simplex, &counter, 0, Termination::MaxEvaluations, history)),
        }
    }

    let termination = loop {
        sort(&mut simplex);
        let spread = simplex[dim].value - simplex[0].value;
        if spread <= config.value_tol {
            break Termination::ValueSpread;
        }
        let size = simplex[1..]
            .iter()
            .map(|v| max_norm_dist(&v.point, &simplex[0].point))
            .fold(0.0, f64::max);
        if size < config.simplex_size_tol {
            break Termination::SimplexSize;
        }
        if limits.max_iterations.is_some_and(|m| iterations >= m) {
            break Termination::IterationLimit;
        }
        if counter.evaluations >= counter.budget {
            break Termination::MaxEvaluations;
        }

        let centroid = centroid(&simplex[..dim]);
        let worst = &simplex[dim];
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.point)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let (f_best, f_second, f_worst) = (simplex[0].value, simplex[dim - 1].value, worst.value);

        let Some(reflected) = counter.eval(along(config.reflection)) else {
            break Termination::MaxEvaluations;
        };
        iterations += 1;
        record(&mut history, &mut best_value, &reflected, counter.evaluations, iterations);

        let mut shrink = false;
        if reflected.value < f_best {
            let expanded_point = along(config.reflection * config.expansion);
            match counter.eval(expanded_point) {
                Some(expanded) => {
                    record(&mut history, &mut best_value, &expanded, counter.evaluations, iterations);
                    simplex[dim] = if expanded.value < reflected.value {
                        expanded
                    } else {
                        reflected
                    };
                }
                None => {
                    simplex[dim] = reflected;
                    break Termination::MaxEvaluations;
                }
            }
        } else if reflected.value < f_second {
            simplex[dim] = reflected;
        } else {
            let outside = reflected.value < f_worst;
            let coef = if outside {
                config.reflection * config.contraction
            } else {
                -config.contraction
            };
            let Some(contracted) = counter.eval(along(coef)) else {
                if outside {
                    simplex[dim] = reflected;
                }
                break Termination::MaxEvaluations;
            };
            record(&mut history, &mut best_value, &contracted, counter.evaluations, iterations);
            let accept = if outside {
                contracted.value <= reflected.value
            } else {
                contracted.value < f_worst
            };
            if accept {
                simplex[dim] = contracted;
            } else {
                shrink = true;
            }
        }

        if shrink {
            let best_point = simplex[0].point.clone();
            let mut exhausted = false;
            for k in 1..=dim {
                let p: Vec<f64> = best_point
                    .iter()
                    .zip(&simplex[k].point)
                    .map(|(b, x)| b + config.shrink * (x - b))
                    .collect();
                match counter.eval(p) {
                    Some(v) => {
                        record(&mut history, &mut best_value, &v, counter.evaluations, iterations);
                        simplex[k] = v;
                    }
                    None => {
                        exhausted = true;
                        break;
                    }
                }
            }
            if exhausted {
                break Termination::MaxEvaluations;
            }
        }
    };
    Ok(finish(simplex, &counter, iterations, termination, history))
}

fn finish<F>(
    mut simplex: Vec<Vertex>,
    counter: &Counter<F>,
    iterations: usize,
    termination: Termination,
    history: RunHistory,
) -> NmOutcome {
    sort(&mut simplex);
    let best = simplex.swap_remove(0);
    NmOutcome {
        best_point: best.point,
        best_value: best.value,
        evaluations: counter.evaluations,
        iterations,
        termination,
        history,
    }
}

fn sort(simplex: &mut [Vertex]) {
    simplex.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.id.cmp(&b.id)));
}

fn centroid(vertices: &[Vertex]) -> Vec<f64> {
    let dim = vertices[0].point.len();
    let mut c = vec![0.0; dim];
    for v in vertices {
        for (ci, xi) in c.iter_mut().zip(&v.point) {
            *ci += xi;
        }
    }
    let n = vertices.len() as f64;
    c.iter_mut().for_each(|ci| *ci /= n);
    c
}

fn max_norm_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
