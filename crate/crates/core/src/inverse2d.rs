//! Parametric shape-inverse analysis for 2D Bezier curves.
//!
//! For a support `X` of degree `n` the least-squares reconstruction of a target
//! `y(x)` reduces to the symmetric system `A(X) Y = b(X)` with
//!
//! ```text
//! A_ij = ∫ B_n^i(t) B_n^j(t) x'(t) dt,   b_i = ∫ B_n^i(t) ȳ(x(t)) x'(t) dt,
//! x'(t) = n B_{n-1}(t)ᵀ ΔX.
//! ```
//!
//! The matrix becomes badly conditioned as `n` grows. This module measures that
//! (spectrum, condition number), stabilizes the solve with Tikhonov filtering, and
//! implements the support-adaption loop that lowers the total variation of the
//! design vector while keeping the fitted shape.

use crate::bernstein::{self, check_admissible, dot, uniform_support, BernsteinBasis, BezierCurve2D};
use crate::error::{Error, Result};
use crate::linalg::{self, norm, Matrix};
use crate::optimizer::{nelder_mead, NmConfig};
use crate::quadrature::GaussLegendre;

/// Minimum gap between consecutive abscissas produced by the support search.
pub const MIN_SUPPORT_GAP: f64 = 1e-4;

/// Number of quadrature nodes for integrands that are not polynomial in `t`.
const SMOOTH_RULE_EXTRA_NODES: usize = 64;

fn degree_of(support: &[f64]) -> Result<u32> {
    check_admissible(support)?;
    Ok((support.len() - 1) as u32)
}

/// `x'(t)` for the given support, evaluated with the degree `n - 1` basis.
fn abscissa_derivative(support: &[f64], lower: &BernsteinBasis, buf: &mut [f64], t: f64) -> Result<f64> {
    let n = support.len() - 1;
    lower.eval_into(t, buf)?;
    Ok(n as f64
        * buf
            .iter()
            .zip(support.windows(2))
            .map(|(b, w)| b * (w[1] - w[0]))
            .sum::<f64>())
}

/// Quadrature-assembled matrix `A(X)`.
///
/// The integrand has degree `3n - 1`; the rule has `⌈3n/2⌉` nodes and is exact.
pub fn gram_matrix(support: &[f64]) -> Result<Matrix> {
    let n = degree_of(support)?;
    let basis = BernsteinBasis::new(n)?;
    let lower = BernsteinBasis::new(n - 1)?;
    let rule = GaussLegendre::exact_for_degree(3 * n as usize - 1);
    let size = n as usize + 1;
    let mut a = Matrix::zeros(size, size);
    let mut b = vec![0.0; size];
    let mut lb = vec![0.0; n as usize];
    for (t, w) in rule.iter() {
        basis.eval_into(t, &mut b)?;
        let weight = w * abscissa_derivative(support, &lower, &mut lb, t)?;
        for i in 0..size {
            for j in 0..=i {
                a[(i, j)] += weight * b[i] * b[j];
            }
        }
    }
    for i in 0..size {
        for j in 0..i {
            a[(j, i)] = a[(i, j)];
        }
    }
    Ok(a)
}

/// Closed form of `A` for the uniform support: `C(n,i) C(n,j) / ((2n+1) C(2n,i+j))`.
///
/// Needs binomials of degree `2n`, so `n` is limited to half the basis maximum.
pub fn uniform_gram(n: u32) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InadmissibleSupport("degree must be at least 1".into()));
    }
    if 2 * n > bernstein::MAX_DEGREE {
        return Err(Error::DegreeTooLarge(2 * n));
    }
    let size = n as usize + 1;
    let mut a = Matrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            let num = bernstein::binomial(n, i as i64)? as f64 * bernstein::binomial(n, j as i64)? as f64;
            let den = (2 * n + 1) as f64 * bernstein::binomial(2 * n, (i + j) as i64)? as f64;
            a[(i, j)] = num / den;
        }
    }
    Ok(a)
}

/// A tabulated curve `y(x)` read by piecewise-linear interpolation in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledCurve {
    /// Abscissas must be strictly increasing and cover `[0, 1]`.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidTarget(format!(
                "need at least two samples with matching lengths (got {} x, {} y)",
                xs.len(),
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTarget("sample abscissas not strictly increasing".into()));
        }
        if xs[0] > 0.0 || xs[xs.len() - 1] < 1.0 {
            return Err(Error::InvalidTarget(format!(
                "samples cover [{}, {}] instead of [0, 1]",
                xs[0],
                xs[xs.len() - 1]
            )));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidTarget("non-finite ordinate".into()));
        }
        Ok(Self { xs, ys })
    }

    /// Samples `f` at `count` uniformly spaced abscissas on `[0, 1]`.
    pub fn from_fn<F: Fn(f64) -> f64>(count: usize, f: F) -> Result<Self> {
        let count = count.max(2);
        let xs: Vec<f64> = (0..count).map(|s| s as f64 / (count - 1) as f64).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, ys)
    }

    /// Samples a Bezier curve at `count` uniform parameter values.
    pub fn from_bezier(curve: &BezierCurve2D, count: usize) -> Result<Self> {
        let count = count.max(2);
        let basis = BernsteinBasis::new(curve.degree())?;
        let mut buf = vec![0.0; basis.len()];
        let mut xs = Vec::with_capacity(count);
        let mut ys = Vec::with_capacity(count);
        for s in 0..count {
            basis.eval_into(s as f64 / (count - 1) as f64, &mut buf)?;
            xs.push(dot(&buf, curve.support()));
            ys.push(dot(&buf, curve.design()));
        }
        Self::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.xs.partition_point(|&v| v < x);
        if k < self.xs.len() && self.xs[k] == x {
            return self.ys[k];
        }
        let k = k.clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.ys[k - 1], self.ys[k]);
        let s = (x - x0) / (x1 - x0);
        y0 + s * (y1 - y0)
    }
}

/// The shape the inverse problem reconstructs.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetShape2D {
    Bezier(BezierCurve2D),
    Samples(SampledCurve),
}

impl TargetShape2D {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            TargetShape2D::Bezier(c) => c.y_at(x),
            TargetShape2D::Samples(s) => Ok(s.eval(x)),
        }
    }

    /// When the target is a Bezier curve over exactly this support, returns its design.
    fn design_on(&self, support: &[f64]) -> Option<&[f64]> {
        match self {
            TargetShape2D::Bezier(c) if c.support() == support => Some(c.design()),
            _ => None,
        }
    }
}

/// Load vector `b(X)`.
///
/// Exact when the target is a Bezier curve on the same support; otherwise the
/// target is read through [`TargetShape2D::eval`] with a higher-order rule.
pub fn load_vector(support: &[f64], target: &TargetShape2D) -> Result<Vec<f64>> {
    let n = degree_of(support)?;
    let basis = BernsteinBasis::new(n)?;
    let lower = BernsteinBasis::new(n - 1)?;
    let size = n as usize + 1;
    let same = target.design_on(support);
    let rule = match same {
        Some(_) => GaussLegendre::exact_for_degree(3 * n as usize - 1),
        None => GaussLegendre::new(SMOOTH_RULE_EXTRA_NODES + 2 * n as usize),
    };
    let mut out = vec![0.0; size];
    let mut b = vec![0.0; size];
    let mut lb = vec![0.0; n as usize];
    for (t, w) in rule.iter() {
        basis.eval_into(t, &mut b)?;
        let y = match same {
            Some(design) => dot(&b, design),
            None => target.eval(dot(&b, support).clamp(0.0, 1.0))?,
        };
        let weight = w * abscissa_derivative(support, &lower, &mut lb, t)? * y;
        for (o, bi) in out.iter_mut().zip(&b) {
            *o += weight * bi;
        }
    }
    Ok(out)
}

/// The assembled system `A(X) Y = b(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    pub matrix: Matrix,
    pub load: Vec<f64>,
    pub degree: u32,
    pub support: Vec<f64>,
}

impl GramSystem {
    pub fn assemble(support: &[f64], target: &TargetShape2D) -> Result<Self> {
        let degree = degree_of(support)?;
        Ok(Self {
            matrix: gram_matrix(support)?,
            load: load_vector(support, target)?,
            degree,
            support: support.to_vec(),
        })
    }

    pub fn residual_norm(&self, design: &[f64]) -> f64 {
        let ay = self.matrix.mul_vec(design);
        norm(&ay.iter().zip(&self.load).map(|(a, b)| a - b).collect::<Vec<_>>())
    }
}

/// Direct symmetric (Cholesky) solve of `A Y = b`.
pub fn solve_exact(system: &GramSystem) -> Result<Vec<f64>> {
    linalg::cholesky_solve(&system.matrix, &system.load)
}

/// Singular values in descending order (absolute eigenvalues for symmetric input).
pub fn singular_values(matrix: &Matrix) -> Result<Vec<f64>> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let mut s: Vec<f64> = linalg::symmetric_eigen(matrix)?
        .values
        .into_iter()
        .map(f64::abs)
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// `σ_max / σ_min`; [`Error::Singular`] when `σ_min` is zero relative to `σ_max`.
pub fn condition_number(matrix: &Matrix) -> Result<f64> {
    let s = singular_values(matrix)?;
    let (max, min) = (s[0], s[s.len() - 1]);
    if !(min > f64::EPSILON * max) {
        return Err(Error::Singular);
    }
    Ok(max / min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TikhonovConfig {
    pub rho: f64,
}

impl TikhonovConfig {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::InvalidConfig(format!("rho must be finite and >= 0, got {rho}")));
        }
        Ok(Self { rho })
    }
}

/// Minimizer of `|A Y - b|² + ρ |Y|²`.
///
/// Solved in the eigenbasis of the symmetric matrix, `Y = V diag(λ / (λ² + ρ)) Vᵀ b`,
/// which is the solution of `(AᵀA + ρI) Y = Aᵀb` without forming `AᵀA`.
pub fn tikhonov_solve(system: &GramSystem, config: TikhonovConfig) -> Result<Vec<f64>> {
    let TikhonovConfig { rho } = TikhonovConfig::new(config.rho)?;
    let eig = linalg::symmetric_eigen(&system.matrix)?;
    let n = system.load.len();
    if rho == 0.0 {
        let max = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if let Some((row, &pivot)) = eig
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() > linalg::PIVOT_TOLERANCE * max))
        {
            return Err(Error::IllConditioned { row, pivot });
        }
    }
    let coeffs = eig.vectors.transpose_mul_vec(&system.load);
    let filtered: Vec<f64> = coeffs
        .iter()
        .zip(&eig.values)
        .map(|(c, &l)| c * l / (l * l + rho))
        .collect();
    let mut y = vec![0.0; n];
    for (k, fk) in filtered.iter().enumerate() {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += eig.vectors[(i, k)] * fk;
        }
    }
    Ok(y)
}

/// `Σ |y_{k+1} - y_k|`.
pub fn total_variation(design: &[f64]) -> f64 {
    design.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Samples per control point used for the dense representation of a curve.
pub const SAMPLES_PER_CONTROL_POINT: usize = 50;

/// A least-squares refit of a shape over a given support.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFit {
    pub curve: BezierCurve2D,
    /// Root-mean-square ordinate error over the sample grid.
    pub residual: f64,
}

/// Refits `shape` over `support`: minimizes `Σ_s [B_n(t_s)ᵀY - y⁰(x(t_s))]²`
/// on `50 (n + 1)` uniform parameter samples.
pub fn fit_over_support(shape: &SampledCurve, support: &[f64]) -> Result<SupportFit> {
    let n = degree_of(support)?;
    fit_with_samples(shape, support, SAMPLES_PER_CONTROL_POINT * (n as usize + 1))
}

fn fit_with_samples(shape: &SampledCurve, support: &[f64], samples: usize) -> Result<SupportFit> {
    let n = degree_of(support)?;
    let size = n as usize + 1;
    if samples < 10 * size {
        return Err(Error::InvalidConfig(format!(
            "{samples} samples is fewer than 10 per control point"
        )));
    }
    let basis = BernsteinBasis::new(n)?;
    let mut m = Matrix::zeros(samples, size);
    let mut obs = vec![0.0; samples];
    let mut buf = vec![0.0; size];
    for s in 0..samples {
        basis.eval_into(s as f64 / (samples - 1) as f64, &mut buf)?;
        for (j, bj) in buf.iter().enumerate() {
            m[(s, j)] = *bj;
        }
        obs[s] = shape.eval(dot(&buf, support));
    }
    let design = linalg::least_squares(&m, &obs)?;
    let fitted = m.mul_vec(&design);
    let sq: f64 = fitted.iter().zip(&obs).map(|(f, o)| (f - o) * (f - o)).sum();
    Ok(SupportFit {
        curve: BezierCurve2D::new(support.to_vec(), design)?,
        residual: (sq / samples as f64).sqrt(),
    })
}

/// How the fit constraint of the support search is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitTolerance {
    /// `max(factor * r0, floor * scale)` where `r0` is the refit residual over the
    /// starting support and `scale` the largest `|y|` of the shape (1 if the shape is flat).
    Relative { factor: f64, floor: f64 },
    /// A fixed RMS tolerance.
    Absolute(f64),
}

impl Default for FitTolerance {
    fn default() -> Self {
        FitTolerance::Relative {
            factor: 1.05,
            floor: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptConfig {
    pub fit_tolerance: FitTolerance,
    /// Penalty added when a candidate violates the fit tolerance.
    pub penalty: f64,
    pub optimizer: NmConfig,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            fit_tolerance: FitTolerance::default(),
            penalty: 1e6,
            optimizer: NmConfig {
                initial_step: 0.5,
                max_evaluations: 3000,
                simplex_size_tol: 1e-8,
                value_tol: 1e-12,
                ..NmConfig::default()
            },
        }
    }
}

/// Result of one support adaption.
#[derive(Debug, Clone, PartialEq)]
pub struct Adaption {
    pub curve: BezierCurve2D,
    pub residual: f64,
    pub tolerance: f64,
    pub tv_before: f64,
    pub tv_after: f64,
    pub evaluations: usize,
}

/// Maps unconstrained reals to a strictly increasing support on `[0, 1]` with
/// gaps of at least [`MIN_SUPPORT_GAP`]: `gap_k = g + (1 - n g) softmax(z)_k`.
pub fn support_from_params(z: &[f64]) -> Vec<f64> {
    let n = z.len();
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - zmax).exp()).collect();
    let total: f64 = e.iter().sum();
    let free = 1.0 - n as f64 * MIN_SUPPORT_GAP;
    let mut x = Vec::with_capacity(n + 1);
    x.push(0.0);
    let mut acc = 0.0;
    for ek in &e[..n - 1] {
        acc += MIN_SUPPORT_GAP + free * ek / total;
        x.push(acc);
    }
    x.push(1.0);
    x
}

/// Inverse of [`support_from_params`] up to the softmax shift; gaps below the
/// minimum are lifted slightly.
pub fn params_from_support(support: &[f64]) -> Vec<f64> {
    let n = support.len() - 1;
    let free = 1.0 - n as f64 * MIN_SUPPORT_GAP;
    support
        .windows(2)
        .map(|w| (((w[1] - w[0]) - MIN_SUPPORT_GAP).max(1e-3 * MIN_SUPPORT_GAP) / free).ln())
        .collect()
}

/// Replaces the support of `current` by one whose refit design has minimal total
/// variation while still approximating the current shape.
///
/// The starting support is always a candidate, so the total variation never increases.
pub fn adapt_support(current: &BezierCurve2D, config: &AdaptConfig) -> Result<Adaption> {
    let n = current.degree() as usize;
    let shape = SampledCurve::from_bezier(current, SAMPLES_PER_CONTROL_POINT * (n + 1))?;
    let start = fit_over_support(&shape, current.support())?;
    let tv_before = total_variation(current.design());
    let tolerance = match config.fit_tolerance {
        FitTolerance::Absolute(t) => t,
        FitTolerance::Relative { factor, floor } => {
            let scale = shape.ys().iter().fold(0.0_f64, |m, y| m.max(y.abs()));
            let scale = if scale > 0.0 { scale } else { 1.0 };
            (factor * start.residual).max(floor * scale)
        }
    };

    // incumbent: the current curve itself
    let mut best = Adaption {
        curve: current.clone(),
        residual: start.residual,
        tolerance,
        tv_before,
        tv_after: tv_before,
        evaluations: 1,
    };
    if start.residual <= tolerance && total_variation(start.curve.design()) < best.tv_after {
        best.tv_after = total_variation(start.curve.design());
        best.curve = start.curve.clone();
    }
    if n < 2 {
        // the only admissible linear support is (0, 1)
        return Ok(best);
    }

    let score = |z: &[f64]| -> f64 {
        let support = support_from_params(z);
        match fit_over_support(&shape, &support) {
            Ok(fit) => {
                let tv = total_variation(fit.curve.design());
                if fit.residual <= tolerance {
                    tv
                } else {
                    tv + config.penalty
                }
            }
            Err(_) => f64::INFINITY,
        }
    };
    let z0 = params_from_support(current.support());
    let outcome = nelder_mead(score, &z0, &config.optimizer)?;
    best.evaluations += outcome.evaluations;
    if outcome.best_value < best.tv_after {
        let support = support_from_params(&outcome.best_point);
        let fit = fit_over_support(&shape, &support)?;
        let tv = total_variation(fit.curve.design());
        if fit.residual <= tolerance && tv < best.tv_after {
            best.curve = fit.curve;
            best.residual = fit.residual;
            best.tv_after = tv;
        }
    }
    Ok(best)
}

/// How phase one solves for the design at fixed support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InverseSolver {
    Exact,
    Tikhonov(TikhonovConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructConfig {
    pub degree: u32,
    pub cycles: usize,
    pub solver: InverseSolver,
    pub adapt: AdaptConfig,
}

impl ReconstructConfig {
    pub fn new(degree: u32, cycles: usize) -> Self {
        Self {
            degree,
            cycles,
            solver: InverseSolver::Exact,
            adapt: AdaptConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Optimize,
    Regularize,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Optimize => "optimize",
            Phase::Regularize => "regularize",
        }
    }
}

/// State after one phase of one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionRecord {
    pub cycle: usize,
    pub phase: Phase,
    pub curve: BezierCurve2D,
    /// `L2` distance to the target, `sqrt(∫ (y(x) - ȳ(x))² dx)`.
    pub fit_error: f64,
    pub tv: f64,
    /// Refit residual against the previous shape; `None` outside the regularize
    /// phase and when the previous curve was kept.
    pub refit_residual: Option<f64>,
    pub refit_tolerance: Option<f64>,
}

/// `sqrt(∫₀¹ (y(x) - ȳ(x))² dx)` computed in the curve parameter.
pub fn l2_fit_error(curve: &BezierCurve2D, target: &TargetShape2D) -> Result<f64> {
    let n = curve.degree();
    let basis = BernsteinBasis::new(n)?;
    let lower = BernsteinBasis::new(n - 1)?;
    let same = target.design_on(curve.support());
    let rule = match same {
        Some(_) => GaussLegendre::exact_for_degree(3 * n as usize - 1),
        None => GaussLegendre::new(SMOOTH_RULE_EXTRA_NODES + 2 * n as usize),
    };
    let mut b = vec![0.0; basis.len()];
    let mut lb = vec![0.0; n as usize];
    let mut total = 0.0;
    for (t, w) in rule.iter() {
        basis.eval_into(t, &mut b)?;
        let y = dot(&b, curve.design());
        let ybar = match same {
            Some(design) => dot(&b, design),
            None => target.eval(dot(&b, curve.support()).clamp(0.0, 1.0))?,
        };
        total += w * abscissa_derivative(curve.support(), &lower, &mut lb, t)? * (y - ybar).powi(2);
    }
    Ok(total.max(0.0).sqrt())
}

fn solve_phase(support: &[f64], target: &TargetShape2D, solver: InverseSolver) -> Result<BezierCurve2D> {
    let system = GramSystem::assemble(support, target)?;
    let design = match solver {
        InverseSolver::Exact => solve_exact(&system)?,
        InverseSolver::Tikhonov(cfg) => tikhonov_solve(&system, cfg)?,
    };
    BezierCurve2D::new(support.to_vec(), design)
}

/// Alternates the design solve at fixed support with support adaption.
///
/// A cycle whose regularized design has larger total variation than the best one
/// so far keeps the previous support and design, so the regularize-phase total
/// variation never increases across cycles.
pub fn two_phase_reconstruct(
    target: &TargetShape2D,
    config: &ReconstructConfig,
) -> Result<Vec<ReconstructionRecord>> {
    if config.cycles == 0 {
        return Err(Error::InvalidConfig("cycles must be at least 1".into()));
    }
    if config.degree == 0 {
        return Err(Error::InvalidConfig("degree must be at least 1".into()));
    }
    let mut support = uniform_support(config.degree);
    let mut incumbent: Option<(BezierCurve2D, f64)> = None;
    let mut out = Vec::with_capacity(2 * config.cycles);
    for cycle in 1..=config.cycles {
        let optimized = solve_phase(&support, target, config.solver)?;
        out.push(ReconstructionRecord {
            cycle,
            phase: Phase::Optimize,
            fit_error: l2_fit_error(&optimized, target)?,
            tv: total_variation(optimized.design()),
            curve: optimized.clone(),
            refit_residual: None,
            refit_tolerance: None,
        });
        let adapted = adapt_support(&optimized, &config.adapt)?;
        let (curve, tv, residual) = match &incumbent {
            Some((prev, prev_tv)) if *prev_tv < adapted.tv_after => (prev.clone(), *prev_tv, None),
            _ => (adapted.curve.clone(), adapted.tv_after, Some(adapted.residual)),
        };
        out.push(ReconstructionRecord {
            cycle,
            phase: Phase::Regularize,
            fit_error: l2_fit_error(&curve, target)?,
            tv,
            curve: curve.clone(),
            refit_residual: residual,
            refit_tolerance: Some(adapted.tolerance),
        });
        support = curve.support().to_vec();
        incumbent = Some((curve, tv));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn uniform_gram_hand_values() {
        let a = uniform_gram(1).unwrap();
        assert_close(a[(0, 0)], 1.0 / 3.0, 1e-16);
        assert_close(a[(0, 1)], 1.0 / 6.0, 1e-16);
        assert_close(a[(1, 1)], 1.0 / 3.0, 1e-16);
        let a = uniform_gram(2).unwrap();
        assert_close(a[(0, 0)], 1.0 / 5.0, 1e-16);
        assert_close(a[(1, 1)], 2.0 / 15.0, 1e-16);
    }

    #[test]
    fn gram_matrix_matches_closed_form_on_uniform_support() {
        for n in 1..=10 {
            let a = gram_matrix(&uniform_support(n)).unwrap();
            assert!(a.max_abs_diff(&uniform_gram(n).unwrap()) <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn gram_matrix_rejects_inadmissible_support() {
        assert!(gram_matrix(&[0.0, 0.7, 0.3, 1.0]).is_err());
        assert!(gram_matrix(&[0.0, 0.5, 0.9]).is_err());
    }

    #[test]
    fn load_vector_cases() {
        let x = uniform_support(1);
        let ones = TargetShape2D::Samples(SampledCurve::from_fn(11, |_| 1.0).unwrap());
        let b = load_vector(&x, &ones).unwrap();
        assert_close(b[0], 0.5, 1e-14);
        assert_close(b[1], 0.5, 1e-14);

        let zero = TargetShape2D::Samples(SampledCurve::from_fn(11, |_| 0.0).unwrap());
        assert!(load_vector(&uniform_support(5), &zero).unwrap().iter().all(|&v| v == 0.0));

        let ybar = vec![0.1, -0.4, 0.9, 0.2, 0.0];
        let target = TargetShape2D::Bezier(BezierCurve2D::with_uniform_support(ybar.clone()).unwrap());
        let b = load_vector(&uniform_support(4), &target).unwrap();
        let ab = uniform_gram(4).unwrap().mul_vec(&ybar);
        for (u, v) in b.iter().zip(&ab) {
            assert_close(*u, *v, 1e-15);
        }
    }

    #[test]
    fn sampled_target_must_cover_unit_interval() {
        assert!(SampledCurve::new(vec![0.1, 0.5, 1.0], vec![0.0; 3]).is_err());
        assert!(SampledCurve::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.0; 4]).is_err());
    }

    #[test]
    fn exact_solve_cases() {
        let system = GramSystem {
            matrix: uniform_gram(1).unwrap(),
            load: vec![0.5, 0.5],
            degree: 1,
            support: uniform_support(1),
        };
        let y = solve_exact(&system).unwrap();
        assert_close(y[0], 1.0, 1e-14);
        assert_close(y[1], 1.0, 1e-14);
        let homogeneous = GramSystem {
            load: vec![0.0; 2],
            ..system
        };
        assert_eq!(solve_exact(&homogeneous).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn spectrum_and_condition_number() {
        let s = singular_values(&uniform_gram(1).unwrap()).unwrap();
        assert_close(s[0], 0.5, 1e-15);
        assert_close(s[1], 1.0 / 6.0, 1e-15);
        assert_eq!(condition_number(&uniform_gram(1).unwrap()).unwrap(), 3.0);
        assert_eq!(singular_values(&Matrix::identity(4)).unwrap(), vec![1.0; 4]);
        assert_eq!(condition_number(&Matrix::identity(3)).unwrap(), 1.0);
        assert!(singular_values(&Matrix::zeros(2, 3)).is_err());
        assert_eq!(condition_number(&Matrix::zeros(2, 2)), Err(Error::Singular));
    }

    #[test]
    fn tikhonov_limits() {
        let ybar = vec![0.3, -0.2, 0.5, 0.1];
        let target = TargetShape2D::Bezier(BezierCurve2D::with_uniform_support(ybar).unwrap());
        let system = GramSystem::assemble(&uniform_support(3), &target).unwrap();
        let exact = solve_exact(&system).unwrap();
        let y0 = tikhonov_solve(&system, TikhonovConfig::new(0.0).unwrap()).unwrap();
        for (a, b) in exact.iter().zip(&y0) {
            assert_close(*a, *b, 1e-8);
        }
        let big = tikhonov_solve(&system, TikhonovConfig::new(1e12).unwrap()).unwrap();
        let atb = system.matrix.transpose_mul_vec(&system.load);
        assert!(norm(&big) <= 1e-6 * norm(&atb));
        assert!(TikhonovConfig::new(-1.0).is_err());
    }

    #[test]
    fn tikhonov_without_regularization_rejects_singular_matrix() {
        let system = GramSystem {
            matrix: Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap(),
            load: vec![1.0, 1.0],
            degree: 1,
            support: uniform_support(1),
        };
        assert!(matches!(
            tikhonov_solve(&system, TikhonovConfig { rho: 0.0 }),
            Err(Error::IllConditioned { .. })
        ));
        assert!(tikhonov_solve(&system, TikhonovConfig { rho: 1e-3 }).is_ok());
    }

    #[test]
    fn total_variation_cases() {
        assert_eq!(total_variation(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(total_variation(&[0.0, 1.0, 0.0]), 2.0);
        assert_eq!(total_variation(&[1.0, 2.0, 2.5, 4.0]), 3.0);
        assert_eq!(total_variation(&[7.0]), 0.0);
    }

    #[test]
    fn support_parameterization_round_trip() {
        let x = vec![0.0, 0.1, 0.45, 0.5, 1.0];
        let back = support_from_params(&params_from_support(&x));
        for (a, b) in x.iter().zip(&back) {
            assert_close(*a, *b, 1e-14);
        }
        let x = support_from_params(&[30.0, -30.0, 0.0]);
        assert!(x.windows(2).all(|w| w[1] - w[0] >= MIN_SUPPORT_GAP * (1.0 - 1e-12)));
        assert_eq!((x[0], x[3]), (0.0, 1.0));
    }

    #[test]
    fn refit_recovers_representable_curve() {
        let support = vec![0.0, 0.15, 0.3, 0.7, 0.85, 1.0];
        let curve = BezierCurve2D::new(support.clone(), vec![0.0, 0.4, -0.2, 0.3, 0.1, -0.1]).unwrap();
        let shape = SampledCurve::from_bezier(&curve, 300).unwrap();
        let fit = fit_over_support(&shape, &support).unwrap();
        for (a, b) in fit.curve.design().iter().zip(curve.design()) {
            assert_close(*a, *b, 1e-8);
        }
    }

    #[test]
    fn refit_of_constant_is_constant() {
        let shape = SampledCurve::from_fn(200, |_| 0.7).unwrap();
        for support in [uniform_support(4), vec![0.0, 0.05, 0.5, 0.6, 1.0]] {
            let fit = fit_over_support(&shape, &support).unwrap();
            for y in fit.curve.design() {
                assert_close(*y, 0.7, 1e-12);
            }
            assert!(total_variation(fit.curve.design()) < 1e-11);
        }
    }

    #[test]
    fn adapt_support_on_horizontal_line_has_zero_tv() {
        let line = BezierCurve2D::with_uniform_support(vec![0.25; 6]).unwrap();
        let out = adapt_support(&line, &AdaptConfig::default()).unwrap();
        assert!(out.tv_after < 1e-12);
        assert!(out.residual <= out.tolerance);
    }

    #[test]
    fn reconstruct_rejects_zero_cycles() {
        let target = TargetShape2D::Samples(SampledCurve::from_fn(10, |x| x).unwrap());
        assert!(two_phase_reconstruct(&target, &ReconstructConfig::new(3, 0)).is_err());
    }
}
