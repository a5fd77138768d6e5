//! Acceptance gate: one PASS/FAIL line per criterion at its stated tolerance.

use ffd_adapt::bernstein::{uniform_support, BezierCurve2D};
use ffd_adapt::ffd::{apply_deformation, embed_mesh, rebaseline, DofMap, FfdLattice, FreezeSpec};
use ffd_adapt::inverse2d::*;
use ffd_adapt::objectives::{penalized_cost, surface_mismatch, AeroCoefficients, PenaltyConfig, WingFitProblem};
use ffd_adapt::optimizer::{nelder_mead, run_with_adaption, AdaptionSchedule, AdaptiveProblem, Event, NmConfig};
use ffd_adapt::wing::{seeded_target, TargetSpec, WingSpec};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

type Outcome = (bool, String);

fn pascal(n: usize) -> Vec<Vec<u128>> {
    let mut rows: Vec<Vec<u128>> = vec![vec![1]];
    for r in 1..=n {
        let mut row = vec![1u128; r + 1];
        for k in 1..r {
            row[k] = rows[r - 1][k - 1] + rows[r - 1][k];
        }
        rows.push(row);
    }
    rows
}

fn gram_equivalence() -> Outcome {
    let start = Instant::now();
    let c = pascal(21);
    let mut worst = 0.0f64;
    for n in 1..=10usize {
        let a = gram_matrix(&uniform_support(n as u32)).unwrap();
        for i in 0..=n {
            for j in 0..=n {
                let exact = (c[n][i] * c[n][j]) as f64 / ((2 * n as u128 + 1) * c[2 * n][i + j]) as f64;
                worst = worst.max((a[(i, j)] - exact).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (worst <= 1e-12 && secs < 1.0, format!("max |A - closed form| = {worst:.2e} (tol 1e-12), {secs:.3} s"))
}

fn ffd_bin(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ffd-adapt")).current_dir(dir).args(args).output().unwrap()
}

fn csv_column(text: &str, name: &str) -> Vec<String> {
    let mut lines = text.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn conditioning_trend() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.ini"), "[analyze2d]\ndegrees = 1..12\n").unwrap();
    let o = ffd_bin(dir.path(), &["analyze2d", "--config", "a.ini", "--out", "out"]);
    if !o.status.success() {
        return (false, format!("analyze2d failed: {}", String::from_utf8_lossy(&o.stderr)));
    }
    let csv = std::fs::read_to_string(dir.path().join("out/cond.csv")).unwrap();
    let cond: Vec<f64> = csv_column(&csv, "cond").iter().map(|v| v.parse().unwrap()).collect();
    let increasing = cond.windows(2).all(|w| w[1] > w[0]);
    let pinned = cond.first() == Some(&3.0);
    (
        cond.len() == 12 && increasing && pinned,
        format!("{} rows in cond.csv, strictly increasing: {increasing}, cond(1) = {:?}", cond.len(), cond[0]),
    )
}

fn singular_clustering() -> Outcome {
    // 60-digit eigenvalues of the closed-form A at n = 12
    let ratio_oracle = 1.9229659827317654751e-7;
    let count_oracle = 4;
    let s = singular_values(&uniform_gram(12).unwrap()).unwrap();
    let ratio = s[s.len() - 1] / s[0];
    let count = s.iter().filter(|v| **v < 1e-3 * s[0]).count();
    let rel = (ratio - ratio_oracle).abs() / ratio_oracle;
    (
        rel <= 1e-9 && count >= count_oracle,
        format!("σmin/σmax = {ratio:.12e} vs oracle {ratio_oracle:.12e} (rel {rel:.1e}); {count} below 1e-3·σmax (oracle {count_oracle})"),
    )
}

fn random_system(n: u32, seed: u64) -> GramSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GramSystem {
        matrix: uniform_gram(n).unwrap(),
        load: (0..=n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
        degree: n,
        support: uniform_support(n),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn tikhonov_properties() -> Outcome {
    let system = random_system(10, 2024);
    let mut violations = 0;
    let mut prev: Option<(f64, f64)> = None;
    for q in -48..=8 {
        let rho = 10f64.powf(q as f64 / 4.0);
        let y = tikhonov_solve(&system, TikhonovConfig::new(rho).unwrap()).unwrap();
        let (r, n) = (system.residual_norm(&y), norm(&y));
        if let Some((pr, pn)) = prev {
            violations += usize::from(r < pr) + usize::from(n > pn);
        }
        prev = Some((r, n));
    }
    let mut worst = 0.0f64;
    for n in 1..=6 {
        let system = random_system(n, 100 + n as u64);
        let direct = solve_exact(&system).unwrap();
        let filtered = tikhonov_solve(&system, TikhonovConfig::new(0.0).unwrap()).unwrap();
        worst = direct.iter().zip(&filtered).fold(worst, |m, (a, b)| m.max((a - b).abs()));
    }
    (
        violations == 0 && worst <= 1e-8,
        format!("{violations} monotonicity violations over 57 rho values; rho=0 vs direct max |Δ| = {worst:.2e} (tol 1e-8)"),
    )
}

fn exact_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let design: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let curve = BezierCurve2D::with_uniform_support(design.clone()).unwrap();
        let support = curve.support().to_vec();
        let y = solve_exact(&GramSystem::assemble(&support, &TargetShape2D::Bezier(curve)).unwrap()).unwrap();
        worst = y.iter().zip(&design).fold(worst, |m, (a, b)| m.max((a - b).abs()));
    }
    (worst <= 1e-10, format!("max |Y - Ȳ| over n = 1..8: {worst:.2e} (tol 1e-10)"))
}

fn ramp(k: f64) -> TargetShape2D {
    TargetShape2D::Samples(SampledCurve::from_fn(2001, move |x| 0.5 * (1.0 + (k * (x - 0.5)).tanh())).unwrap())
}

fn two_phase_regularization() -> Outcome {
    let records = two_phase_reconstruct(&ramp(10.0), &ReconstructConfig::new(8, 1)).unwrap();
    let (y0, y1) = (&records[0], &records[1]);
    let within = y1.refit_residual.zip(y1.refit_tolerance).is_some_and(|(r, t)| r <= t);
    let high = y1.tv <= y0.tv && within;

    // cubic instance; grid minimum from an independent exhaustive search (h = 0.0025)
    let grid_oracle = 2.634043637673822;
    let support = uniform_support(3);
    let y = solve_exact(&GramSystem::assemble(&support, &ramp(5.0)).unwrap()).unwrap();
    let start = BezierCurve2D::new(support, y).unwrap();
    let tv0 = total_variation(start.design());
    let adapted = adapt_support(&start, &AdaptConfig::default()).unwrap();
    let oracle = adapted.tv_after < tv0 && adapted.tv_after <= grid_oracle + 1e-3;
    (
        high && oracle,
        format!(
            "n=8: TV {:.4} -> {:.4}, refit {:.2e} <= tol {:.2e}: {within}; n=3: TV {tv0:.6} -> {:.6} (grid oracle {grid_oracle:.6})",
            y0.tv,
            y1.tv,
            y1.refit_residual.unwrap_or(f64::NAN),
            y1.refit_tolerance.unwrap_or(f64::NAN),
            adapted.tv_after
        ),
    )
}

fn published_costs() -> Outcome {
    let base = AeroCoefficients { lift: 0.319192893, drag: 0.026352608 };
    let rows = [
        ("reference", base, 1.0),
        ("basic", AeroCoefficients { lift: 0.318874966, drag: 0.017450289 }, 0.662184501),
        ("adaptive", AeroCoefficients { lift: 0.318999078, drag: 0.016299483 }, 0.618515468),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, c, published) in rows {
        let cost = penalized_cost(c, base, PenaltyConfig::default());
        let err = (cost - published).abs();
        ok &= err <= 1e-8;
        parts.push(format!("{name} {cost:.9} vs {published} (|Δ| {err:.1e})"));
    }
    (ok, format!("{} (tol 1e-8)", parts.join("; ")))
}

fn ffd_invariance() -> Outcome {
    let w = WingSpec::default();
    let (mesh, bounds) = (w.mesh(), w.lattice_bounds());
    let embedded = embed_mesh(&mesh, &bounds);
    let identity = apply_deformation(&embedded, &FfdLattice::zeros(bounds, [3, 1, 1]).unwrap()).unwrap();
    let id_err = mesh.max_vertex_distance(&identity);

    let dofs = DofMap::new([3, 1, 1], &FreezeSpec::default()).unwrap();
    let design: Vec<f64> = (0..dofs.len()).map(|i| 0.03 * ((i % 3) as f64 - 1.0)).collect();
    let lattice = dofs.decode(&design, bounds).unwrap();
    let before = apply_deformation(&embedded, &lattice).unwrap();
    let next = rebaseline(&embedded, &lattice).unwrap();
    let after = apply_deformation(&next.embedded, &next.lattice).unwrap();
    let exact = before.vertices() == after.vertices();

    let (target, _) = seeded_target(&mesh, bounds, TargetSpec::default(), 2).unwrap();
    let problem = WingFitProblem::new(&mesh, bounds, dofs.clone(), target).unwrap();
    let template = FfdLattice::zeros(bounds, [3, 1, 1]).unwrap();
    let run = run_with_adaption(
        AdaptiveProblem { embedded: problem.embedded(), lattice: &template, dofs: &dofs, objective: problem.mesh_objective() },
        AdaptionSchedule::every(50),
        &NmConfig { max_evaluations: 600, initial_step: 0.012, ..NmConfig::default() },
    )
    .unwrap();
    let recs = &run.history.records;
    let mut worst = 0.0f64;
    let mut events = 0;
    for (i, r) in recs.iter().enumerate().filter(|(_, r)| r.event == Event::Adaption) {
        events += 1;
        worst = worst.max((recs[i + 1].best_value - r.best_value).abs() / r.best_value.abs());
    }
    let jump = surface_mismatch(&before, problem.target()).unwrap() - surface_mismatch(&after, problem.target()).unwrap();
    (
        id_err <= 1e-15 && exact && events > 0 && worst <= 1e-14 && jump == 0.0,
        format!("identity max |Δ| = {id_err:.1e}; rebaseline exact: {exact}; {events} adaptions, max relative objective jump {worst:.1e} (tol 1e-14)"),
    )
}

fn dof_accounting() -> Outcome {
    let counts: Vec<usize> = [3, 6, 9]
        .iter()
        .map(|&n| DofMap::new([n, 1, 1], &FreezeSpec::default()).unwrap().len())
        .collect();
    (counts == [8, 20, 32], format!("(3,1,1), (6,1,1), (9,1,1) -> {counts:?}"))
}

fn adaptive_vs_basic() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("o.ini"),
        "[lattice]\ndegrees = 3,1,1\n[optimizer]\nmax_evaluations = 600\n[schedule]\nstrategy = both\nperiod = 100\n",
    )
    .unwrap();
    let mut ratios = Vec::new();
    for seed in 1..=3u64 {
        let out = format!("seed{seed}");
        let o = ffd_bin(dir.path(), &["optimize3d", "--config", "o.ini", "--out", &out, "--seed", &seed.to_string()]);
        if !o.status.success() {
            return (false, format!("seed {seed} failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
        let csv = std::fs::read_to_string(dir.path().join(&out).join("summary.csv")).unwrap();
        let cost: Vec<f64> = csv_column(&csv, "final_cost").iter().map(|v| v.parse().unwrap()).collect();
        ratios.push(cost[1] / cost[0]);
    }
    let secs = start.elapsed().as_secs_f64();
    let all = ratios.iter().all(|r| *r <= 1.0);
    let strong = ratios.iter().any(|r| *r <= 0.95);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    (
        all && strong && secs < 60.0,
        format!("adaptive/basic final cost, seeds 1-3: [{}]; {secs:.1} s", shown.join(", ")),
    )
}

fn optimizer_sanity() -> Outcome {
    let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
    let out = nelder_mead(rosen, &[-1.2, 1.0], &NmConfig { max_evaluations: 400, ..NmConfig::default() }).unwrap();
    let monotone = out.history.segments().iter().all(|s| s.windows(2).all(|w| w[1].best_value <= w[0].best_value));
    (
        out.best_value < 1e-6 && monotone,
        format!("Rosenbrock best {:.2e} after {} evaluations (budget 400); monotone: {monotone}", out.best_value, out.evaluations),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("closed-form Gram equivalence", gram_equivalence),
        ("conditioning trend", conditioning_trend),
        ("singular-value clustering", singular_clustering),
        ("Tikhonov properties", tikhonov_properties),
        ("exact 2D recovery", exact_recovery),
        ("two-phase regularization", two_phase_regularization),
        ("published cost replay", published_costs),
        ("FFD identity and adaption invariance", ffd_invariance),
        ("DOF accounting", dof_accounting),
        ("adaptive vs basic", adaptive_vs_basic),
        ("optimizer sanity", optimizer_sanity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!("[{}] {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
