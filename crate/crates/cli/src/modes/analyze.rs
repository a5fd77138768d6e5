use super::ModeOutput;
use crate::config::{parse_degrees, Settings};
use crate::error::{CliError, CliResult};
use crate::output::{format_real, Table};
use ffd_adapt::bernstein::uniform_support;
use ffd_adapt::inverse2d::{condition_number, singular_values, tikhonov_solve, uniform_gram, GramSystem, TikhonovConfig};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SECTION: &str = "analyze2d";

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeConfig {
    pub degrees: Vec<u32>,
    pub spectrum_degrees: Vec<u32>,
    pub tikhonov_degree: u32,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_per_decade: u32,
    pub seed: u64,
}

pub fn resolve(s: &Settings, seed: u64) -> CliResult<AnalyzeConfig> {
    let degrees = s.value_with(SECTION, "degrees", "1..12", parse_degrees)?;
    let default_spectrum = degrees.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    let cfg = AnalyzeConfig {
        spectrum_degrees: s.value_with(SECTION, "spectrum_degrees", &default_spectrum, parse_degrees)?,
        degrees,
        tikhonov_degree: s.value(SECTION, "tikhonov_degree", "10")?,
        rho_min: s.value(SECTION, "rho_min", "1e-12")?,
        rho_max: s.value(SECTION, "rho_max", "1e2")?,
        rho_per_decade: s.value(SECTION, "rho_per_decade", "4")?,
        seed,
    };
    if cfg.degrees.contains(&0) || cfg.spectrum_degrees.contains(&0) || cfg.tikhonov_degree == 0 {
        return Err(CliError::Config("analyze2d degrees must be at least 1".into()));
    }
    if !(cfg.rho_min > 0.0 && cfg.rho_max >= cfg.rho_min && cfg.rho_max.is_finite()) {
        return Err(CliError::Config("analyze2d needs 0 < rho_min <= rho_max".into()));
    }
    if cfg.rho_per_decade == 0 {
        return Err(CliError::Config("analyze2d.rho_per_decade must be at least 1".into()));
    }
    Ok(cfg)
}

/// Log-spaced grid from `rho_min` to `rho_max`, both included.
pub fn rho_grid(cfg: &AnalyzeConfig) -> Vec<f64> {
    let (a, b) = (cfg.rho_min.log10(), cfg.rho_max.log10());
    let steps = ((b - a) * cfg.rho_per_decade as f64).round() as usize;
    (0..=steps)
        .map(|k| {
            if k == steps {
                cfg.rho_max
            } else {
                10f64.powf(a + k as f64 / cfg.rho_per_decade as f64)
            }
        })
        .collect()
}

pub fn execute(cfg: &AnalyzeConfig) -> CliResult<ModeOutput> {
    let mut out = ModeOutput::default();

    let mut cond = Table::new(&["n", "cond"]);
    let mut conds = Vec::with_capacity(cfg.degrees.len());
    for &n in &cfg.degrees {
        let c = condition_number(&uniform_gram(n)?)?;
        cond.push(vec![n.into(), c.into()]);
        conds.push(c);
    }

    let mut spectrum = Table::new(&["n", "index", "sigma"]);
    for &n in &cfg.spectrum_degrees {
        for (i, sigma) in singular_values(&uniform_gram(n)?)?.into_iter().enumerate() {
            spectrum.push(vec![n.into(), i.into(), sigma.into()]);
        }
    }

    let n = cfg.tikhonov_degree;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let system = GramSystem {
        matrix: uniform_gram(n)?,
        load: (0..=n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
        degree: n,
        support: uniform_support(n),
    };
    let mut sweep = Table::new(&["rho", "residual_norm", "solution_norm"]);
    for rho in rho_grid(cfg) {
        let y = tikhonov_solve(&system, TikhonovConfig::new(rho)?)?;
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        sweep.push(vec![rho.into(), system.residual_norm(&y).into(), norm.into()]);
    }

    let increasing = conds.windows(2).all(|w| w[1] > w[0]);
    out.result("degrees", cfg.degrees.len().to_string());
    out.result("cond_first", format_real(conds[0]));
    out.result("cond_last", format_real(*conds.last().expect("non-empty degree list")));
    out.result("cond_increasing", increasing.to_string());
    out.line(format!(
        "cond(A) for n = {}..{}: {} .. {}",
        cfg.degrees[0],
        cfg.degrees[cfg.degrees.len() - 1],
        conds[0],
        conds[conds.len() - 1]
    ));
    out.artifacts.add_table("cond.csv", &cond);
    out.artifacts.add_table("spectrum.csv", &spectrum);
    out.artifacts.add_table("tikhonov.csv", &sweep);
    Ok(out)
}
