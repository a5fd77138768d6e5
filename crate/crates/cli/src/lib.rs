//! Command-line runner for `ffd-adapt`: INI configuration, the 2D analysis
//! suite, the 3D optimization pipeline and CSV/OBJ output.

pub mod config;
pub mod error;
pub mod input;
pub mod modes;
pub mod output;

use config::{Settings, RESULT_SECTION};
use error::{CliError, CliResult};
use output::Artifacts;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Analyze2d,
    Reconstruct2d,
    Optimize3d,
    Deform,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Analyze2d => "analyze2d",
            Mode::Reconstruct2d => "reconstruct2d",
            Mode::Optimize3d => "optimize3d",
            Mode::Deform => "deform",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Request {
    pub mode: Mode,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub overrides: Vec<String>,
}

#[derive(Debug)]
pub struct Report {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

/// Resolves the configuration and runs a mode without touching the file system
/// beyond reading inputs.
pub fn execute(mode: Mode, settings: &mut Settings, seed: Option<u64>) -> CliResult<Artifacts> {
    Ok(execute_with_lines(mode, settings, seed)?.0)
}

fn execute_with_lines(mode: Mode, settings: &mut Settings, seed: Option<u64>) -> CliResult<(Artifacts, Vec<String>)> {
    if let Some(seed) = seed {
        settings.set("run", "seed", &seed.to_string());
    }
    let s = &*settings;
    let named: String = s.value("run", "mode", mode.as_str())?;
    if named != mode.as_str() {
        return Err(CliError::Config(format!(
            "config is for mode '{named}' but '{}' was requested",
            mode.as_str()
        )));
    }
    let seed: u64 = s.value("run", "seed", "1")?;
    let mut output = match mode {
        Mode::Analyze2d => {
            let cfg = modes::analyze::resolve(s, seed)?;
            s.check_unused()?;
            modes::analyze::execute(&cfg)?
        }
        Mode::Reconstruct2d => {
            let (cfg, target) = modes::reconstruct::resolve(s)?;
            s.check_unused()?;
            modes::reconstruct::execute(&cfg, &target)?
        }
        Mode::Optimize3d => {
            let cfg = modes::optimize::resolve(s, seed)?;
            s.check_unused()?;
            modes::optimize::execute(&cfg)?
        }
        Mode::Deform => {
            let cfg = modes::deform::resolve(s)?;
            s.check_unused()?;
            modes::deform::execute(&cfg)?
        }
    };
    let mut summary = format!("[{RESULT_SECTION}]\n");
    for (k, v) in &output.result {
        summary += &format!("{k} = {v}\n");
    }
    summary.push('\n');
    summary += &s.echo();
    output.artifacts.add("summary.ini", summary.into_bytes());
    Ok((output.artifacts, output.lines))
}

pub fn run(request: &Request) -> CliResult<Report> {
    let mut settings = Settings::load(&request.config)?;
    for o in &request.overrides {
        settings.apply_override(o)?;
    }
    settings.exclude_from_echo("paths", "out");
    let configured: Option<String> = settings.optional("paths", "out")?;
    let out_dir = request
        .out
        .clone()
        .or_else(|| configured.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let (artifacts, lines) = execute_with_lines(request.mode, &mut settings, request.seed)?;
    let files = artifacts.write_all(&out_dir)?;
    Ok(Report { out_dir, files, lines })
}
