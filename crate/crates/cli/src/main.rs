use clap::Parser;
use ffd_adapt_cli::{run, Mode, Request};
use std::path::PathBuf;
use std::process::ExitCode;

/// Adaptive free-form deformation toolkit.
#[derive(Debug, Parser)]
#[command(name = "ffd-adapt", version)]
struct Args {
    mode: Mode,
    /// INI configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: paths.out from the config, else ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized inputs; overrides run.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Extra settings as section.key=value.
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let request = Request {
        mode: args.mode,
        config: args.config,
        out: args.out,
        seed: args.seed,
        overrides: args.overrides,
    };
    match run(&request) {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            println!("wrote {} files to {}", report.files.len(), report.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
