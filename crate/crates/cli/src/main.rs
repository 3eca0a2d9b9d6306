use clap::Parser;
use std::process::ExitCode;
use viscodg_cli::config::apply_lines;
use viscodg_cli::{rate_table, run_study, to_csv, StudyConfig, StudyError};

/// Convergence, penalty and stability studies for the viscoelastic DG solver.
///
/// Flags override entries of the configuration file.
#[derive(Debug, Parser)]
#[command(name = "viscodg", version)]
struct Args {
    /// `key = value` configuration file
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// single, hconv, tconv, penalty or stability
    #[arg(long)]
    study: Option<String>,
    /// displacement, velocity or both
    #[arg(long)]
    scheme: Option<String>,
    /// Polynomial degree
    #[arg(long)]
    k: Option<String>,
    /// Mesh subdivisions, comma separated for refinement studies
    #[arg(long)]
    n: Option<String>,
    /// Step size(s): decimals, fractions like 1/2048, or h
    #[arg(long)]
    dt: Option<String>,
    /// Final time
    #[arg(long = "T")]
    t_final: Option<String>,
    #[arg(long)]
    alpha0: Option<String>,
    #[arg(long)]
    beta0: Option<String>,
    /// CSV output path
    #[arg(long)]
    out: Option<String>,
}

const CONFIG_ERROR: u8 = 2;
const SOLVER_ERROR: u8 = 3;

fn load(args: &Args) -> Result<StudyConfig, String> {
    let mut cfg = StudyConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        apply_lines(&mut cfg, &text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let lists = |v: &str| v.contains(',');
    let flags = [
        ("study", &args.study),
        ("scheme", &args.scheme),
        ("k", &args.k),
        ("T", &args.t_final),
        ("alpha0", &args.alpha0),
        ("beta0", &args.beta0),
        ("out", &args.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v).map_err(|e| format!("--{key}: {e}"))?;
        }
    }
    if let Some(v) = &args.n {
        cfg.set(if lists(v) { "ns" } else { "n" }, v).map_err(|e| format!("--n: {e}"))?;
    }
    if let Some(v) = &args.dt {
        cfg.set(if lists(v) { "dts" } else { "dt" }, v).map_err(|e| format!("--dt: {e}"))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let output = match run_study(&cfg) {
        Ok(o) => o,
        Err(e @ StudyError::Config(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(SOLVER_ERROR);
        }
    };
    print!("{}", rate_table(&cfg, &output));
    if let Some(path) = &cfg.out {
        let written = to_csv(&output).and_then(|csv| std::fs::write(path, csv).map_err(|e| StudyError::Io(format!("{path}: {e}"))));
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(SOLVER_ERROR);
        }
    }
    ExitCode::SUCCESS
}
