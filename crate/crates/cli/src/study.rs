//! Runs a configured study and formats its results.

use crate::config::{DataKind, StudyConfig, StudyKind};
use std::fmt::{self, Write as _};
use viscodg::assembly::{LoadData, ZeroLoads};
use viscodg::{
    convergence_rate, error_norms, run, AssembledSystem, DgSpace, Error, ErrorReport, InitialData, ManufacturedCase,
    Scheme, SolverKind, TriMesh,
};

pub const CSV_HEADER: [&str; 11] = [
    "scheme",
    "k",
    "n",
    "h",
    "dt",
    "err_u_L2",
    "err_u_H1",
    "err_u_energy",
    "err_w_L2",
    "err_w_H1",
    "err_w_energy",
];

pub const RATE_HEADER: [&str; 6] =
    ["rate_u_L2", "rate_u_H1", "rate_u_energy", "rate_w_L2", "rate_w_H1", "rate_w_energy"];

pub const STABILITY_HEADER: [&str; 8] =
    ["scheme", "k", "n", "h", "dt", "max_energy_half_T", "max_energy_T", "ratio"];

#[derive(Debug)]
pub enum StudyError {
    Config(String),
    Solver { alpha0: f64, n: usize, k: usize, source: Error },
    Io(String),
}

impl fmt::Display for StudyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "invalid configuration: {m}"),
            Self::Solver { alpha0, n, k, source } => {
                write!(f, "solver failure at alpha0 = {alpha0}, n = {n}, k = {k}: {source}")
            }
            Self::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for StudyError {}

/// One run of a convergence-type study.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub n: usize,
    pub report: ErrorReport,
    /// Rates against the previous row of the same series; `None` for the
    /// first row.
    pub rates: Option<[f64; 6]>,
    /// Set when the SPD factorization broke down and LU was used instead.
    pub lu_fallback: bool,
}

impl ErrorRow {
    pub fn errors(&self) -> [f64; 6] {
        let r = &self.report;
        [r.err_u_l2, r.err_u_h1, r.err_u_energy, r.err_w_l2, r.err_w_h1, r.err_w_energy]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub scheme: Scheme,
    pub k: usize,
    pub n: usize,
    pub dt: f64,
    pub max_energy_half: f64,
    pub max_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StudyOutput {
    Errors(Vec<ErrorRow>),
    Stability(Vec<StabilityRow>),
}

fn solver_error(cfg: &StudyConfig, n: usize) -> impl Fn(Error) -> StudyError + '_ {
    move |source| StudyError::Solver { alpha0: cfg.alpha0, n, k: cfg.k, source }
}

struct Discretization {
    space: DgSpace,
    sys: AssembledSystem,
}

fn discretize(cfg: &StudyConfig, case: &ManufacturedCase, n: usize) -> Result<Discretization, StudyError> {
    let mesh = TriMesh::structured(n).map_err(solver_error(cfg, n))?;
    let space = DgSpace::new(mesh, cfg.k).map_err(solver_error(cfg, n))?;
    let sys = AssembledSystem::assemble(&space, case.material(), cfg.alpha0, cfg.beta0).map_err(solver_error(cfg, n))?;
    Ok(Discretization { space, sys })
}

fn initial_data(
    cfg: &StudyConfig,
    case: &ManufacturedCase,
    d: &Discretization,
    solver: SolverKind,
) -> viscodg::Result<InitialData> {
    match cfg.data {
        DataKind::Zero => Ok(InitialData::zeros(d.space.total_dofs())),
        DataKind::Manufactured => InitialData::compute_with(
            &d.space,
            &d.sys,
            case.material(),
            &case.initial_displacement(),
            &case.initial_velocity(),
            solver,
        ),
    }
}

fn error_run(
    cfg: &StudyConfig,
    case: &ManufacturedCase,
    d: &Discretization,
    init: &InitialData,
    scheme: Scheme,
    dt: f64,
    solver: SolverKind,
) -> viscodg::Result<ErrorReport> {
    let loads: &dyn LoadData = match cfg.data {
        DataKind::Manufactured => case,
        DataKind::Zero => &ZeroLoads,
    };
    let m = case.material();
    let end = run(scheme, &d.space, &d.sys, m, loads, init, cfg.final_time(), dt, solver, |_| {})?;
    error_norms(&d.space, &d.sys, m, &end, case)
}

/// Runs `cfg` and returns rows in configuration order: scheme-major, then
/// mesh, then step size.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyOutput, StudyError> {
    cfg.validate().map_err(StudyError::Config)?;
    let case = ManufacturedCase::with_material(cfg.material().map_err(StudyError::Config)?);
    if cfg.study == StudyKind::Stability {
        return stability(cfg, &case).map(StudyOutput::Stability);
    }
    let schemes = cfg.scheme.schemes();
    let mut rows: Vec<Vec<ErrorRow>> = vec![Vec::new(); schemes.len()];
    for &n in &cfg.ns {
        let d = discretize(cfg, &case, n)?;
        let fallback = cfg.study == StudyKind::Penalty;
        // a breakdown anywhere on this mesh switches all its runs to LU
        let mut solver = SolverKind::Cholesky;
        let mut init = match initial_data(cfg, &case, &d, solver) {
            Err(Error::NotPositiveDefinite(_)) if fallback => {
                solver = SolverKind::Lu;
                initial_data(cfg, &case, &d, solver).map_err(solver_error(cfg, n))?
            }
            r => r.map_err(solver_error(cfg, n))?,
        };
        for (s, &scheme) in schemes.iter().enumerate() {
            for dt in &cfg.dts {
                let dt = dt.resolve(n);
                let report = match error_run(cfg, &case, &d, &init, scheme, dt, solver) {
                    Err(Error::NotPositiveDefinite(_)) if fallback && solver == SolverKind::Cholesky => {
                        solver = SolverKind::Lu;
                        init = initial_data(cfg, &case, &d, solver).map_err(solver_error(cfg, n))?;
                        error_run(cfg, &case, &d, &init, scheme, dt, solver).map_err(solver_error(cfg, n))?
                    }
                    r => r.map_err(solver_error(cfg, n))?,
                };
                rows[s].push(ErrorRow { n, report, rates: None, lu_fallback: solver == SolverKind::Lu });
            }
        }
    }
    let mut rows: Vec<ErrorRow> = rows.into_iter().flatten().collect();
    attach_rates(cfg.study, &mut rows);
    Ok(StudyOutput::Errors(rows))
}

/// Adjacent-pair rates within each series: against `h` when refining in
/// space, against `Δt` when refining in time.
fn attach_rates(study: StudyKind, rows: &mut [ErrorRow]) {
    let scale = |r: &ErrorRow| match study {
        StudyKind::TConv => r.report.dt,
        _ => r.report.h,
    };
    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        if study == StudyKind::Single || prev.report.scheme != cur.report.scheme {
            continue;
        }
        let (ep, ec) = (prev.errors(), cur.errors());
        let scales = [scale(prev), scale(cur)];
        let mut rates = [f64::NAN; 6];
        for c in 0..6 {
            if let Ok(r) = convergence_rate(&[ep[c], ec[c]], &scales) {
                rates[c] = r[0];
            }
        }
        rows[i].rates = Some(rates);
    }
}

fn stability(cfg: &StudyConfig, case: &ManufacturedCase) -> Result<Vec<StabilityRow>, StudyError> {
    let (n, dt) = cfg.runs()[0];
    let d = discretize(cfg, case, n)?;
    let init = initial_data(cfg, case, &d, SolverKind::Cholesky).map_err(solver_error(cfg, n))?;
    let t = cfg.final_time();
    let mut out = Vec::new();
    for scheme in cfg.scheme.schemes() {
        let (mut half, mut full) = (0.0f64, 0.0f64);
        run(scheme, &d.space, &d.sys, case.material(), &ZeroLoads, &init, t, dt, SolverKind::Cholesky, |s| {
            let e = s.energy(&d.sys);
            if s.t <= 0.5 * t + 0.5 * dt {
                half = half.max(e);
            }
            full = full.max(e);
        })
        .map_err(solver_error(cfg, n))?;
        out.push(StabilityRow { scheme, k: cfg.k, n, dt, max_energy_half: half, max_energy: full });
    }
    Ok(out)
}

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x}")
    }
}

/// CSV text; numbers use the shortest representation that round-trips.
pub fn to_csv(output: &StudyOutput) -> Result<String, StudyError> {
    let io = |e: csv::Error| StudyError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    match output {
        StudyOutput::Errors(rows) => {
            w.write_record(CSV_HEADER.iter().chain(&RATE_HEADER)).map_err(io)?;
            for row in rows {
                let r = &row.report;
                let mut rec = vec![r.scheme.name().to_string(), r.k.to_string(), row.n.to_string(), num(r.h), num(r.dt)];
                rec.extend(row.errors().iter().map(|&e| num(e)));
                rec.extend(row.rates.unwrap_or([f64::NAN; 6]).iter().map(|&x| num(x)));
                w.write_record(&rec).map_err(io)?;
            }
        }
        StudyOutput::Stability(rows) => {
            w.write_record(STABILITY_HEADER).map_err(io)?;
            for r in rows {
                w.write_record([
                    r.scheme.name().to_string(),
                    r.k.to_string(),
                    r.n.to_string(),
                    num(1.0 / r.n as f64),
                    num(r.dt),
                    num(r.max_energy_half),
                    num(r.max_energy),
                    num(r.max_energy / r.max_energy_half),
                ])
                .map_err(io)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| StudyError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| StudyError::Io(e.to_string()))
}

fn rate_cell(x: Option<f64>) -> String {
    match x {
        Some(r) if r.is_finite() => format!("({r:6.2})"),
        _ => " ".repeat(8),
    }
}

/// Human-readable table of errors and rates.
pub fn rate_table(cfg: &StudyConfig, output: &StudyOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "study {} k={} alpha0={} beta0={} T={}",
        cfg.study,
        cfg.k,
        cfg.alpha0,
        cfg.beta0,
        cfg.final_time()
    );
    match output {
        StudyOutput::Errors(rows) => {
            let _ = writeln!(
                s,
                "{:<12} {:>4} {:>10}  {:<18} {:<18} {:<18} {:<18}",
                "scheme", "n", "dt", "u L2", "u H1", "w L2", "w H1"
            );
            for row in rows {
                let e = row.errors();
                let rate = |c: usize| rate_cell(row.rates.map(|r| r[c]));
                let _ = write!(
                    s,
                    "{:<12} {:>4} {:>10.4e}  {:>9.3e} {} {:>9.3e} {} {:>9.3e} {} {:>9.3e} {}",
                    row.report.scheme.name(),
                    row.n,
                    row.report.dt,
                    e[0],
                    rate(0),
                    e[1],
                    rate(1),
                    e[3],
                    rate(3),
                    e[4],
                    rate(4)
                );
                if row.lu_fallback {
                    let _ = write!(s, "  [SPD factorization failed, LU used]");
                }
                s.push('\n');
            }
        }
        StudyOutput::Stability(rows) => {
            let _ = writeln!(s, "{:<12} {:>4} {:>10}  {:>14} {:>14} {:>10}", "scheme", "n", "dt", "max E (T/2)", "max E (T)", "ratio");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{:<12} {:>4} {:>10.4e}  {:>14.6e} {:>14.6e} {:>10.6}",
                    r.scheme.name(),
                    r.n,
                    r.dt,
                    r.max_energy_half,
                    r.max_energy,
                    r.max_energy / r.max_energy_half
                );
            }
        }
    }
    s
}
