//! `key = value` study configuration.

use std::fmt;
use std::str::FromStr;
use viscodg::stepper::step_count;
use viscodg::{ElasticTensor, PronyMaterial, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Single,
    /// Mesh refinement over `ns`.
    HConv,
    /// Step refinement over `dts` on one mesh.
    TConv,
    /// Mesh refinement with a (typically too small) penalty; a failed SPD
    /// factorization is reported and the runs are repeated with LU.
    Penalty,
    /// Homogeneous loads, maximum discrete energy up to `T/2` and `T`.
    Stability,
}

impl FromStr for StudyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(Self::Single),
            "hconv" => Ok(Self::HConv),
            "tconv" => Ok(Self::TConv),
            "penalty" => Ok(Self::Penalty),
            "stability" => Ok(Self::Stability),
            _ => Err(format!("unknown study '{s}' (expected single, hconv, tconv, penalty or stability)")),
        }
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Single => "single",
            Self::HConv => "hconv",
            Self::TConv => "tconv",
            Self::Penalty => "penalty",
            Self::Stability => "stability",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    One(Scheme),
    Both,
}

impl SchemeChoice {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            Self::One(s) => vec![s],
            Self::Both => vec![Scheme::Displacement, Scheme::Velocity],
        }
    }
}

impl FromStr for SchemeChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "both" {
            return Ok(Self::Both);
        }
        s.parse::<Scheme>().map(Self::One).map_err(|e| e.to_string())
    }
}

/// A step size, either fixed or tied to the mesh (`dt = h`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    Fixed(f64),
    MeshSize,
}

impl StepSize {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Self::Fixed(dt) => dt,
            Self::MeshSize => 1.0 / n as f64,
        }
    }
}

impl FromStr for StepSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "h" {
            return Ok(Self::MeshSize);
        }
        let dt = parse_number(s)?;
        if dt > 0.0 && dt.is_finite() {
            Ok(Self::Fixed(dt))
        } else {
            Err(format!("step size must be positive, got {s}"))
        }
    }
}

impl fmt::Display for StepSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(dt) => write!(f, "{dt}"),
            Self::MeshSize => f.write_str("h"),
        }
    }
}

/// Which loads and initial data drive the runs. Errors are always measured
/// against the manufactured solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    Manufactured,
    /// No loads and zero initial data; the discrete solution stays zero.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub study: StudyKind,
    pub scheme: SchemeChoice,
    pub k: usize,
    /// Mesh subdivisions; a single entry unless refining in space.
    pub ns: Vec<usize>,
    /// Step sizes; a single entry unless refining in time.
    pub dts: Vec<StepSize>,
    /// Final time. `None` means 1, or 10 for the stability study.
    pub t_final: Option<f64>,
    pub alpha0: f64,
    pub beta0: f64,
    pub rho: f64,
    pub phi0: f64,
    pub phis: Vec<f64>,
    pub taus: Vec<f64>,
    pub elastic: ElasticTensor,
    pub data: DataKind,
    pub out: Option<String>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        let m = PronyMaterial::reference();
        Self {
            study: StudyKind::Single,
            scheme: SchemeChoice::One(Scheme::Displacement),
            k: 1,
            ns: vec![4],
            dts: vec![StepSize::Fixed(0.25)],
            t_final: None,
            alpha0: 10.0,
            beta0: 1.0,
            rho: m.rho(),
            phi0: m.phi0(),
            phis: (0..m.n_terms()).map(|q| m.term(q).unwrap().0).collect(),
            taus: (0..m.n_terms()).map(|q| m.term(q).unwrap().1).collect(),
            elastic: m.elastic_tensor(),
            data: DataKind::Manufactured,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line of the offending entry, if it came from a file.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Accepts decimals and fractions such as `1/2048`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number"));
    match s.split_once('/') {
        Some((a, b)) => {
            let d = num(b)?;
            if d == 0.0 {
                return Err(format!("'{s}' divides by zero"));
            }
            Ok(num(a)? / d)
        }
        None => num(s),
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let items: Vec<T> = s.split(',').map(|t| item(t.trim())).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.parse::<usize>().map_err(|_| format!("'{s}' is not a non-negative integer"))
}

impl StudyConfig {
    /// Sets one key. Used for both file lines and command-line flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "study" => self.study = v.parse()?,
            "scheme" => self.scheme = v.parse()?,
            "k" => self.k = parse_usize(v)?,
            "n" => self.ns = vec![parse_usize(v)?],
            "ns" => self.ns = parse_list(v, parse_usize)?,
            "dt" => self.dts = vec![v.parse()?],
            "dts" => self.dts = parse_list(v, str::parse)?,
            "T" => self.t_final = Some(parse_number(v)?),
            "alpha0" => self.alpha0 = parse_number(v)?,
            "beta0" => self.beta0 = parse_number(v)?,
            "rho" => self.rho = parse_number(v)?,
            "phi0" => self.phi0 = parse_number(v)?,
            "phis" => self.phis = if v.is_empty() { Vec::new() } else { parse_list(v, parse_number)? },
            "taus" => self.taus = if v.is_empty() { Vec::new() } else { parse_list(v, parse_number)? },
            "elastic" => {
                self.elastic = match v {
                    "identity" => ElasticTensor::Identity,
                    "isotropic" => match self.elastic {
                        e @ ElasticTensor::Isotropic { .. } => e,
                        ElasticTensor::Identity => ElasticTensor::Isotropic { lambda: 0.0, mu: 0.5 },
                    },
                    _ => return Err(format!("unknown elastic tensor '{v}' (expected identity or isotropic)")),
                }
            }
            "lambda" | "mu" => {
                let x = parse_number(v)?;
                let (mut lambda, mut mu) = self.elastic.lame();
                if key == "lambda" {
                    lambda = x;
                } else {
                    mu = x;
                }
                self.elastic = ElasticTensor::Isotropic { lambda, mu };
            }
            "data" => {
                self.data = match v {
                    "manufactured" => DataKind::Manufactured,
                    "zero" => DataKind::Zero,
                    _ => return Err(format!("unknown data '{v}' (expected manufactured or zero)")),
                }
            }
            "out" => self.out = Some(v.to_string()),
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    pub fn final_time(&self) -> f64 {
        self.t_final.unwrap_or(match self.study {
            StudyKind::Stability => 10.0,
            _ => 1.0,
        })
    }

    pub fn material(&self) -> Result<PronyMaterial, String> {
        PronyMaterial::new(self.rho, self.phi0, self.phis.clone(), self.taus.clone(), self.elastic)
            .map_err(|e| e.to_string())
    }

    /// `(n, Δt)` pairs in run order.
    pub fn runs(&self) -> Vec<(usize, f64)> {
        self.ns.iter().flat_map(|&n| self.dts.iter().map(move |dt| (n, dt.resolve(n)))).collect()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.k < 1 {
            return Err(format!("k must be at least 1, got {}", self.k));
        }
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return Err(format!("alpha0 must be positive, got {}", self.alpha0));
        }
        if !(self.beta0 >= 1.0 && self.beta0.is_finite()) {
            return Err(format!("beta0 must be at least 1, got {}", self.beta0));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n == 0) {
            return Err(format!("mesh size n must be positive, got {n}"));
        }
        let t = self.final_time();
        if !(t >= 0.0 && t.is_finite()) {
            return Err(format!("T must be non-negative, got {t}"));
        }
        self.material()?;
        match self.study {
            StudyKind::HConv | StudyKind::Penalty if self.ns.len() < 2 => {
                return Err(format!("{} study needs at least two meshes in ns", self.study));
            }
            StudyKind::TConv if self.dts.len() < 2 => {
                return Err("tconv study needs at least two step sizes in dts".into());
            }
            StudyKind::Single | StudyKind::Stability if self.ns.len() > 1 || self.dts.len() > 1 => {
                return Err(format!("{} study takes one n and one dt", self.study));
            }
            _ => {}
        }
        let mut horizons = vec![t];
        if self.study == StudyKind::Stability {
            horizons.push(0.5 * t);
        }
        for (n, dt) in self.runs() {
            for &h in &horizons {
                step_count(h, dt).map_err(|_| format!("T = {h} is not a whole number of steps of {dt} (n = {n})"))?;
            }
        }
        Ok(())
    }
}

/// Parses `key = value` lines; `#` starts a comment. The result is
/// validated.
pub fn parse_config(text: &str) -> Result<StudyConfig, ConfigError> {
    let mut cfg = StudyConfig::default();
    apply_lines(&mut cfg, text)?;
    cfg.validate().map_err(|message| ConfigError { line: None, message })?;
    Ok(cfg)
}

/// Applies `key = value` lines to an existing configuration without
/// validating.
pub fn apply_lines(cfg: &mut StudyConfig, text: &str) -> Result<(), ConfigError> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError { line: Some(i + 1), message };
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        cfg.set(key.trim(), value).map_err(err)?;
    }
    Ok(())
}
