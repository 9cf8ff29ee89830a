//! Configuration, stage drivers, certificate files and figure data.
//!
//! A run is described by a flat `key = value` file:
//!
//! ```text
//! alpha = 2.1
//! c = poisson:0.2
//! nu = 1.1
//! K = 20
//! M = 60
//! d = 1
//! scalings = auto
//! output_dir = out
//! ```
//!
//! Decimal values are kept as strings and converted to enclosing intervals,
//! never to nearest floats. Each stage writes a JSON certificate wrapped in a
//! versioned [`Envelope`].

use crate::eigen::{self, EigenError, EigenpairCertificate, MorseCertificate};
use crate::fisher::{CSpec, EquilibriumCertificate, FisherError, FisherProblem};
use crate::interval::Interval;
use crate::manifold::{self, LinearData, ManifoldApprox, ManifoldError};
use crate::manifold_validation::{self, ManifoldCertificate, ValidationError};
use crate::orbit::{self, ConnectionCertificate, OrbitError};
use crate::par::Exec;
use crate::sequence_space::eval_cosine;
pub use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

pub const EQUILIBRIUM_FILE: &str = "equilibrium.json";
pub const EIGEN_FILE: &str = "eigen.json";
pub const MORSE_FILE: &str = "morse.json";
pub const MANIFOLD_FILE: &str = "manifold.json";
pub const CERTIFICATE_FILE: &str = "manifold_certificate.json";
pub const CONNECTION_FILE: &str = "connection.json";
pub const FAILURE_FILE: &str = "failure.json";

/// What went wrong, and whether it counts as a failed proof.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{stage}: validation failed: {message}")]
    Failed {
        stage: Stage,
        message: String,
        report: serde_json::Value,
    },
    #[error("{stage}: {message}")]
    Operational { stage: Stage, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl PipelineError {
    /// 2 for a failed validation, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Failed { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Equilibrium,
    Eigen,
    Morse,
    Manifold,
    Validate,
    Connect,
    Figures,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Equilibrium => "equilibrium",
            Stage::Eigen => "eigen",
            Stage::Morse => "morse",
            Stage::Manifold => "manifold",
            Stage::Validate => "validate",
            Stage::Connect => "connect",
            Stage::Figures => "figures",
        };
        f.write_str(s)
    }
}

fn failed(stage: Stage, message: String, report: serde_json::Value) -> PipelineError {
    PipelineError::Failed {
        stage,
        message,
        report,
    }
}

fn operational(stage: Stage, e: impl fmt::Display) -> PipelineError {
    PipelineError::Operational {
        stage,
        message: e.to_string(),
    }
}

fn from_fisher(stage: Stage, e: FisherError) -> PipelineError {
    match &e {
        FisherError::NotValidated { bounds, .. } => failed(
            stage,
            e.to_string(),
            serde_json::json!({ "dominant": bounds.dominant(), "bounds": bounds }),
        ),
        FisherError::NoConvergence { .. } | FisherError::Singular { .. } => {
            failed(stage, e.to_string(), serde_json::json!({ "cause": e.to_string() }))
        }
        _ => operational(stage, e),
    }
}

fn from_eigen(stage: Stage, e: EigenError) -> PipelineError {
    match &e {
        EigenError::NotValidated { bounds, .. } => {
            failed(stage, e.to_string(), serde_json::json!({ "bounds": bounds }))
        }
        EigenError::MorseFailed { .. }
        | EigenError::Inconsistent { .. }
        | EigenError::NotHyperbolic(_)
        | EigenError::IllConditioned(_) => {
            failed(stage, e.to_string(), serde_json::json!({ "cause": e.to_string() }))
        }
        _ => operational(stage, e),
    }
}

fn from_manifold(stage: Stage, e: ManifoldError) -> PipelineError {
    match &e {
        ManifoldError::Resonant { .. } | ManifoldError::NearResonance { .. } | ManifoldError::NotUnstable(_) => {
            failed(stage, e.to_string(), serde_json::json!({ "cause": e.to_string() }))
        }
        _ => operational(stage, e),
    }
}

fn from_validation(e: ValidationError) -> PipelineError {
    match e {
        ValidationError::NotValidated {
            ref dominant,
            ref bounds,
            ..
        } => failed(
            Stage::Validate,
            e.to_string(),
            serde_json::json!({ "dominant": dominant, "bounds": bounds }),
        ),
        ValidationError::TailGap(_) => failed(
            Stage::Validate,
            e.to_string(),
            serde_json::json!({ "cause": e.to_string() }),
        ),
        ValidationError::Manifold(m) => from_manifold(Stage::Validate, m),
        other => operational(Stage::Validate, other),
    }
}

fn from_orbit(e: OrbitError) -> PipelineError {
    match &e {
        OrbitError::NotAttracted { distance } => failed(
            Stage::Connect,
            e.to_string(),
            serde_json::json!({ "distance": distance }),
        ),
        OrbitError::MorseMismatch { .. } | OrbitError::NonConstant(_) => {
            failed(Stage::Connect, e.to_string(), serde_json::json!({ "cause": e.to_string() }))
        }
        _ => operational(Stage::Connect, e),
    }
}

/// Where the manifold is attached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// A nontrivial equilibrium found by Newton's method from `init`.
    Equilibrium,
    /// The trivial equilibrium, with exact linear data.
    Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scalings {
    Auto,
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThetaSpec {
    /// Grid search for the point nearest the sink.
    Search,
    Explicit(Vec<String>),
}

/// A parsed run description. Decimal fields are stored verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub alpha: String,
    pub c: String,
    pub nu: String,
    pub k_max: usize,
    pub order: Vec<usize>,
    pub d: usize,
    pub source: Source,
    pub init: Vec<String>,
    pub scalings: Scalings,
    /// Target `|p_M|_ν` for automatic scalings.
    pub scaling_target: String,
    pub theta: Option<ThetaSpec>,
    pub theta_grid: usize,
    pub polish: bool,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            alpha: "2.1".into(),
            c: "poisson:0.2".into(),
            nu: "1.1".into(),
            k_max: 20,
            order: vec![60],
            d: 1,
            source: Source::Equilibrium,
            init: vec!["0.25".into(), "0.25".into()],
            scalings: Scalings::Auto,
            scaling_target: "1e-14".into(),
            theta: None,
            theta_grid: 401,
            polish: false,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn decimal(key: &str, v: &str) -> Result<Interval, PipelineError> {
    Interval::from_decimal(v.trim()).map_err(|e| PipelineError::Config(format!("{key}: {e}")))
}

fn integer(key: &str, v: &str) -> Result<usize, PipelineError> {
    v.trim()
        .parse()
        .map_err(|_| PipelineError::Config(format!("{key}: expected a nonnegative integer, got {v:?}")))
}

impl PipelineConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let mut cfg = PipelineConfig::default();
        let mut saw_d = false;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key = value", no + 1)))?;
            if k.trim() == "d" {
                saw_d = true;
            }
            cfg.set(k.trim(), v.trim())?;
        }
        if !saw_d {
            cfg.d = cfg.order.len();
        }
        cfg.check()?;
        Ok(cfg)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), PipelineError> {
        match key {
            "alpha" => {
                decimal(key, v)?;
                self.alpha = v.into();
            }
            "c" | "c_spec" => {
                v.parse::<CSpec>().map_err(|e| PipelineError::Config(e.to_string()))?;
                self.c = v.into();
            }
            "nu" => {
                decimal(key, v)?;
                self.nu = v.into();
            }
            "K" => self.k_max = integer(key, v)?,
            "M" => {
                self.order = list(v).iter().map(|s| integer(key, s)).collect::<Result<_, _>>()?;
            }
            "d" => self.d = integer(key, v)?,
            "source" => {
                self.source = match v {
                    "equilibrium" => Source::Equilibrium,
                    "origin" => Source::Origin,
                    _ => return Err(PipelineError::Config(format!("source: unknown value {v:?}"))),
                }
            }
            "init" => {
                let vals = list(v);
                for s in &vals {
                    decimal(key, s)?;
                }
                self.init = vals;
            }
            "scalings" => {
                self.scalings = if v == "auto" {
                    Scalings::Auto
                } else {
                    let vals = list(v);
                    for s in &vals {
                        decimal(key, s)?;
                    }
                    Scalings::Explicit(vals)
                }
            }
            "scaling_target" => {
                decimal(key, v)?;
                self.scaling_target = v.into();
            }
            "theta" => {
                self.theta = match v {
                    "none" | "" => None,
                    "search" | "auto" => Some(ThetaSpec::Search),
                    _ => {
                        let vals = list(v);
                        for s in &vals {
                            decimal(key, s)?;
                        }
                        Some(ThetaSpec::Explicit(vals))
                    }
                }
            }
            "theta_grid" => self.theta_grid = integer(key, v)?,
            "polish" => {
                self.polish = v
                    .parse()
                    .map_err(|_| PipelineError::Config(format!("polish: expected true or false, got {v:?}")))?
            }
            "output_dir" => self.output_dir = PathBuf::from(v),
            _ => return Err(PipelineError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn check(&self) -> Result<(), PipelineError> {
        if !(1..=2).contains(&self.d) {
            return Err(PipelineError::Config(format!("d must be 1 or 2, got {}", self.d)));
        }
        if self.order.len() == 1 && self.d == 2 {
            return Err(PipelineError::Config("M needs two components when d = 2".into()));
        }
        if self.order.len() != self.d {
            return Err(PipelineError::Config(format!(
                "M has {} components but d = {}",
                self.order.len(),
                self.d
            )));
        }
        if let Scalings::Explicit(s) = &self.scalings {
            if s.len() != self.d {
                return Err(PipelineError::Config(format!("{} scalings for d = {}", s.len(), self.d)));
            }
        }
        if let Some(ThetaSpec::Explicit(t)) = &self.theta {
            if t.len() != self.d {
                return Err(PipelineError::Config(format!("theta has {} components for d = {}", t.len(), self.d)));
            }
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<FisherProblem, PipelineError> {
        let spec: CSpec = self.c.parse().map_err(|e: FisherError| PipelineError::Config(e.to_string()))?;
        FisherProblem::new(decimal("alpha", &self.alpha)?, spec, self.k_max, decimal("nu", &self.nu)?)
            .map_err(|e| PipelineError::Config(e.to_string()))
    }

    fn init_guess(&self) -> Result<Vec<f64>, PipelineError> {
        self.init.iter().map(|s| Ok(decimal("init", s)?.mid())).collect()
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.output_dir.join(file)
    }
}

/// A certificate file: schema tag, version, stage and payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    pub schema_version: u32,
    pub stage: Stage,
    pub config: PipelineConfig,
    pub payload: T,
}

impl<T> Envelope<T> {
    pub fn new(stage: Stage, config: &PipelineConfig, payload: T) -> Self {
        Envelope {
            schema: "parm-certificate".into(),
            schema_version: SCHEMA_VERSION,
            stage,
            config: config.clone(),
            payload,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|source| PipelineError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, text).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| PipelineError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads an envelope and checks its schema version.
pub fn read_envelope<T: DeserializeOwned>(path: &Path) -> Result<Envelope<T>, PipelineError> {
    let env: Envelope<T> = read_json(path)?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(PipelineError::Config(format!(
            "{}: schema version {} is not supported (expected {SCHEMA_VERSION})",
            path.display(),
            env.schema_version
        )));
    }
    Ok(env)
}

fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn equilibrium(cfg: &PipelineConfig) -> Result<EquilibriumCertificate, PipelineError> {
    let prob = cfg.problem()?;
    let guess = match cfg.source {
        Source::Origin => vec![0.0],
        Source::Equilibrium => prob
            .newton_equilibrium(&cfg.init_guess()?)
            .map_err(|e| from_fisher(Stage::Equilibrium, e))?,
    };
    prob.validate_equilibrium(&guess)
        .map_err(|e| from_fisher(Stage::Equilibrium, e))
}

/// Validates the `d` leading eigenpairs.
pub fn eigenpairs(cfg: &PipelineConfig, eq: &EquilibriumCertificate) -> Result<Vec<EigenpairCertificate>, PipelineError> {
    let prob = &eq.problem;
    let eigs = eigen::approx_eigs(&prob.dg_matrix(&eq.a_bar)).map_err(|e| from_eigen(Stage::Eigen, e))?;
    let unstable: Vec<&(f64, Vec<f64>)> = eigs.iter().filter(|e| e.0 > 0.0).collect();
    if unstable.len() < cfg.d {
        return Err(failed(
            Stage::Eigen,
            format!("found {} unstable eigenvalues, need {}", unstable.len(), cfg.d),
            serde_json::json!({ "eigenvalues": eigs.iter().map(|e| e.0).collect::<Vec<_>>() }),
        ));
    }
    unstable
        .iter()
        .take(cfg.d)
        .map(|(l, v)| eigen::validate_eigenpair(prob, eq, *l, v).map_err(|e| from_eigen(Stage::Eigen, e)))
        .collect()
}

pub fn morse(
    cfg: &PipelineConfig,
    eq: &EquilibriumCertificate,
    eigs: &[EigenpairCertificate],
) -> Result<MorseCertificate, PipelineError> {
    let mc = eigen::verify_morse_index(&eq.problem, eq, eigs).map_err(|e| from_eigen(Stage::Morse, e))?;
    if mc.m != cfg.d {
        return Err(failed(
            Stage::Morse,
            format!("Morse index {} differs from the requested manifold dimension {}", mc.m, cfg.d),
            serde_json::json!({ "m": mc.m, "d": cfg.d }),
        ));
    }
    Ok(mc)
}

fn linear_data(
    cfg: &PipelineConfig,
    eq: &EquilibriumCertificate,
    eigs: &[EigenpairCertificate],
    scalings: Vec<Interval>,
) -> Result<LinearData, PipelineError> {
    match cfg.source {
        Source::Origin => LinearData::origin(&eq.problem, cfg.d, scalings),
        Source::Equilibrium => LinearData::from_certificates(eq, eigs, scalings),
    }
    .map_err(|e| from_manifold(Stage::Manifold, e))
}

pub fn manifold(
    cfg: &PipelineConfig,
    eq: &EquilibriumCertificate,
    eigs: &[EigenpairCertificate],
    exec: Exec,
) -> Result<ManifoldApprox, PipelineError> {
    let prob = &eq.problem;
    let unit = linear_data(cfg, eq, eigs, vec![Interval::ONE; cfg.d])?;
    let scalings = match &cfg.scalings {
        Scalings::Explicit(s) => s.iter().map(|x| decimal("scalings", x)).collect::<Result<_, _>>()?,
        Scalings::Auto => {
            let target = decimal("scaling_target", &cfg.scaling_target)?.mid();
            manifold::auto_scalings(&unit, prob, &cfg.order, target, exec)
                .map_err(|e| from_manifold(Stage::Manifold, e))?
        }
    };
    let lin = unit.with_scalings(scalings);
    let approx = manifold::solve_homological(&lin, prob, &cfg.order, exec).map_err(|e| from_manifold(Stage::Manifold, e))?;
    if cfg.polish {
        return manifold::newton_polish(&approx).map_err(|e| from_manifold(Stage::Manifold, e));
    }
    Ok(approx)
}

pub fn validate(approx: &ManifoldApprox, exec: Exec) -> Result<ManifoldCertificate, PipelineError> {
    manifold_validation::validate_manifold(approx, exec).map_err(from_validation)
}

pub fn connect(
    cfg: &PipelineConfig,
    cert: &ManifoldCertificate,
    morse: Option<&MorseCertificate>,
    exec: Exec,
) -> Result<ConnectionCertificate, PipelineError> {
    let theta: Vec<Interval> = match cfg.theta.as_ref().unwrap_or(&ThetaSpec::Search) {
        ThetaSpec::Explicit(t) => t.iter().map(|x| decimal("theta", x)).collect::<Result<_, _>>()?,
        ThetaSpec::Search => {
            let (best, _) = orbit::search_theta(&cert.approx, cfg.theta_grid, exec);
            best.into_iter().map(Interval::point).collect()
        }
    };
    orbit::prove_connection(cert, morse, &theta).map_err(from_orbit)
}

/// Everything a full run produced.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub equilibrium: EquilibriumCertificate,
    pub eigen: Vec<EigenpairCertificate>,
    pub morse: MorseCertificate,
    pub manifold: ManifoldCertificate,
    pub connection: Option<ConnectionCertificate>,
}

/// Runs every stage, writing each certificate under `output_dir`. A failing
/// stage writes `failure.json` with its report and stops the run.
pub fn run_pipeline(cfg: &PipelineConfig, exec: Exec) -> Result<PipelineOutcome, PipelineError> {
    let res = run_stages(cfg, exec);
    if let Err(PipelineError::Failed { stage, message, report }) = &res {
        write_json(
            &cfg.path(FAILURE_FILE),
            &Envelope::new(
                *stage,
                cfg,
                serde_json::json!({ "message": message, "report": report }),
            ),
        )?;
    }
    res
}

fn run_stages(cfg: &PipelineConfig, exec: Exec) -> Result<PipelineOutcome, PipelineError> {
    let eq = equilibrium(cfg)?;
    write_json(&cfg.path(EQUILIBRIUM_FILE), &Envelope::new(Stage::Equilibrium, cfg, &eq))?;
    let eigs = eigenpairs(cfg, &eq)?;
    write_json(&cfg.path(EIGEN_FILE), &Envelope::new(Stage::Eigen, cfg, &eigs))?;
    let mc = morse(cfg, &eq, &eigs)?;
    write_json(&cfg.path(MORSE_FILE), &Envelope::new(Stage::Morse, cfg, &mc))?;
    let approx = manifold(cfg, &eq, &eigs, exec)?;
    write_manifold(cfg, &approx)?;
    let cert = validate(&approx, exec)?;
    write_json(&cfg.path(CERTIFICATE_FILE), &Envelope::new(Stage::Validate, cfg, &cert))?;
    let connection = match cfg.theta {
        Some(_) => {
            let cc = connect(cfg, &cert, Some(&mc), exec)?;
            write_connection(cfg, &cc)?;
            Some(cc)
        }
        None => None,
    };
    Ok(PipelineOutcome {
        equilibrium: eq,
        eigen: eigs,
        morse: mc,
        manifold: cert,
        connection,
    })
}

/// Writes the coefficient file and its decay profile.
pub fn write_manifold(cfg: &PipelineConfig, approx: &ManifoldApprox) -> Result<(), PipelineError> {
    write_json(&cfg.path(MANIFOLD_FILE), &Envelope::new(Stage::Manifold, cfg, approx))?;
    write_text(&cfg.path("decay.csv"), &decay_csv(approx))
}

/// Writes the connection certificate and its trajectory.
pub fn write_connection(cfg: &PipelineConfig, cc: &ConnectionCertificate) -> Result<(), PipelineError> {
    write_json(&cfg.path(CONNECTION_FILE), &Envelope::new(Stage::Connect, cfg, cc))?;
    let theta: Vec<f64> = cc.theta.iter().map(|t| t.mid()).collect();
    write_text(&cfg.path("trajectory.csv"), &trajectory_csv(&cc.source_cert.approx, &theta)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureKind {
    Decay,
    Surface,
    Trajectory,
    Eigenfunction,
}

impl std::str::FromStr for FigureKind {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "decay" => Ok(FigureKind::Decay),
            "surface" => Ok(FigureKind::Surface),
            "trajectory" => Ok(FigureKind::Trajectory),
            "eigenfunction" => Ok(FigureKind::Eigenfunction),
            _ => Err(PipelineError::Config(format!(
                "unknown figure kind {s:?}; expected decay, surface, trajectory or eigenfunction"
            ))),
        }
    }
}

const X_POINTS: usize = 65;

/// `(m, |p_m|_ν)` rows.
pub fn decay_csv(approx: &ManifoldApprox) -> String {
    let nu = approx.problem.nu.mid();
    let mut out = format!("# coefficient norms |p_m|_nu, nu = {nu}\n");
    out.push_str(&approx.p.decay_csv());
    out
}

/// `(θ, x, u)` for `d = 1`, or `(θ₁, θ₂, a₀, a₁, a₂)` for `d = 2`.
pub fn surface_csv(approx: &ManifoldApprox, points: usize) -> String {
    let points = points.max(2);
    let node = |i: usize| -1.0 + 2.0 * i as f64 / (points - 1) as f64;
    let mut out = String::new();
    match approx.linear.dim() {
        1 => {
            out.push_str("# u(x) on the chart, theta in [-1, 1], x in [0, pi]\ntheta,x,u\n");
            for i in 0..points {
                let a = approx.eval_f64(&[node(i)]);
                for j in 0..X_POINTS {
                    let x = std::f64::consts::PI * j as f64 / (X_POINTS - 1) as f64;
                    out.push_str(&format!("{},{x},{}\n", node(i), eval_cosine(&a, x)));
                }
            }
        }
        _ => {
            out.push_str("# leading cosine coefficients on the chart, theta in [-1, 1]^2\ntheta1,theta2,a0,a1,a2\n");
            for i in 0..points {
                for j in 0..points {
                    let a = approx.eval_f64(&[node(i), node(j)]);
                    let at = |k: usize| a.get(k).copied().unwrap_or(0.0);
                    out.push_str(&format!("{},{},{},{},{}\n", node(i), node(j), at(0), at(1), at(2)));
                }
            }
        }
    }
    out
}

/// Backward flow from `P(θ₀)` over `t ∈ [−1, 0]`, as `(t, x, u)` rows.
pub fn trajectory_csv(approx: &ManifoldApprox, theta0: &[f64]) -> Result<String, PipelineError> {
    let times: Vec<f64> = (0..=40).map(|i| -1.0 + i as f64 / 40.0).collect();
    let samples = orbit::flow_trace(approx, theta0, &times).map_err(|e| operational(Stage::Figures, e))?;
    Ok(format!(
        "# backward flow on the chart from theta0 = {theta0:?}, x in [0, pi]\n{}",
        orbit::trajectory_csv(&times, &samples, X_POINTS)
    ))
}

/// `(x, ξ₁(x), …)` for the validated eigenvectors.
pub fn eigenfunction_csv(eigs: &[EigenpairCertificate]) -> String {
    let mut out = String::from("# eigenfunctions on [0, pi], unit nu-norm\nx");
    for j in 0..eigs.len() {
        out.push_str(&format!(",xi{}", j + 1));
    }
    out.push('\n');
    let rows: Vec<Vec<f64>> = eigs.iter().map(|e| e.xi_bar.mid()).collect();
    for j in 0..X_POINTS {
        let x = std::f64::consts::PI * j as f64 / (X_POINTS - 1) as f64;
        out.push_str(&format!("{x}"));
        for r in &rows {
            out.push_str(&format!(",{}", eval_cosine(r, x)));
        }
        out.push('\n');
    }
    out
}

/// Writes `<kind>.csv` from certificates already in `output_dir`.
pub fn emit_figure_data(cfg: &PipelineConfig, kind: FigureKind) -> Result<PathBuf, PipelineError> {
    let need = |file: &str| {
        let p = cfg.path(file);
        if p.exists() {
            Ok(p)
        } else {
            Err(operational(
                Stage::Figures,
                format!("missing upstream certificate {}", p.display()),
            ))
        }
    };
    let (name, text) = match kind {
        FigureKind::Decay => {
            let env: Envelope<ManifoldApprox> = read_envelope(&need(MANIFOLD_FILE)?)?;
            ("decay.csv", decay_csv(&env.payload))
        }
        FigureKind::Surface => {
            let env: Envelope<ManifoldApprox> = read_envelope(&need(MANIFOLD_FILE)?)?;
            ("surface.csv", surface_csv(&env.payload, 41))
        }
        FigureKind::Trajectory => {
            let env: Envelope<ManifoldApprox> = read_envelope(&need(MANIFOLD_FILE)?)?;
            let theta0 = vec![0.9; env.payload.linear.dim()];
            ("trajectory.csv", trajectory_csv(&env.payload, &theta0)?)
        }
        FigureKind::Eigenfunction => {
            let env: Envelope<Vec<EigenpairCertificate>> = read_envelope(&need(EIGEN_FILE)?)?;
            ("eigenfunction.csv", eigenfunction_csv(&env.payload))
        }
    };
    let path = cfg.path(name);
    write_text(&path, &text)?;
    Ok(path)
}
