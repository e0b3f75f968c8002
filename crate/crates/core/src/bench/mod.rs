//! Parametric studies: one of optimizer / entanglement pattern / depth
//! varies while the other two stay fixed, over a range of qubit counts,
//! each point scored against the classical eigensolver.

mod pipeline;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fem::{CaseKind, CaseOptions, FemError, FemModel};
use crate::hamiltonian::HamiltonianError;
use crate::matrixio::{parse_matrix, BoundarySet, MatrixIoError};
use crate::quantum::{build_ansatz, Entangler, MAX_DEPTH, MAX_QUBITS};
use crate::vqe::{run_vqe, OptimizerKind, Shots, StopReason, VqeConfig, VqeError};

pub use pipeline::{hamiltonian_hash, prepare_case, prepare_matrices, prepare_model, Problem};
pub use report::{emit_report, parse_csv, report_csv, report_json, CSV_COLUMNS};

/// Qubit counts swept when the config names none.
pub const DEFAULT_QUBITS: [u32; 3] = [3, 4, 5];
/// Largest qubit count accepted without `full`.
pub const CI_MAX_QUBITS: u32 = 6;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("reference eigenvalue {0} is not positive")]
    NonpositiveReference(f64),
    #[error("statistics of an empty list")]
    EmptyList,
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    MatrixIo(#[from] MatrixIoError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Vqe(#[from] VqeError),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.to_path_buf(), source }
}

/// `|λ_q − λ_c| / λ_c`, in percent.
pub fn percentage_error(lambda_q: f64, lambda_c: f64) -> Result<f64, BenchError> {
    if !(lambda_c > 0.0) {
        return Err(BenchError::NonpositiveReference(lambda_c));
    }
    Ok((lambda_q - lambda_c).abs() / lambda_c * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    /// Mean error.
    pub me: f64,
    /// Sample standard deviation; absent for a single value.
    pub sde: Option<f64>,
}

pub fn aggregate_stats(errors: &[f64]) -> Result<ErrorStats, BenchError> {
    if errors.is_empty() {
        return Err(BenchError::EmptyList);
    }
    let n = errors.len() as f64;
    let me = errors.iter().sum::<f64>() / n;
    let sde = (errors.len() > 1)
        .then(|| (errors.iter().map(|e| (e - me).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    Ok(ErrorStats { me, sde })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Optimizer,
    Pattern,
    Depth,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Optimizer => "optimizer",
            Self::Pattern => "pattern",
            Self::Depth => "depth",
        }
    }
}

/// Where the structural matrices come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source {
    Case(CaseKind),
    Matrices {
        k: PathBuf,
        m: PathBuf,
        /// A model descriptor or a bare boundary set.
        bc: PathBuf,
        #[serde(default = "unit_scale")]
        eigenvalue_scale: f64,
    },
}

fn unit_scale() -> f64 {
    1.0
}

/// The two settings held constant; the swept one stays unset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Entangler>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(rename = "case")]
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit_range: Option<Vec<u32>>,
    pub axis: Axis,
    /// Axis values; the full menu of the axis when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<serde_json::Value>>,
    #[serde(default)]
    pub fixed: FixedSettings,
    /// Template for every run; its optimizer is replaced per point.
    #[serde(default)]
    pub vqe: VqeConfig,
    #[serde(default)]
    pub case_options: CaseOptions,
    /// Repetitions per point with seeds `seed, seed+1, …`.
    #[serde(default = "one")]
    pub trials: usize,
    /// Lifts the qubit cap and widens the default range to the simulator limit.
    #[serde(default)]
    pub full: bool,
    /// Fill the CSV `wall_ms` column (makes the CSV run-dependent).
    #[serde(default)]
    pub timing: bool,
    /// Append-only log of finished rows; rows already in it are not re-run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub journal: Option<PathBuf>,
    /// Directory receiving each distinct Hamiltonian as `<hash>.json`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub archive_dir: Option<PathBuf>,
}

fn one() -> usize {
    1
}

/// One run's settings along the swept axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisPoint {
    pub optimizer: OptimizerKind,
    pub pattern: Entangler,
    pub depth: usize,
}

impl AxisPoint {
    pub fn label(&self, axis: Axis) -> String {
        match axis {
            Axis::Optimizer => self.optimizer.to_string(),
            Axis::Pattern => self.pattern.to_string(),
            Axis::Depth => self.depth.to_string(),
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Source::Matrices { k, m, bc, .. } = &mut cfg.source {
            fix(k);
            fix(m);
            fix(bc);
        }
        cfg.journal.as_mut().map(fix);
        cfg.archive_dir.as_mut().map(fix);
        Ok(cfg)
    }

    pub fn qubits(&self) -> Result<Vec<u32>, BenchError> {
        let q = match &self.qubit_range {
            Some(q) => q.clone(),
            None if self.full => (2..=MAX_QUBITS).collect(),
            None => DEFAULT_QUBITS.to_vec(),
        };
        if q.is_empty() {
            return Err(BenchError::Config("qubit_range is empty".into()));
        }
        for &n in &q {
            if n == 0 || n > MAX_QUBITS {
                return Err(BenchError::Config(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
            }
            if n > CI_MAX_QUBITS && !self.full {
                return Err(BenchError::Config(format!("qubit count {n} exceeds {CI_MAX_QUBITS}; enable `full`")));
            }
        }
        Ok(q)
    }

    /// Expands the axis over the fixed pair.
    pub fn points(&self) -> Result<Vec<AxisPoint>, BenchError> {
        let f = &self.fixed;
        let set = [f.optimizer.is_some(), f.pattern.is_some(), f.depth.is_some()];
        let axis_idx = self.axis as usize;
        if set[axis_idx] {
            return Err(BenchError::Config(format!("`fixed.{}` conflicts with the swept axis", self.axis.as_str())));
        }
        if let Some((i, _)) = set.iter().enumerate().find(|&(i, s)| i != axis_idx && !s) {
            let name = ["optimizer", "pattern", "depth"][i];
            return Err(BenchError::Config(format!("`fixed.{name}` is required when sweeping {}", self.axis.as_str())));
        }
        let parse_err = |v: &serde_json::Value| BenchError::Config(format!("bad {} value {v}", self.axis.as_str()));
        let text = |v: &serde_json::Value| v.as_str().map(str::to_owned).unwrap_or_else(|| v.to_string());
        let base = AxisPoint {
            optimizer: f.optimizer.unwrap_or(OptimizerKind::Lbfgsb),
            pattern: f.pattern.unwrap_or(Entangler::Cx),
            depth: f.depth.unwrap_or(1),
        };
        let points: Vec<AxisPoint> = match (self.axis, &self.values) {
            (Axis::Optimizer, None) => OptimizerKind::ALL.iter().map(|&o| AxisPoint { optimizer: o, ..base }).collect(),
            (Axis::Pattern, None) => Entangler::ALL.iter().map(|&p| AxisPoint { pattern: p, ..base }).collect(),
            (Axis::Depth, None) => (1..=MAX_DEPTH).map(|d| AxisPoint { depth: d, ..base }).collect(),
            (Axis::Optimizer, Some(vs)) => vs
                .iter()
                .map(|v| text(v).parse().map(|o| AxisPoint { optimizer: o, ..base }).map_err(|_| parse_err(v)))
                .collect::<Result<_, _>>()?,
            (Axis::Pattern, Some(vs)) => vs
                .iter()
                .map(|v| text(v).parse().map(|p| AxisPoint { pattern: p, ..base }).map_err(|_| parse_err(v)))
                .collect::<Result<_, _>>()?,
            (Axis::Depth, Some(vs)) => vs
                .iter()
                .map(|v| {
                    let d = v.as_u64().or_else(|| v.as_str().and_then(|s| s.parse().ok())).ok_or_else(|| parse_err(v))?;
                    Ok(AxisPoint { depth: d as usize, ..base })
                })
                .collect::<Result<_, BenchError>>()?,
        };
        if points.is_empty() {
            return Err(BenchError::Config("no axis values".into()));
        }
        if let Some(p) = points.iter().find(|p| !(1..=MAX_DEPTH).contains(&p.depth)) {
            return Err(BenchError::Config(format!("depth {} outside 1..={MAX_DEPTH}", p.depth)));
        }
        let unique: BTreeSet<String> = points.iter().map(|p| p.label(self.axis)).collect();
        if unique.len() != points.len() {
            return Err(BenchError::Config("repeated axis value".into()));
        }
        Ok(points)
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.trials == 0 {
            return Err(BenchError::Config("trials must be at least 1".into()));
        }
        self.vqe.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub case: String,
    #[serde(rename = "N")]
    pub n_qubits: u32,
    pub optimizer: OptimizerKind,
    pub pattern: Entangler,
    pub depth: usize,
    pub shots: Shots,
    pub seed: u64,
    pub trial: usize,
    pub lambda_c: Option<f64>,
    pub lambda_q: Option<f64>,
    pub error_ratio: Option<f64>,
    pub error_pct: Option<f64>,
    pub evaluations: Option<usize>,
    pub converged: Option<bool>,
    pub stop_reason: Option<StopReason>,
    pub wall_ms: Option<f64>,
    pub hamiltonian_sha256: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub axis: Axis,
    pub value: String,
    /// Successful rows behind the statistics.
    pub rows: usize,
    pub me: Option<f64>,
    pub sde: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<Aggregate>,
}

impl SweepReport {
    fn aggregate(config: SweepConfig, rows: Vec<SweepRow>, points: &[AxisPoint]) -> Self {
        let aggregates = points
            .iter()
            .map(|p| {
                let value = p.label(config.axis);
                let errs: Vec<f64> = rows
                    .iter()
                    .filter(|r| {
                        let rp = AxisPoint { optimizer: r.optimizer, pattern: r.pattern, depth: r.depth };
                        rp.label(config.axis) == value
                    })
                    .filter_map(|r| r.error_pct)
                    .collect();
                let stats = aggregate_stats(&errs).ok();
                Aggregate {
                    axis: config.axis,
                    value,
                    rows: errs.len(),
                    me: stats.map(|s| s.me),
                    sde: stats.and_then(|s| s.sde),
                }
            })
            .collect();
        Self { config, rows, aggregates }
    }
}

struct Job {
    index: usize,
    n_qubits: u32,
    point: AxisPoint,
    trial: usize,
}

impl Job {
    /// Journal identity: the run coordinates plus everything that changes
    /// its outcome, so an edited config never reuses a stale row.
    fn key(&self, cfg: &SweepConfig, hash: Option<&str>) -> String {
        let seed = cfg.vqe.seed.wrapping_add(self.trial as u64);
        let p = &self.point;
        format!("{}/{}/{}/{}/{}/{}/{seed}/{}", self.n_qubits, p.optimizer, p.pattern, p.depth, self.trial, cfg.vqe.shots, hash.unwrap_or("-"))
    }
}

fn row_key(r: &SweepRow) -> String {
    let hash = r.hamiltonian_sha256.as_deref().unwrap_or("-");
    format!("{}/{}/{}/{}/{}/{}/{}/{hash}", r.n_qubits, r.optimizer, r.pattern, r.depth, r.trial, r.shots, r.seed)
}

fn load_source(cfg: &SweepConfig, n: u32) -> Result<(String, Problem), BenchError> {
    match &cfg.source {
        Source::Case(case) => {
            let (_, p) = prepare_case(*case, n, &cfg.case_options)?;
            Ok((case.to_string(), p))
        }
        Source::Matrices { k, m, bc, eigenvalue_scale } => {
            let read = |p: &Path| -> Result<_, BenchError> {
                Ok(parse_matrix(&fs::read_to_string(p).map_err(io_err(p))?)?)
            };
            let bcs = parse_boundary(&fs::read_to_string(bc).map_err(io_err(bc))?)?;
            let p = prepare_matrices(&read(k)?, &read(m)?, &bcs, *eigenvalue_scale)?;
            Ok(("external".into(), p))
        }
    }
}

/// Boundary conditions from a model descriptor or a bare boundary set.
pub fn parse_boundary(text: &str) -> Result<BoundarySet, BenchError> {
    match FemModel::from_json(text) {
        Ok(model) => Ok(model.bc),
        Err(_) => Ok(serde_json::from_str(text)?),
    }
}

/// Runs the sweep on the global thread pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport, BenchError> {
    run_sweep_inner(cfg)
}

/// Runs the sweep on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(cfg: &SweepConfig, threads: usize) -> Result<SweepReport, BenchError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep_inner(cfg))
}

fn run_sweep_inner(cfg: &SweepConfig) -> Result<SweepReport, BenchError> {
    cfg.validate()?;
    let points = cfg.points()?;
    let qubits = match cfg.source {
        Source::Case(_) => cfg.qubits()?,
        // the matrices fix N; it is read from the first problem below
        Source::Matrices { .. } => vec![0],
    };

    // one problem per qubit count, shared by its rows
    let problems: Vec<(u32, Result<(String, Problem), String>)> = qubits
        .par_iter()
        .map(|&n| (n, load_source(cfg, n).map_err(|e| e.to_string())))
        .collect();
    if let Some(dir) = &cfg.archive_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for (_, p) in &problems {
            if let Ok((_, p)) = p {
                let path = dir.join(format!("{}.json", p.hash));
                fs::write(&path, p.pauli.to_json()).map_err(io_err(&path))?;
            }
        }
    }

    let mut jobs = Vec::new();
    for (qi, (n, prob)) in problems.iter().enumerate() {
        let n = match prob {
            Ok((_, p)) => p.n_qubits(),
            Err(_) => *n,
        };
        for &point in &points {
            for trial in 0..cfg.trials {
                jobs.push((qi, Job { index: jobs.len(), n_qubits: n, point, trial }));
            }
        }
    }

    let done: BTreeMap<String, SweepRow> = match &cfg.journal {
        Some(path) if path.exists() => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            // a torn final line from an interrupted run is ignored
            text.lines()
                .filter_map(|l| serde_json::from_str::<SweepRow>(l).ok())
                .map(|r| (row_key(&r), r))
                .collect()
        }
        _ => BTreeMap::new(),
    };
    let journal = match &cfg.journal {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            let file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err(path))?;
            Some(Mutex::new(file))
        }
        None => None,
    };

    let mut rows: Vec<(usize, SweepRow)> = jobs
        .par_iter()
        .map(|(qi, job)| {
            let hash = problems[*qi].1.as_ref().ok().map(|(_, p)| p.hash.as_str());
            if let Some(r) = done.get(&job.key(cfg, hash)) {
                return (job.index, r.clone());
            }
            let row = run_job(cfg, &problems[*qi].1, job);
            if let Some(j) = &journal {
                let line = serde_json::to_string(&row).expect("row serializes");
                let mut f = j.lock().expect("journal lock");
                // best effort: the report still carries the row
                let _ = writeln!(f, "{line}").and_then(|_| f.flush());
            }
            (job.index, row)
        })
        .collect();
    rows.sort_by_key(|(i, _)| *i);
    let rows = rows.into_iter().map(|(_, r)| r).collect();
    Ok(SweepReport::aggregate(cfg.clone(), rows, &points))
}

fn run_job(cfg: &SweepConfig, problem: &Result<(String, Problem), String>, job: &Job) -> SweepRow {
    let start = Instant::now();
    let seed = cfg.vqe.seed.wrapping_add(job.trial as u64);
    let case = match (&cfg.source, problem) {
        (_, Ok((label, _))) => label.clone(),
        (Source::Case(c), _) => c.to_string(),
        (Source::Matrices { .. }, _) => "external".into(),
    };
    let mut row = SweepRow {
        case,
        n_qubits: job.n_qubits,
        optimizer: job.point.optimizer,
        pattern: job.point.pattern,
        depth: job.point.depth,
        shots: cfg.vqe.shots,
        seed,
        trial: job.trial,
        lambda_c: None,
        lambda_q: None,
        error_ratio: None,
        error_pct: None,
        evaluations: None,
        converged: None,
        stop_reason: None,
        wall_ms: None,
        hamiltonian_sha256: None,
        error: None,
    };
    let p = match problem {
        Ok((_, p)) => p,
        Err(e) => {
            row.error = Some(e.clone());
            return row;
        }
    };
    row.lambda_c = Some(p.lambda_c);
    row.hamiltonian_sha256 = Some(p.hash.clone());
    let outcome = (|| -> Result<(), BenchError> {
        let ansatz = build_ansatz(p.n_qubits(), job.point.depth, job.point.pattern).map_err(VqeError::from)?;
        let vcfg = VqeConfig { optimizer: job.point.optimizer, seed, ..cfg.vqe.clone() };
        let r = run_vqe(&p.pauli, &ansatz, &vcfg)?;
        row.lambda_q = Some(r.lambda_q);
        row.evaluations = Some(r.total_evaluations);
        row.converged = Some(r.converged);
        row.stop_reason = Some(r.stop_reason);
        let pct = percentage_error(r.lambda_q, p.lambda_c)?;
        row.error_pct = Some(pct);
        row.error_ratio = Some(pct / 100.0);
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    row
}
