//! The hybrid loop: ansatz energies driven by SPSA, COBYLA or L-BFGS-B under
//! one shared energy-difference stopping rule.
//!
//! Every optimizer reports *accepted* iterates to a [`Monitor`]; the run
//! stops as soon as two consecutive accepted energies differ by less than
//! `tol`. What counts as accepted:
//!
//! * SPSA: one per iteration, the mean of the two perturbed evaluations.
//! * COBYLA: every evaluation that improves on the best point so far.
//! * L-BFGS-B: every point accepted by the line search.
//!
//! The starting point is accepted as iteration 0. When an optimizer's own
//! convergence test fires (trust radius below its floor, vanishing
//! gradient) its final point is accepted once more as a zero-length step.

mod cobyla;
mod lbfgsb;
mod spsa;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::PauliHamiltonian;
use crate::quantum::{
    apply_ansatz_into, expectation_exact, expectation_shots_with, init_state, AnsatzSpec,
    QuantumError, Statevector,
};

pub use cobyla::{cobyla_minimize, CobylaOptions};
pub use lbfgsb::{finite_difference_gradient, lbfgsb_minimize, LbfgsbOptions};
pub use spsa::{spsa_minimize, SpsaOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VqeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("Hamiltonian has {hamiltonian} qubits but the ansatz has {ansatz}")]
    QubitMismatch { hamiltonian: u32, ansatz: u32 },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// `exact` or a positive shot count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shots {
    Exact,
    Count(u64),
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => f.write_str("exact"),
            Self::Count(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for Shots {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Self::Exact);
        }
        match s.parse::<u64>() {
            Ok(k) if k >= 1 => Ok(Self::Count(k)),
            _ => Err(format!("shots must be `exact` or a positive integer, got `{s}`")),
        }
    }
}

impl Serialize for Shots {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Exact => s.serialize_str("exact"),
            Self::Count(k) => s.serialize_u64(*k),
        }
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Count(u64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Raw::Count(0) => Err(serde::de::Error::custom("shots must be at least 1")),
            Raw::Count(k) => Ok(Self::Count(k)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Spsa,
    Cobyla,
    Lbfgsb,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 3] = [OptimizerKind::Spsa, OptimizerKind::Cobyla, OptimizerKind::Lbfgsb];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Spsa => "spsa",
            Self::Cobyla => "cobyla",
            Self::Lbfgsb => "lbfgsb",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OptimizerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        Self::ALL
            .into_iter()
            .find(|o| o.as_str() == norm)
            .ok_or_else(|| format!("unknown optimizer `{s}` (expected spsa, cobyla or lbfgsb)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Zeros on the first restart, seeded uniform `[−π, π]` afterwards.
    Zeros,
    /// Seeded uniform `[−π, π]` on every restart.
    RandomUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    pub spsa: SpsaOptions,
    pub cobyla: CobylaOptions,
    pub lbfgsb: LbfgsbOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VqeConfig {
    pub tol: f64,
    /// Optimizer iterations (COBYLA: function evaluations).
    pub maxiter: usize,
    pub shots: Shots,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub options: OptimizerOptions,
    pub n_restarts: usize,
    pub init: Init,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            maxiter: 100_000,
            shots: Shots::Exact,
            seed: 0,
            optimizer: OptimizerKind::Lbfgsb,
            options: OptimizerOptions::default(),
            n_restarts: 3,
            init: Init::Zeros,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<(), VqeError> {
        if !(self.tol > 0.0) {
            return Err(VqeError::InvalidConfig(format!("tol {} must be positive", self.tol)));
        }
        if self.maxiter == 0 {
            return Err(VqeError::InvalidConfig("maxiter must be at least 1".into()));
        }
        if self.n_restarts == 0 {
            return Err(VqeError::InvalidConfig("n_restarts must be at least 1".into()));
        }
        if self.shots == Shots::Count(0) {
            return Err(VqeError::InvalidConfig("shots must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ToleranceMet,
    MaxiterReached,
    OptimizerInternal,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ToleranceMet => "tolerance_met",
            Self::MaxiterReached => "maxiter_reached",
            Self::OptimizerInternal => "optimizer_internal",
        }
    }
}

/// Settings shared by the three minimizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeConfig {
    pub tol: f64,
    pub maxiter: usize,
    /// Seeds the optimizer's own randomness (SPSA perturbations).
    pub seed: u64,
}

/// Outcome of one minimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    /// The point of the lowest accepted energy.
    pub theta: Vec<f64>,
    pub value: f64,
    /// Accepted `(iteration, energy)` pairs.
    pub history: Vec<(usize, f64)>,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub evaluations: usize,
    pub iterations: usize,
    /// Human-readable detail for internal stops.
    pub message: Option<String>,
}

/// The shared stopping rule, plus best-point bookkeeping.
pub struct Monitor {
    tol: f64,
    history: Vec<(usize, f64)>,
    best: Option<(f64, Vec<f64>)>,
    converged: bool,
}

impl Monitor {
    pub fn new(tol: f64) -> Self {
        Self { tol, history: Vec::new(), best: None, converged: false }
    }

    /// Records an accepted iterate; `true` means stop.
    pub fn accept(&mut self, iteration: usize, energy: f64, theta: &[f64]) -> bool {
        let stop = self
            .history
            .last()
            .is_some_and(|&(_, prev)| (energy - prev).abs() < self.tol);
        self.history.push((iteration, energy));
        if self.best.as_ref().is_none_or(|(b, _)| energy < *b) {
            self.best = Some((energy, theta.to_vec()));
        }
        self.converged = stop;
        stop
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub(crate) fn finish(
        self,
        fallback: &[f64],
        reason: StopReason,
        evaluations: usize,
        iterations: usize,
        message: Option<String>,
    ) -> Minimum {
        let (value, theta) = self.best.unwrap_or((f64::NAN, fallback.to_vec()));
        let stop_reason = if self.converged { StopReason::ToleranceMet } else { reason };
        Minimum {
            theta,
            value,
            history: self.history,
            converged: self.converged,
            stop_reason,
            evaluations,
            iterations,
            message,
        }
    }
}

/// Objective wrapper that counts calls.
pub(crate) struct Counted<F> {
    f: F,
    pub evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    pub fn new(f: F) -> Self {
        Self { f, evaluations: 0 }
    }

    pub fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub lambda: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub evaluations: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub lambda_q: f64,
    pub theta_opt: Vec<f64>,
    /// Accepted `(iteration, energy)` pairs of the winning restart.
    pub energy_history: Vec<(usize, f64)>,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Cost-function calls of the winning restart.
    pub evaluations: usize,
    /// Cost-function calls over all restarts.
    pub total_evaluations: usize,
    pub restart_index: usize,
    pub restarts: Vec<RestartSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Energy evaluator for one ansatz and observable. Shot-mode streams are
/// derived from `(seed, stream_base + evaluation counter)`.
pub struct CostFunction<'a> {
    ansatz: &'a AnsatzSpec,
    pauli: &'a PauliHamiltonian,
    dense: Option<&'a DMatrix<f64>>,
    shots: Shots,
    seed: u64,
    stream_base: u64,
    counter: u64,
    state: Statevector,
}

impl<'a> CostFunction<'a> {
    pub fn new(
        pauli: &'a PauliHamiltonian,
        dense: Option<&'a DMatrix<f64>>,
        ansatz: &'a AnsatzSpec,
        shots: Shots,
        seed: u64,
        stream_base: u64,
    ) -> Result<Self, VqeError> {
        if pauli.n_qubits() != ansatz.n_qubits {
            return Err(VqeError::QubitMismatch { hamiltonian: pauli.n_qubits(), ansatz: ansatz.n_qubits });
        }
        Ok(Self { ansatz, pauli, dense, shots, seed, stream_base, counter: 0, state: init_state(ansatz.n_qubits)? })
    }

    pub fn eval(&mut self, theta: &[f64]) -> Result<f64, VqeError> {
        apply_ansatz_into(self.ansatz, theta, &mut self.state)?;
        let e = match self.shots {
            Shots::Exact => match self.dense {
                Some(m) => expectation_exact(&self.state, m)?,
                None => expectation_exact(&self.state, self.pauli)?,
            },
            Shots::Count(k) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(self.stream_base + self.counter);
                expectation_shots_with(&self.state, self.pauli, k, &mut rng)?
            }
        };
        self.counter += 1;
        Ok(e)
    }
}

/// `⟨ψ(θ)|H|ψ(θ)⟩`, exact or sampled with the stream of `seed`.
pub fn cost(h: &PauliHamiltonian, ansatz: &AnsatzSpec, theta: &[f64], shots: Shots, seed: u64) -> Result<f64, VqeError> {
    CostFunction::new(h, None, ansatz, shots, seed, 0)?.eval(theta)
}

fn minimize(
    kind: OptimizerKind,
    f: impl FnMut(&[f64]) -> f64,
    theta0: &[f64],
    cfg: &MinimizeConfig,
    opts: &OptimizerOptions,
) -> Minimum {
    match kind {
        OptimizerKind::Spsa => spsa_minimize(f, theta0, cfg, &opts.spsa),
        OptimizerKind::Cobyla => cobyla_minimize(f, theta0, cfg, &opts.cobyla),
        OptimizerKind::Lbfgsb => lbfgsb_minimize(f, theta0, cfg, &opts.lbfgsb),
    }
}

/// Runs every restart (concurrently) and keeps the lowest final energy;
/// ties go to the lower restart index.
pub fn run_vqe(h: &PauliHamiltonian, ansatz: &AnsatzSpec, cfg: &VqeConfig) -> Result<VqeResult, VqeError> {
    cfg.validate()?;
    if h.n_qubits() != ansatz.n_qubits {
        return Err(VqeError::QubitMismatch { hamiltonian: h.n_qubits(), ansatz: ansatz.n_qubits });
    }
    // dense path is O(4^N) per evaluation, the Pauli path O(terms · 2^N)
    let dense = match cfg.shots {
        Shots::Exact if h.len() > 2usize.pow(h.n_qubits()) / 4 => h.to_dense_real().ok(),
        _ => None,
    };
    let runs: Vec<Result<Minimum, VqeError>> = (0..cfg.n_restarts)
        .into_par_iter()
        .map(|r| {
            let theta0 = initial_point(ansatz.n_params, r, cfg);
            let mut cf = CostFunction::new(h, dense.as_ref(), ansatz, cfg.shots, cfg.seed, (r as u64) << 40)?;
            let mut failure = None;
            let objective = |x: &[f64]| match cf.eval(x) {
                Ok(e) => e,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            };
            let mcfg = MinimizeConfig { tol: cfg.tol, maxiter: cfg.maxiter, seed: cfg.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) };
            let m = minimize(cfg.optimizer, objective, &theta0, &mcfg, &cfg.options);
            match failure {
                Some(e) => Err(e),
                None => Ok(m),
            }
        })
        .collect();
    let mut mins = Vec::with_capacity(runs.len());
    for r in runs {
        mins.push(r?);
    }
    let restarts: Vec<RestartSummary> = mins
        .iter()
        .enumerate()
        .map(|(restart, m)| RestartSummary {
            restart,
            lambda: m.value,
            converged: m.converged,
            stop_reason: m.stop_reason,
            evaluations: m.evaluations,
            iterations: m.iterations,
        })
        .collect();
    let best = (0..mins.len())
        .min_by(|&a, &b| mins[a].value.total_cmp(&mins[b].value).then(a.cmp(&b)))
        .expect("at least one restart");
    let total_evaluations = mins.iter().map(|m| m.evaluations).sum();
    let m = mins.swap_remove(best);
    Ok(VqeResult {
        lambda_q: m.value,
        theta_opt: m.theta,
        energy_history: m.history,
        converged: m.converged,
        stop_reason: m.stop_reason,
        evaluations: m.evaluations,
        total_evaluations,
        restart_index: best,
        restarts,
        message: m.message,
    })
}

fn initial_point(n: usize, restart: usize, cfg: &VqeConfig) -> Vec<f64> {
    if restart == 0 && cfg.init == Init::Zeros {
        return vec![0.0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX - restart as u64);
    (0..n).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}
