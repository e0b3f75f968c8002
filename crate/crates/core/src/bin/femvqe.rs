use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use femvqe::bench::{
    emit_report, parse_boundary, percentage_error, prepare_matrices, prepare_model, run_sweep, run_sweep_with_threads,
    SweepConfig,
};
use femvqe::fem::{assemble, generate_case, CaseKind, FemModel};
use femvqe::hamiltonian::{min_eig, PauliHamiltonian};
use femvqe::matrixio::{parse_matrix, write_matrix, MatrixFormat};
use femvqe::quantum::{build_ansatz, Entangler};
use femvqe::vqe::{run_vqe, Init, OptimizerKind, Shots, VqeConfig, VqeResult};

#[derive(Parser)]
#[command(name = "femvqe", version, about = "Structural fundamental frequencies by VQE on a statevector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-element model generation.
    Fem {
        #[command(subcommand)]
        command: FemCommand,
    },
    /// Reduce a (K, M) pair to a Pauli Hamiltonian.
    Decompose(DecomposeArgs),
    /// Variational eigensolver runs.
    Vqe {
        #[command(subcommand)]
        command: VqeCommand,
    },
    /// Parametric study over one axis.
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum FemCommand {
    /// Generate a case model with exactly 2^N free DOFs.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Abaqus,
    MatrixMarket,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_with::<CaseKind>)]
    case: CaseKind,
    #[arg(long)]
    qubits: u32,
    #[arg(long)]
    out_k: PathBuf,
    #[arg(long)]
    out_m: PathBuf,
    #[arg(long)]
    out_model: PathBuf,
    #[arg(long, value_enum, default_value = "abaqus")]
    format: Format,
}

#[derive(clap::Args)]
struct DecomposeArgs {
    #[arg(long)]
    k: PathBuf,
    #[arg(long)]
    m: PathBuf,
    /// Model descriptor (its eigenvalue scale applies) or a bare boundary set.
    #[arg(long)]
    bc: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Eigenvalue scale; overrides the model's.
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Subcommand)]
enum VqeCommand {
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    ham: PathBuf,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value = "cx", value_parser = parse_with::<Entangler>)]
    pattern: Entangler,
    #[arg(long, default_value = "lbfgsb", value_parser = parse_with::<OptimizerKind>)]
    optimizer: OptimizerKind,
    #[arg(long, default_value = "exact", value_parser = parse_with::<Shots>)]
    shots: Shots,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    maxiter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Random starts on every restart instead of zeros first.
    #[arg(long)]
    random_init: bool,
    #[arg(long)]
    out: PathBuf,
    /// Also write the ansatz circuit.
    #[arg(long)]
    ansatz_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Allow (and default to) qubit counts up to the simulator limit.
    #[arg(long)]
    full: bool,
    /// Worker threads; the global pool when absent.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_with<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn generate(a: GenerateArgs) -> Result<()> {
    let model = generate_case(a.case, a.qubits)?;
    let (k, m) = assemble(&model)?;
    let format = match a.format {
        Format::Abaqus => MatrixFormat::AbaqusMtx,
        Format::MatrixMarket => MatrixFormat::MatrixMarket,
    };
    write(&a.out_k, &write_matrix(&k, format))?;
    write(&a.out_m, &write_matrix(&m, format))?;
    write(&a.out_model, &model.to_json())?;
    let p = prepare_model(&model)?;
    println!(
        "{}: {} nodes, {} elements, {} DOFs ({} fixed, {} free); lambda_c = {:.12e}",
        a.case,
        model.mesh.nodes.len(),
        model.mesh.elements.len(),
        model.n_all_dof,
        model.n_fixed_dof,
        model.n_free_dof,
        p.lambda_c
    );
    Ok(())
}

fn decompose(a: DecomposeArgs) -> Result<()> {
    let k = parse_matrix(&read(&a.k)?).with_context(|| format!("parsing {}", a.k.display()))?;
    let m = parse_matrix(&read(&a.m)?).with_context(|| format!("parsing {}", a.m.display()))?;
    let bc_text = read(&a.bc)?;
    let bc = parse_boundary(&bc_text)?;
    let scale = a.scale.or_else(|| FemModel::from_json(&bc_text).ok().map(|m| m.eigenvalue_scale)).unwrap_or(1.0);
    let p = prepare_matrices(&k, &m, &bc, scale)?;
    write(&a.out, &p.pauli.to_json())?;
    println!(
        "{} qubits, {} Pauli terms, lambda_c = {:.12e} (scale {scale:e}), sha256 {}",
        p.n_qubits(),
        p.pauli.len(),
        p.lambda_c,
        p.hash
    );
    Ok(())
}

#[derive(Serialize)]
struct RunEcho<'a> {
    ham: &'a Path,
    depth: usize,
    pattern: Entangler,
    n_params: usize,
    vqe: &'a VqeConfig,
}

#[derive(Serialize)]
struct RunOutput<'a> {
    #[serde(flatten)]
    result: &'a VqeResult,
    lambda_c: Option<f64>,
    error_pct: Option<f64>,
    config: RunEcho<'a>,
}

fn vqe_run(a: RunArgs) -> Result<()> {
    let h = PauliHamiltonian::from_json(&read(&a.ham)?).with_context(|| format!("parsing {}", a.ham.display()))?;
    let ansatz = build_ansatz(h.n_qubits(), a.depth, a.pattern)?;
    let cfg = VqeConfig {
        tol: a.tol,
        maxiter: a.maxiter,
        shots: a.shots,
        seed: a.seed,
        optimizer: a.optimizer,
        n_restarts: a.restarts,
        init: if a.random_init { Init::RandomUniform } else { Init::Zeros },
        ..Default::default()
    };
    let r = run_vqe(&h, &ansatz, &cfg)?;
    let lambda_c = h.to_dense_real().ok().and_then(|d| min_eig(&d).ok()).map(|(l, _)| l);
    let error_pct = lambda_c.and_then(|lc| percentage_error(r.lambda_q, lc).ok());
    let out = RunOutput {
        result: &r,
        lambda_c,
        error_pct,
        config: RunEcho { ham: &a.ham, depth: a.depth, pattern: a.pattern, n_params: ansatz.n_params, vqe: &cfg },
    };
    write(&a.out, &serde_json::to_string_pretty(&out)?)?;
    if let Some(p) = &a.ansatz_out {
        write(p, &ansatz.to_json())?;
    }
    print!("lambda_q = {:.12e} ({}, {} evaluations", r.lambda_q, r.stop_reason.as_str(), r.total_evaluations);
    match (lambda_c, error_pct) {
        (Some(lc), Some(e)) => println!("); lambda_c = {lc:.12e}, error {e:.6}%"),
        _ => println!(")"),
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let mut cfg = SweepConfig::load(&a.config)?;
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    cfg.full |= a.full;
    if a.out.is_none() && a.out_json.is_none() {
        bail!("nothing to write: pass --out and/or --out-json");
    }
    let report = match a.threads {
        Some(t) => run_sweep_with_threads(&cfg, t)?,
        None => run_sweep(&cfg)?,
    };
    emit_report(&report, a.out.as_deref(), a.out_json.as_deref())?;
    let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
    println!("{} rows ({failed} failed)", report.rows.len());
    for ag in &report.aggregates {
        let fmt = |v: Option<f64>| v.map_or("-".into(), |x| format!("{x:.6}"));
        println!("  {}={}: ME {}%, SDE {}% over {} rows", ag.axis.as_str(), ag.value, fmt(ag.me), fmt(ag.sde), ag.rows);
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Fem { command: FemCommand::Generate(a) } => generate(a),
        Command::Decompose(a) => decompose(a),
        Command::Vqe { command: VqeCommand::Run(a) } => vqe_run(a),
        Command::Sweep(a) => sweep(a),
    }
}
