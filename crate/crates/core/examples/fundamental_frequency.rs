//! End to end: mesh, matrices, Hamiltonian, VQE, frequency in Hz.

use femvqe::bench::{percentage_error, prepare_case};
use femvqe::fem::{CaseKind, CaseOptions};
use femvqe::quantum::{build_ansatz, Entangler};
use femvqe::vqe::{run_vqe, OptimizerKind, VqeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case: CaseKind = std::env::args().nth(1).as_deref().unwrap_or("beam").parse()?;
    let n: u32 = std::env::args().nth(2).map_or(Ok(3), |s| s.parse())?;
    let (model, p) = prepare_case(case, n, &CaseOptions::default())?;
    println!("{case} N={n}: {} nodes, {} free DOFs, {} Pauli terms", model.mesh.nodes.len(), model.n_free_dof, p.pauli.len());
    let a = build_ansatz(n, 2, Entangler::Cx)?;
    let r = run_vqe(&p.pauli, &a, &VqeConfig { optimizer: OptimizerKind::Lbfgsb, ..Default::default() })?;
    let hz = |lambda: f64| (lambda / p.standard.unit_scale).sqrt() / (2.0 * std::f64::consts::PI);
    println!("classical: lambda {:.8e}  f1 {:.6e} Hz", p.lambda_c, hz(p.lambda_c));
    println!("VQE:       lambda {:.8e}  f1 {:.6e} Hz", r.lambda_q, hz(r.lambda_q));
    println!("error {:.5}%, {} evaluations, {}", percentage_error(r.lambda_q, p.lambda_c)?, r.total_evaluations, r.stop_reason.as_str());
    Ok(())
}
