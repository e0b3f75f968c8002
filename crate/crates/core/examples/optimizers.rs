//! The three optimizers on one structural Hamiltonian, exact and sampled.

use femvqe::bench::{percentage_error, prepare_case};
use femvqe::fem::{CaseKind, CaseOptions};
use femvqe::quantum::{build_ansatz, Entangler};
use femvqe::vqe::{run_vqe, OptimizerKind, Shots, VqeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (_, p) = prepare_case(CaseKind::TrussHex, 3, &CaseOptions::default())?;
    let a = build_ansatz(3, 3, Entangler::Cz)?;
    println!("truss N=3, cz depth 3, lambda_c = {:.6}", p.lambda_c);
    for shots in [Shots::Exact, Shots::Count(10_000)] {
        for optimizer in OptimizerKind::ALL {
            let cfg = VqeConfig { optimizer, shots, maxiter: 20_000, seed: 11, ..Default::default() };
            let r = run_vqe(&p.pauli, &a, &cfg)?;
            println!(
                "  {:>6} {:<7} lambda_q {:.6}  error {:>8.4}%  {:>7} evaluations  {} (restart {})",
                shots.to_string(),
                optimizer.as_str(),
                r.lambda_q,
                percentage_error(r.lambda_q, p.lambda_c)?,
                r.total_evaluations,
                r.stop_reason.as_str(),
                r.restart_index
            );
        }
    }
    Ok(())
}
