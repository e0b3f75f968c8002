//! How low can an ansatz go? Many tight restarts estimate the best energy a
//! circuit family reaches, separating ansatz limits from optimizer limits.

use femvqe::bench::{percentage_error, prepare_case};
use femvqe::fem::{CaseKind, CaseOptions};
use femvqe::quantum::{build_ansatz, Entangler};
use femvqe::vqe::{run_vqe, Init, OptimizerKind, VqeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [(CaseKind::Beam, 3), (CaseKind::TrussHex, 3), (CaseKind::PlateHole, 3), (CaseKind::PlateHole, 4)];
    for (case, n) in cases {
        let (_, p) = prepare_case(case, n, &CaseOptions::default())?;
        for pattern in Entangler::ALL {
            let row: Vec<String> = (1..=3)
                .map(|depth| {
                    let a = build_ansatz(n, depth, pattern).unwrap();
                    let cfg = VqeConfig {
                        optimizer: OptimizerKind::Lbfgsb,
                        tol: 1e-10,
                        n_restarts: 16,
                        init: Init::RandomUniform,
                        ..Default::default()
                    };
                    let r = run_vqe(&p.pauli, &a, &cfg).unwrap();
                    format!("d{depth} {:>9.4}%", percentage_error(r.lambda_q, p.lambda_c).unwrap())
                })
                .collect();
            println!("{:<10} N={n} {:<3}  {}", case.as_str(), pattern.as_str(), row.join("  "));
        }
    }
    Ok(())
}
