//! Mesh each case study at its reachable qubit counts and print the
//! classical reference eigenvalue and fundamental frequency.

use femvqe::bench::prepare_model;
use femvqe::fem::{generate_case, CaseKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for case in CaseKind::ALL {
        println!("{case}");
        for n in 2..=7 {
            let model = match generate_case(case, n) {
                Ok(m) => m,
                Err(e) => {
                    println!("  N={n}: {e}");
                    continue;
                }
            };
            let p = prepare_model(&model)?;
            let params = &model.generator.as_ref().unwrap().parameters;
            println!(
                "  N={n}: {:>3} nodes {:>3} elements {:>3} free DOFs  lambda_c {:.6e}  f1 {:.4e} Hz  {:?}",
                model.mesh.nodes.len(),
                model.mesh.elements.len(),
                model.n_free_dof,
                p.lambda_c,
                p.fundamental_hz(),
                params
            );
        }
    }
    Ok(())
}
