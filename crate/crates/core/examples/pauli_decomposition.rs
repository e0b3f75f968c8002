//! Decompose a small structural Hamiltonian into Pauli strings and rebuild it.

use femvqe::bench::prepare_case;
use femvqe::fem::{CaseKind, CaseOptions};
use femvqe::hamiltonian::pauli_reconstruct;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (_, p) = prepare_case(CaseKind::TrussHex, 2, &CaseOptions::default())?;
    println!("H ({}x{}):\n{:.4}", p.standard.dim(), p.standard.dim(), p.standard.matrix);
    println!("{} terms, l1 norm {:.4}", p.pauli.len(), p.pauli.l1_norm());
    for t in p.pauli.terms() {
        println!("  {:+.6}  {}", t.coeff, t.pauli);
    }
    let back = pauli_reconstruct(&p.pauli);
    let err = back.iter().zip(p.standard.matrix.iter()).map(|(a, b)| (a.re - b).abs().max(a.im.abs())).fold(0.0, f64::max);
    println!("max reconstruction error {err:.2e}");
    println!("{}", p.pauli.to_json());
    Ok(())
}
