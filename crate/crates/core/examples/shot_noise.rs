//! Sampled versus exact energies: the spread shrinks like 1/sqrt(shots).

use femvqe::bench::prepare_case;
use femvqe::fem::{CaseKind, CaseOptions};
use femvqe::quantum::{apply_ansatz, build_ansatz, expectation_exact, expectation_shots, sample_bitstrings, Entangler};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (_, p) = prepare_case(CaseKind::PlateHole, 3, &CaseOptions::default())?;
    let a = build_ansatz(3, 1, Entangler::Cx)?;
    let theta: Vec<f64> = (0..a.n_params).map(|i| (i as f64 * 0.7).sin()).collect();
    let state = apply_ansatz(&a, &theta)?;
    let exact = expectation_exact(&state, &p.pauli)?;
    println!("exact energy {exact:.6}");
    for shots in [100u64, 1_000, 10_000, 100_000] {
        let est: Vec<f64> = (0..50).map(|seed| expectation_shots(&state, &p.pauli, shots, seed)).collect::<Result<_, _>>()?;
        let mean = est.iter().sum::<f64>() / est.len() as f64;
        let sd = (est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (est.len() - 1) as f64).sqrt();
        println!("shots {shots:>6}: mean {mean:.6}  sd {sd:.5}  sd*sqrt(shots) {:.3}", sd * (shots as f64).sqrt());
    }
    println!("computational-basis counts: {:?}", sample_bitstrings(&state, 1000, 7));
    Ok(())
}
