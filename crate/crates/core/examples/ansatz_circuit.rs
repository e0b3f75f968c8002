//! Build the hardware-efficient ansatz, list its gates and run it.

use femvqe::quantum::{apply_ansatz, build_ansatz, Entangler};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = build_ansatz(4, 1, Entangler::Cx)?;
    println!("N=4 depth=1 cx: {} entanglers, {} parameters", a.entangler_count(), a.n_params);
    for g in &a.gates {
        let slot = g.slot.map_or(String::from("-"), |s| format!("θ{s}"));
        println!("  {:?} {:?} {slot}", g.gate, g.qubits);
    }
    for pattern in Entangler::ALL {
        let a = build_ansatz(3, 2, pattern)?;
        let theta: Vec<f64> = (0..a.n_params).map(|i| 0.1 * i as f64).collect();
        let s = apply_ansatz(&a, &theta)?;
        let p: Vec<String> = s.probabilities().iter().map(|x| format!("{x:.3}")).collect();
        println!("{pattern}: {} params, probabilities {}", a.n_params, p.join(" "));
    }
    println!("{}", build_ansatz(2, 1, Entangler::Crx)?.to_json());
    Ok(())
}
