//! Hardware-efficient ansatz: an `(Rz, Ry)` pre-rotation block, then per
//! depth an all-pairs entangler followed by another `(Rz, Ry)` block.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{init_state, GateKind, QuantumError, Statevector, MAX_DEPTH, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entangler {
    Cx,
    Cz,
    /// Controlled-Rx with a variational angle per gate.
    Crx,
}

impl Entangler {
    pub const ALL: [Entangler; 3] = [Entangler::Cx, Entangler::Cz, Entangler::Crx];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Cx => "cx",
            Self::Cz => "cz",
            Self::Crx => "crx",
        }
    }

    fn gate(self) -> GateKind {
        match self {
            Self::Cx => GateKind::Cx,
            Self::Cz => GateKind::Cz,
            Self::Crx => GateKind::Crx,
        }
    }
}

impl fmt::Display for Entangler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Entangler {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown entanglement pattern `{s}` (expected cx, cz or crx)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub gate: GateKind,
    /// `[target]` or `[control, target]`.
    pub qubits: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: u32,
    pub depth: usize,
    pub pattern: Entangler,
    pub n_params: usize,
    pub gates: Vec<GateOp>,
}

impl AnsatzSpec {
    pub fn entangler_count(&self) -> usize {
        self.gates.iter().filter(|g| g.gate.arity() == 2).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ansatz serializes")
    }
}

pub fn build_ansatz(n_qubits: u32, depth: usize, pattern: Entangler) -> Result<AnsatzSpec, QuantumError> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(QuantumError::QubitCountOutOfRange(n_qubits));
    }
    if !(1..=MAX_DEPTH).contains(&depth) {
        return Err(QuantumError::DepthOutOfRange(depth));
    }
    let mut gates = Vec::new();
    let mut slot = 0;
    let rotations = |gates: &mut Vec<GateOp>, slot: &mut usize| {
        for gate in [GateKind::Rz, GateKind::Ry] {
            for q in 0..n_qubits {
                gates.push(GateOp { gate, qubits: vec![q], slot: Some(*slot) });
                *slot += 1;
            }
        }
    };
    rotations(&mut gates, &mut slot);
    for _ in 0..depth {
        for j1 in 0..n_qubits {
            for j2 in j1 + 1..n_qubits {
                let s = (pattern == Entangler::Crx).then(|| {
                    slot += 1;
                    slot - 1
                });
                gates.push(GateOp { gate: pattern.gate(), qubits: vec![j1, j2], slot: s });
            }
        }
        rotations(&mut gates, &mut slot);
    }
    Ok(AnsatzSpec { n_qubits, depth, pattern, n_params: slot, gates })
}

/// `U(θ)|0…0⟩`.
pub fn apply_ansatz(spec: &AnsatzSpec, theta: &[f64]) -> Result<Statevector, QuantumError> {
    let mut s = init_state(spec.n_qubits)?;
    apply_ansatz_into(spec, theta, &mut s)?;
    Ok(s)
}

/// Resets `state` to `|0…0⟩` and runs the circuit, reusing the allocation.
pub fn apply_ansatz_into(spec: &AnsatzSpec, theta: &[f64], state: &mut Statevector) -> Result<(), QuantumError> {
    if theta.len() != spec.n_params {
        return Err(QuantumError::ParameterLengthMismatch { expected: spec.n_params, found: theta.len() });
    }
    if state.n_qubits() != spec.n_qubits {
        return Err(QuantumError::DimensionMismatch { state: state.dim(), operator: 1 << spec.n_qubits });
    }
    state.reset();
    for g in &spec.gates {
        state.apply(g.gate, &g.qubits, g.slot.map(|s| theta[s]))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::oracle;
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reference_instance_counts() {
        let a = build_ansatz(4, 1, Entangler::Cx).unwrap();
        assert_eq!(a.entangler_count(), 6);
        assert_eq!(a.n_params, 16);
        let a = build_ansatz(2, 1, Entangler::Cz).unwrap();
        assert_eq!(a.entangler_count(), 1);
        assert_eq!(a.n_params, 8);
        let a = build_ansatz(3, 4, Entangler::Crx).unwrap();
        assert_eq!(a.n_params, 2 * 3 * 5 + 4 * 3);
    }

    #[test]
    fn slots_are_contiguous_and_used_once() {
        for p in Entangler::ALL {
            let a = build_ansatz(4, 3, p).unwrap();
            let slots: Vec<usize> = a.gates.iter().filter_map(|g| g.slot).collect();
            assert_eq!(slots, (0..a.n_params).collect::<Vec<_>>());
        }
    }

    #[test]
    fn entangler_order_is_lexicographic_pairs() {
        let a = build_ansatz(3, 1, Entangler::Cz).unwrap();
        let pairs: Vec<Vec<u32>> = a.gates.iter().filter(|g| g.gate == GateKind::Cz).map(|g| g.qubits.clone()).collect();
        assert_eq!(pairs, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn range_errors() {
        assert_eq!(build_ansatz(2, 0, Entangler::Cx).unwrap_err(), QuantumError::DepthOutOfRange(0));
        assert_eq!(build_ansatz(2, 11, Entangler::Cx).unwrap_err(), QuantumError::DepthOutOfRange(11));
        let a = build_ansatz(1, 1, Entangler::Cx).unwrap();
        assert_eq!(a.entangler_count(), 0);
        assert_eq!(
            apply_ansatz(&a, &[0.0; 3]).unwrap_err(),
            QuantumError::ParameterLengthMismatch { expected: 4, found: 3 }
        );
    }

    #[test]
    fn zero_angles_and_bloch_flip() {
        for p in [Entangler::Cx, Entangler::Cz] {
            let a = build_ansatz(3, 2, p).unwrap();
            let s = apply_ansatz(&a, &vec![0.0; a.n_params]).unwrap();
            assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
        }
        let a = build_ansatz(1, 1, Entangler::Cx).unwrap();
        let s = apply_ansatz(&a, &[0.0, std::f64::consts::PI, 0.0, 0.0]).unwrap();
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_dense_circuit_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in Entangler::ALL {
            let a = build_ansatz(3, 2, p).unwrap();
            let theta: Vec<f64> = (0..a.n_params).map(|_| rng.gen_range(-3.2..3.2)).collect();
            let mut u = DMatrix::<Complex64>::identity(8, 8);
            for g in &a.gates {
                let angle = g.slot.map_or(0.0, |s| theta[s]);
                u = oracle::gate_unitary(3, g.gate, &g.qubits, angle) * u;
            }
            let mut e0 = DVector::from_element(8, Complex64::new(0.0, 0.0));
            e0[0] = Complex64::new(1.0, 0.0);
            let want = u * e0;
            let got = apply_ansatz(&a, &theta).unwrap();
            for (g, w) in got.amplitudes().iter().zip(want.iter()) {
                assert!((g - w).norm() < 1e-12, "{p}");
            }
        }
    }

    #[test]
    fn json_export() {
        let a = build_ansatz(2, 1, Entangler::Crx).unwrap();
        let text = a.to_json();
        let back: AnsatzSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
        assert!(text.contains("\"pattern\": \"crx\""));
    }
}
