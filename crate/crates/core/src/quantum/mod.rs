//! Statevector simulator, hardware-efficient ansatz and expectation values.
//!
//! Layout: qubit j is bit j of the amplitude index (little-endian).

mod ansatz;
mod measure;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ansatz::{apply_ansatz, apply_ansatz_into, build_ansatz, AnsatzSpec, Entangler, GateOp};
pub use measure::{
    allocate_shots, expectation_exact, expectation_shots, expectation_shots_with, sample_bitstrings,
    Observable,
};

pub const MAX_QUBITS: u32 = 12;
pub const MAX_DEPTH: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("qubit count {0} outside 1..=12")]
    QubitCountOutOfRange(u32),
    #[error("invalid qubit indices {qubits:?} for {gate:?} on {n_qubits} qubits")]
    InvalidQubit { gate: GateKind, qubits: Vec<u32>, n_qubits: u32 },
    #[error("{0:?} needs an angle")]
    MissingAngle(GateKind),
    #[error("{0:?} takes no angle")]
    UnexpectedAngle(GateKind),
    #[error("depth {0} outside 1..=10")]
    DepthOutOfRange(usize),
    #[error("ansatz has {expected} parameters, got {found}")]
    ParameterLengthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: state {state}, operator {operator}")]
    DimensionMismatch { state: usize, operator: usize },
    #[error("expectation has imaginary part {0:e}")]
    ImaginaryExpectation(f64),
    #[error("shot count must be at least 1")]
    ZeroShots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Ry,
    Rz,
    Rx,
    H,
    Sdg,
    Cx,
    Cz,
    Crx,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            Self::Cx | Self::Cz | Self::Crx => 2,
            _ => 1,
        }
    }

    pub fn parameterized(self) -> bool {
        matches!(self, Self::Ry | Self::Rz | Self::Rx | Self::Crx)
    }

    /// The 2×2 block acting on the target (for controlled gates: when the
    /// control is set), row-major.
    pub fn matrix(self, angle: f64) -> [[Complex64; 2]; 2] {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let (ch, sh) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        match self {
            Self::Ry => [[c(ch, 0.0), c(-sh, 0.0)], [c(sh, 0.0), c(ch, 0.0)]],
            Self::Rz => [[c(ch, -sh), c(0.0, 0.0)], [c(0.0, 0.0), c(ch, sh)]],
            Self::Rx | Self::Crx => [[c(ch, 0.0), c(0.0, -sh)], [c(0.0, -sh), c(ch, 0.0)]],
            Self::H => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]
            }
            Self::Sdg => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]],
            Self::Cx => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            Self::Cz => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: u32,
    amps: Vec<Complex64>,
}

/// `|0…0⟩` on `n_qubits` qubits.
pub fn init_state(n_qubits: u32) -> Result<Statevector, QuantumError> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(QuantumError::QubitCountOutOfRange(n_qubits));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(Statevector { n_qubits, amps })
}

impl Statevector {
    /// Wraps raw amplitudes; they are normalized on the way in.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() || dim.trailing_zeros() > MAX_QUBITS {
            return Err(QuantumError::QubitCountOutOfRange(dim.trailing_zeros()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(QuantumError::DimensionMismatch { state: dim, operator: 0 });
        }
        Ok(Self { n_qubits: dim.trailing_zeros(), amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_global_phase(mut self, phi: f64) -> Self {
        let p = Complex64::from_polar(1.0, phi);
        for a in &mut self.amps {
            *a *= p;
        }
        self
    }

    pub(crate) fn reset(&mut self) {
        self.amps.fill(Complex64::new(0.0, 0.0));
        self.amps[0] = Complex64::new(1.0, 0.0);
    }

    /// Applies one gate in place. `qubits` is `[target]` or `[control, target]`.
    pub fn apply(&mut self, gate: GateKind, qubits: &[u32], angle: Option<f64>) -> Result<(), QuantumError> {
        let n = self.n_qubits;
        let valid = qubits.len() == gate.arity()
            && qubits.iter().all(|&q| q < n)
            && (qubits.len() < 2 || qubits[0] != qubits[1]);
        if !valid {
            return Err(QuantumError::InvalidQubit { gate, qubits: qubits.to_vec(), n_qubits: n });
        }
        let theta = match (gate.parameterized(), angle) {
            (true, Some(a)) => a,
            (true, None) => return Err(QuantumError::MissingAngle(gate)),
            (false, Some(_)) => return Err(QuantumError::UnexpectedAngle(gate)),
            (false, None) => 0.0,
        };
        let target = *qubits.last().unwrap();
        let control = (qubits.len() == 2).then(|| qubits[0]);
        match gate {
            GateKind::Cx => self.controlled_swap(control.unwrap(), target),
            GateKind::Cz => self.controlled_phase(control.unwrap(), target),
            GateKind::Rz => self.diagonal(target, gate.matrix(theta)),
            _ => self.single(control, target, gate.matrix(theta)),
        }
        Ok(())
    }

    fn single(&mut self, control: Option<u32>, target: u32, m: [[Complex64; 2]; 2]) {
        let t = 1usize << target;
        let cmask = control.map_or(0, |c| 1usize << c);
        for i in 0..self.amps.len() {
            if i & t != 0 || i & cmask != cmask {
                continue;
            }
            let j = i | t;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn diagonal(&mut self, target: u32, m: [[Complex64; 2]; 2]) {
        let t = 1usize << target;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & t == 0 { m[0][0] } else { m[1][1] };
        }
    }

    fn controlled_swap(&mut self, control: u32, target: u32) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    fn controlled_phase(&mut self, control: u32, target: u32) {
        let m = (1usize << control) | (1usize << target);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *a = -*a;
            }
        }
    }
}

/// Functional form of [`Statevector::apply`].
pub fn apply_gate(
    mut state: Statevector,
    gate: GateKind,
    qubits: &[u32],
    angle: Option<f64>,
) -> Result<Statevector, QuantumError> {
    state.apply(gate, qubits, angle)?;
    Ok(state)
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Dense Kronecker-product unitaries, built independently of the
    //! index-pair kernels above.
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    use super::GateKind;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn one_qubit(kind: GateKind, angle: f64) -> DMatrix<Complex64> {
        let (ch, sh) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        let e = match kind {
            GateKind::Ry => [c(ch, 0.0), c(-sh, 0.0), c(sh, 0.0), c(ch, 0.0)],
            GateKind::Rz => [c(ch, -sh), c(0.0, 0.0), c(0.0, 0.0), c(ch, sh)],
            GateKind::Rx | GateKind::Crx => [c(ch, 0.0), c(0.0, -sh), c(0.0, -sh), c(ch, 0.0)],
            GateKind::H => {
                let r = 0.5f64.sqrt();
                [c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]
            }
            GateKind::Sdg => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)],
            GateKind::Cx => [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            GateKind::Cz => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        };
        DMatrix::from_row_slice(2, 2, &e)
    }

    /// `⊗_{q=N-1..0} op_q`, qubit N−1 leftmost.
    pub fn kron_chain(n: u32, op: impl Fn(u32) -> DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::from_element(1, 1, c(1.0, 0.0));
        for q in (0..n).rev() {
            out = out.kronecker(&op(q));
        }
        out
    }

    pub fn gate_unitary(n: u32, kind: GateKind, qubits: &[u32], angle: f64) -> DMatrix<Complex64> {
        let id = DMatrix::<Complex64>::identity(2, 2);
        let g = one_qubit(kind, angle);
        if qubits.len() == 1 {
            return kron_chain(n, |q| if q == qubits[0] { g.clone() } else { id.clone() });
        }
        let (ctl, tgt) = (qubits[0], qubits[1]);
        let p0 = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let p1 = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let off = kron_chain(n, |q| if q == ctl { p0.clone() } else { id.clone() });
        let on = kron_chain(n, |q| {
            if q == ctl {
                p1.clone()
            } else if q == tgt {
                g.clone()
            } else {
                id.clone()
            }
        });
        off + on
    }
}
