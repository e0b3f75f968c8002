//! Exact and sampled expectation values.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GateKind, QuantumError, Statevector};
use crate::hamiltonian::{PauliHamiltonian, PauliString};

#[derive(Debug, Clone, Copy)]
pub enum Observable<'a> {
    /// Real symmetric matrix.
    Dense(&'a DMatrix<f64>),
    Pauli(&'a PauliHamiltonian),
}

impl<'a> From<&'a DMatrix<f64>> for Observable<'a> {
    fn from(m: &'a DMatrix<f64>) -> Self {
        Self::Dense(m)
    }
}

impl<'a> From<&'a PauliHamiltonian> for Observable<'a> {
    fn from(h: &'a PauliHamiltonian) -> Self {
        Self::Pauli(h)
    }
}

fn check_imag(re: f64, im: f64) -> Result<f64, QuantumError> {
    if im.abs() > 1e-10 * re.abs().max(1.0) {
        return Err(QuantumError::ImaginaryExpectation(im));
    }
    Ok(re)
}

/// `⟨ψ|P|ψ⟩` in one pass over the amplitudes.
fn pauli_expectation(amps: &[Complex64], p: &PauliString) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, a) in amps.iter().enumerate() {
        let (row, phase) = p.act(b);
        acc += amps[row].conj() * phase * a;
    }
    acc
}

/// `⟨ψ|H|ψ⟩` for a dense or Pauli-sum observable.
pub fn expectation_exact<'a>(state: &Statevector, h: impl Into<Observable<'a>>) -> Result<f64, QuantumError> {
    let amps = state.amplitudes();
    match h.into() {
        Observable::Dense(m) => {
            if m.nrows() != amps.len() || m.ncols() != amps.len() {
                return Err(QuantumError::DimensionMismatch { state: amps.len(), operator: m.nrows() });
            }
            let re = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.re));
            let im = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.im));
            let (hr, hi) = (m * &re, m * &im);
            check_imag(re.dot(&hr) + im.dot(&hi), re.dot(&hi) - im.dot(&hr))
        }
        Observable::Pauli(ph) => {
            if ph.n_qubits() != state.n_qubits() {
                return Err(QuantumError::DimensionMismatch { state: amps.len(), operator: 1 << ph.n_qubits() });
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for t in ph.terms() {
                acc += pauli_expectation(amps, &t.pauli) * t.coeff;
            }
            check_imag(acc.re, acc.im)
        }
    }
}

/// Shots per non-identity term, proportional to `|c|` with at least one
/// each; leftovers go to the largest remainders (ties to the earlier term).
pub fn allocate_shots(weights: &[f64], shots: u64) -> Vec<u64> {
    let total: f64 = weights.iter().map(|w| w.abs()).sum();
    if weights.is_empty() {
        return Vec::new();
    }
    if !(total > 0.0) {
        return vec![(shots / weights.len() as u64).max(1); weights.len()];
    }
    let ideal: Vec<f64> = weights.iter().map(|w| shots as f64 * w.abs() / total).collect();
    let mut alloc: Vec<u64> = ideal.iter().map(|x| (x.floor() as u64).max(1)).collect();
    let used: u64 = alloc.iter().sum();
    if used < shots {
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&i, &j| {
            let (ri, rj) = (ideal[i] - ideal[i].floor(), ideal[j] - ideal[j].floor());
            rj.total_cmp(&ri).then(i.cmp(&j))
        });
        for &i in order.iter().cycle().take((shots - used) as usize) {
            alloc[i] += 1;
        }
    }
    alloc
}

fn cumulative(state: &Statevector) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u = rng.gen::<f64>() * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Rotates a copy of the state so measuring `p` becomes a Z-basis parity.
fn rotate_into_basis(state: &Statevector, p: &PauliString) -> Statevector {
    let mut s = state.clone();
    for q in 0..s.n_qubits() {
        match p.factor(q) {
            'X' => s.apply(GateKind::H, &[q], None).expect("valid qubit"),
            'Y' => {
                s.apply(GateKind::Sdg, &[q], None).expect("valid qubit");
                s.apply(GateKind::H, &[q], None).expect("valid qubit")
            }
            _ => {}
        }
    }
    s
}

/// Sampled `⟨ψ|H|ψ⟩` with `shots` measurements split across the
/// non-identity terms; the identity coefficient is added exactly.
pub fn expectation_shots(
    state: &Statevector,
    h: &PauliHamiltonian,
    shots: u64,
    seed: u64,
) -> Result<f64, QuantumError> {
    expectation_shots_with(state, h, shots, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn expectation_shots_with(
    state: &Statevector,
    h: &PauliHamiltonian,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<f64, QuantumError> {
    if shots == 0 {
        return Err(QuantumError::ZeroShots);
    }
    if h.n_qubits() != state.n_qubits() {
        return Err(QuantumError::DimensionMismatch { state: state.dim(), operator: 1 << h.n_qubits() });
    }
    let mut value = 0.0;
    let measured: Vec<_> = h.terms().iter().filter(|t| !t.pauli.is_identity()).collect();
    for t in h.terms().iter().filter(|t| t.pauli.is_identity()) {
        value += t.coeff;
    }
    let weights: Vec<f64> = measured.iter().map(|t| t.coeff).collect();
    let alloc = allocate_shots(&weights, shots);
    for (t, &n) in measured.iter().zip(&alloc) {
        let rotated = rotate_into_basis(state, &t.pauli);
        let cdf = cumulative(&rotated);
        let support = t.pauli.support();
        let mut sum: i64 = 0;
        for _ in 0..n {
            let b = draw(&cdf, rng) as u64;
            sum += if (b & support).count_ones() % 2 == 0 { 1 } else { -1 };
        }
        value += t.coeff * sum as f64 / n as f64;
    }
    Ok(value)
}

/// Multinomial measurement counts keyed by bitstring (qubit N−1 first).
pub fn sample_bitstrings(state: &Statevector, shots: u64, seed: u64) -> BTreeMap<String, u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cdf = cumulative(state);
    let mut counts = vec![0u64; state.dim()];
    for _ in 0..shots {
        counts[draw(&cdf, &mut rng)] += 1;
    }
    let n = state.n_qubits() as usize;
    counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(b, c)| (format!("{b:0n$b}"), c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::pauli_decompose_matrix;
    use crate::quantum::init_state;

    fn random_state(n: u32, rng: &mut ChaCha8Rng) -> Statevector {
        let amps = (0..1 << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        Statevector::from_amplitudes(amps.collect()).unwrap()
    }

    fn one(n: u32, label: &str) -> PauliHamiltonian {
        PauliHamiltonian::from_labels(n, &[(1.0, label)]).unwrap()
    }

    #[test]
    fn trivial_expectations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(3, &mut rng);
        assert!((expectation_exact(&s, &one(3, "III")).unwrap() - 1.0).abs() < 1e-12);
        let mut one_state = init_state(1).unwrap();
        one_state.apply(GateKind::Ry, &[0], Some(std::f64::consts::PI)).unwrap();
        assert!((expectation_exact(&one_state, &one(1, "Z")).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_path_matches_dense_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = DMatrix::from_fn(16, 16, |_, _| rng.gen_range(-1.0..1.0));
        let h = (&a + a.transpose()) * 0.5;
        let ph = pauli_decompose_matrix(&h, 0.0).unwrap();
        let s = random_state(4, &mut rng);
        // ψ† H ψ by explicit double sum
        let amps = s.amplitudes();
        let mut oracle = Complex64::new(0.0, 0.0);
        for i in 0..16 {
            for j in 0..16 {
                oracle += amps[i].conj() * h[(i, j)] * amps[j];
            }
        }
        assert!((expectation_exact(&s, &ph).unwrap() - oracle.re).abs() < 1e-10);
        assert!((expectation_exact(&s, &h).unwrap() - oracle.re).abs() < 1e-10);
    }

    #[test]
    fn global_phase_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = PauliHamiltonian::from_labels(2, &[(0.3, "XY"), (-1.0, "ZZ"), (0.7, "YI")]).unwrap();
        let s = random_state(2, &mut rng);
        let e0 = expectation_exact(&s, &h).unwrap();
        let e1 = expectation_exact(&s.with_global_phase(1.234), &h).unwrap();
        assert!((e0 - e1).abs() < 1e-12);
    }

    #[test]
    fn shots_trivial_cases() {
        let s = init_state(1).unwrap();
        assert_eq!(expectation_shots(&s, &one(1, "I"), 7, 0).unwrap(), 1.0);
        for seed in 0..5 {
            assert_eq!(expectation_shots(&s, &one(1, "Z"), 100, seed).unwrap(), 1.0);
        }
        assert_eq!(expectation_shots(&s, &one(1, "Z"), 0, 0).unwrap_err(), QuantumError::ZeroShots);
    }

    #[test]
    fn shots_on_x_are_unbiased() {
        let s = init_state(1).unwrap();
        let e = expectation_shots(&s, &one(1, "X"), 100_000, 42).unwrap();
        assert!(e.abs() < 0.02);
    }

    #[test]
    fn y_basis_rotation() {
        // S·H|0⟩ = |+i⟩, the +1 eigenstate of Y
        let mut s = init_state(1).unwrap();
        s.apply(GateKind::H, &[0], None).unwrap();
        s.apply(GateKind::Rz, &[0], Some(std::f64::consts::FRAC_PI_2)).unwrap();
        assert_eq!(expectation_shots(&s, &one(1, "Y"), 1000, 1).unwrap(), 1.0);
    }

    #[test]
    fn allocation_rules() {
        assert_eq!(allocate_shots(&[1.0, 1.0], 10), vec![5, 5]);
        assert_eq!(allocate_shots(&[3.0, 1.0], 4), vec![3, 1]);
        assert_eq!(allocate_shots(&[1.0, 1e-9], 10), vec![9, 1]);
        assert_eq!(allocate_shots(&[1.0, 1e-9, 1e-9], 1), vec![1, 1, 1]);
        let a = allocate_shots(&[0.5, 0.3, 0.2], 7);
        assert_eq!(a.iter().sum::<u64>(), 7);
    }

    #[test]
    fn bitstring_sampling() {
        let s = init_state(1).unwrap();
        let c = sample_bitstrings(&s, 100, 5);
        assert_eq!(c.len(), 1);
        assert_eq!(c["0"], 100);
        let mut plus = init_state(1).unwrap();
        plus.apply(GateKind::H, &[0], None).unwrap();
        let n = 100_000u64;
        let c = sample_bitstrings(&plus, n, 6);
        let sigma = (n as f64 * 0.25).sqrt();
        for k in ["0", "1"] {
            assert!((c[k] as f64 - n as f64 / 2.0).abs() < 5.0 * sigma);
        }
        assert_eq!(c.values().sum::<u64>(), n);
        assert_eq!(sample_bitstrings(&plus, 50, 9), sample_bitstrings(&plus, 50, 9));
    }
}
