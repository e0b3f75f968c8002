//! Model → matrices → free-DOF pair → standard Hamiltonian → Pauli form.

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use super::BenchError;
use crate::fem::{assemble, generate_case_with, CaseKind, CaseOptions, FemModel};
use crate::hamiltonian::{
    classical_min_eig, pauli_decompose, reduce_auto, PauliHamiltonian, StandardHamiltonian,
};
use crate::matrixio::{partition_free, BoundarySet, CoordinateMatrix};

/// A Hamiltonian ready for the eigensolver race, with its classical answer.
#[derive(Debug, Clone)]
pub struct Problem {
    /// `K_f`, `M_f` in SI units, for reference.
    pub k_free: DMatrix<f64>,
    pub m_free: DMatrix<f64>,
    pub standard: StandardHamiltonian,
    pub pauli: PauliHamiltonian,
    /// Smallest eigenvalue of `standard` (reporting units).
    pub lambda_c: f64,
    /// SHA-256 of the standard matrix, see [`hamiltonian_hash`].
    pub hash: String,
}

impl Problem {
    pub fn n_qubits(&self) -> u32 {
        self.standard.n_qubits
    }

    /// Fundamental frequency in Hz of the SI problem.
    pub fn fundamental_hz(&self) -> f64 {
        (self.lambda_c / self.standard.unit_scale).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// Hex SHA-256 over the dimension and the row-major little-endian entries.
pub fn hamiltonian_hash(h: &DMatrix<f64>) -> String {
    let mut d = Sha256::new();
    d.update((h.nrows() as u64).to_le_bytes());
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            d.update(h[(i, j)].to_le_bytes());
        }
    }
    d.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Partitions, reduces, rescales by `scale` and decomposes.
pub fn prepare_matrices(
    k: &CoordinateMatrix,
    m: &CoordinateMatrix,
    bc: &BoundarySet,
    scale: f64,
) -> Result<Problem, BenchError> {
    if k.labels() != m.labels() {
        return Err(BenchError::Config("stiffness and mass matrices cover different DOFs".into()));
    }
    let k_free = partition_free(k, bc)?.matrix;
    let m_free = partition_free(m, bc)?.matrix;
    let standard = reduce_auto(&k_free, &m_free)?.scaled(scale);
    let pauli = pauli_decompose(&standard)?;
    let (lambda_c, _) = classical_min_eig(&standard)?;
    let hash = hamiltonian_hash(&standard.matrix);
    Ok(Problem { k_free, m_free, standard, pauli, lambda_c, hash })
}

pub fn prepare_model(model: &FemModel) -> Result<Problem, BenchError> {
    let (k, m) = assemble(model)?;
    prepare_matrices(&k, &m, &model.bc, model.eigenvalue_scale)
}

pub fn prepare_case(case: CaseKind, n_qubits: u32, opts: &CaseOptions) -> Result<(FemModel, Problem), BenchError> {
    let model = generate_case_with(case, n_qubits, opts)?;
    let p = prepare_model(&model)?;
    Ok((model, p))
}
