//! From a free-DOF `(K, M)` pair to a symmetric standard-form operator, its
//! Pauli expansion, and the classical reference eigenvalue.

mod eigen;
mod pauli;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use pauli::{
    pauli_decompose, pauli_decompose_matrix, pauli_reconstruct, PauliHamiltonian, PauliString,
    PauliTerm, DEFAULT_PRUNE, MAX_DENSE_QUBITS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error("mass matrix is not positive definite")]
    MassNotPD,
    #[error("mass matrix is not diagonal")]
    MassNotDiagonal,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{0} qubits exceed the dense limit")]
    TooManyQubits(u32),
    #[error("eigensolver did not converge at index {index}")]
    ConvergenceFailure { index: usize },
    #[error("padding shift {shift} does not exceed the Gershgorin bound {bound}")]
    ShiftTooSmall { shift: f64, bound: f64 },
    #[error("invalid Pauli operator: {0}")]
    InvalidPauli(String),
    #[error("{0:?} is not a (K, M) reduction; use pad_to_power_of_two")]
    UnsupportedReduction(Reduction),
    #[error("operator has imaginary entries")]
    ComplexOperator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// `M^{-1/2} K M^{-1/2}`; requires an exactly diagonal M.
    DiagonalMass,
    /// `L⁻¹ K L⁻ᵀ` with `M = LLᵀ`.
    Cholesky,
    /// Padded embedding of an already-standard matrix.
    Padded,
}

/// Symmetric operator whose spectrum is that of `M⁻¹K` times `unit_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardHamiltonian {
    pub matrix: DMatrix<f64>,
    pub n_qubits: u32,
    pub reduction: Reduction,
    /// Factor already applied to `matrix` (reporting units per SI unit).
    pub unit_scale: f64,
}

impl StandardHamiltonian {
    /// Multiplies the operator by `factor`, accumulating it in `unit_scale`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.matrix *= factor;
        self.unit_scale *= factor;
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub(crate) fn qubits_for(dim: usize) -> Result<u32, HamiltonianError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(HamiltonianError::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros())
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == 0.0))
}

/// Picks [`Reduction::DiagonalMass`] when M is exactly diagonal, Cholesky
/// otherwise.
pub fn reduce_auto(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<StandardHamiltonian, HamiltonianError> {
    let r = if is_diagonal(m) { Reduction::DiagonalMass } else { Reduction::Cholesky };
    reduce_to_standard(k, m, r)
}

/// Congruence transform of `K v = λ M v` into a symmetric standard problem.
pub fn reduce_to_standard(
    k: &DMatrix<f64>,
    m: &DMatrix<f64>,
    reduction: Reduction,
) -> Result<StandardHamiltonian, HamiltonianError> {
    let n = k.nrows();
    for (rows, cols) in [(k.ncols(), n), (m.nrows(), n), (m.ncols(), n)] {
        if rows != cols {
            return Err(HamiltonianError::DimensionMismatch { expected: n, found: rows });
        }
    }
    let n_qubits = qubits_for(n)?;
    let matrix = match reduction {
        Reduction::DiagonalMass => {
            if !is_diagonal(m) {
                return Err(HamiltonianError::MassNotDiagonal);
            }
            let d = m.diagonal();
            if d.iter().any(|&x| !(x > 0.0)) {
                return Err(HamiltonianError::MassNotPD);
            }
            let s: DVector<f64> = d.map(|x| 1.0 / x.sqrt());
            let mut h = DMatrix::from_fn(n, n, |i, j| s[i] * k[(i, j)] * s[j]);
            symmetrize(&mut h);
            h
        }
        Reduction::Cholesky => {
            let chol = m.clone().cholesky().ok_or(HamiltonianError::MassNotPD)?;
            let l = chol.l();
            // H = L⁻¹ (L⁻¹ K)ᵀ because K is symmetric
            let y = l.solve_lower_triangular(k).ok_or(HamiltonianError::MassNotPD)?;
            let mut h = l.solve_lower_triangular(&y.transpose()).ok_or(HamiltonianError::MassNotPD)?;
            symmetrize(&mut h);
            h
        }
        Reduction::Padded => {
            return Err(HamiltonianError::UnsupportedReduction(reduction))
        }
    };
    Ok(StandardHamiltonian { matrix, n_qubits, reduction, unit_scale: 1.0 })
}

fn symmetrize(h: &mut DMatrix<f64>) {
    let n = h.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
}

/// Smallest eigenvalue and its unit eigenvector.
pub fn classical_min_eig(h: &StandardHamiltonian) -> Result<(f64, DVector<f64>), HamiltonianError> {
    min_eig(&h.matrix)
}

pub fn min_eig(m: &DMatrix<f64>) -> Result<(f64, DVector<f64>), HamiltonianError> {
    if m.nrows() == 0 {
        return Err(HamiltonianError::DimensionMismatch { expected: 1, found: 0 });
    }
    let e = symmetric_eigen(m)?;
    Ok((e.values[0], e.vectors.column(0).into_owned()))
}

/// Largest Gershgorin disc edge, an upper bound on every eigenvalue.
pub fn gershgorin_upper(h: &DMatrix<f64>) -> f64 {
    (0..h.nrows())
        .map(|i| {
            h[(i, i)] + (0..h.ncols()).filter(|&j| j != i).map(|j| h[(i, j)].abs()).sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Embeds `h` into `2^target` dimensions with `shift` on the padding
/// diagonal, so the minimum eigenvalue is untouched.
pub fn pad_to_power_of_two(
    h: &DMatrix<f64>,
    target_qubits: u32,
    shift: f64,
) -> Result<StandardHamiltonian, HamiltonianError> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(HamiltonianError::DimensionMismatch { expected: n, found: h.ncols() });
    }
    if target_qubits > MAX_DENSE_QUBITS {
        return Err(HamiltonianError::TooManyQubits(target_qubits));
    }
    let dim = 1usize << target_qubits;
    if n > dim {
        return Err(HamiltonianError::DimensionMismatch { expected: dim, found: n });
    }
    if n == dim {
        return Ok(StandardHamiltonian {
            matrix: h.clone(),
            n_qubits: target_qubits,
            reduction: Reduction::Padded,
            unit_scale: 1.0,
        });
    }
    let bound = gershgorin_upper(h);
    if !(shift > bound) {
        return Err(HamiltonianError::ShiftTooSmall { shift, bound });
    }
    let mut matrix = DMatrix::zeros(dim, dim);
    matrix.view_mut((0, 0), (n, n)).copy_from(h);
    for i in n..dim {
        matrix[(i, i)] = shift;
    }
    Ok(StandardHamiltonian { matrix, n_qubits: target_qubits, reduction: Reduction::Padded, unit_scale: 1.0 })
}
