//! Pauli-string operators and the recursive tensor-split decomposition.
//!
//! String convention: character 0 acts on qubit N−1, the last character on
//! qubit 0, while qubit j is bit j of a basis-state index.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{HamiltonianError, StandardHamiltonian};

pub const DEFAULT_PRUNE: f64 = 1e-12;
pub const MAX_DENSE_QUBITS: u32 = 12;

/// A tensor product of single-qubit Paulis encoded by its X and Z masks:
/// X ↔ (1, 0), Z ↔ (0, 1), Y ↔ (1, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: u32,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: u32) -> Self {
        Self { n_qubits, x: 0, z: 0 }
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Qubits with a non-identity factor.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// The factor on `qubit` as one of `I X Y Z`.
    pub fn factor(&self, qubit: u32) -> char {
        match ((self.x >> qubit) & 1, (self.z >> qubit) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    /// `P|b⟩ = phase(b)·|b ⊕ x⟩`. Returns the flipped index and the phase.
    #[inline]
    pub fn act(&self, b: usize) -> (usize, Complex64) {
        let sign = if ((b as u64) & self.z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        let phase = match self.y_count() % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        };
        (b ^ self.x as usize, phase)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.n_qubits).rev() {
            write!(f, "{}", self.factor(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = HamiltonianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.chars().count() as u32;
        if n == 0 || n > 63 {
            return Err(HamiltonianError::InvalidPauli(format!("bad string length {n}")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (i, ch) in s.chars().enumerate() {
            let q = n - 1 - i as u32;
            match ch {
                'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q
                }
                'Z' => z |= 1 << q,
                other => {
                    return Err(HamiltonianError::InvalidPauli(format!(
                        "unexpected character `{other}` in `{s}`"
                    )))
                }
            }
        }
        Ok(Self { n_qubits: n, x, z })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub pauli: PauliString,
}

/// `Σ c_l P_l` with real coefficients and distinct strings, sorted by string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PauliJson", try_from = "PauliJson")]
pub struct PauliHamiltonian {
    n_qubits: u32,
    terms: Vec<PauliTerm>,
}

#[derive(Serialize, Deserialize)]
struct PauliJson {
    n_qubits: u32,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    c: f64,
    p: String,
}

impl From<PauliHamiltonian> for PauliJson {
    fn from(h: PauliHamiltonian) -> Self {
        Self {
            n_qubits: h.n_qubits,
            terms: h.terms.iter().map(|t| TermJson { c: t.coeff, p: t.pauli.to_string() }).collect(),
        }
    }
}

impl TryFrom<PauliJson> for PauliHamiltonian {
    type Error = HamiltonianError;

    fn try_from(j: PauliJson) -> Result<Self, Self::Error> {
        let terms = j
            .terms
            .iter()
            .map(|t| Ok((t.c, t.p.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>, HamiltonianError>>()?;
        PauliHamiltonian::new(j.n_qubits, terms)
    }
}

impl PauliHamiltonian {
    /// Validates lengths and rejects duplicate strings.
    pub fn new(
        n_qubits: u32,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
    ) -> Result<Self, HamiltonianError> {
        if n_qubits == 0 || n_qubits > 63 {
            return Err(HamiltonianError::InvalidPauli(format!("bad qubit count {n_qubits}")));
        }
        let mut map = BTreeMap::new();
        for (c, p) in terms {
            if p.n_qubits != n_qubits {
                return Err(HamiltonianError::InvalidPauli(format!(
                    "string {p} has {} qubits, expected {n_qubits}",
                    p.n_qubits
                )));
            }
            if !c.is_finite() {
                return Err(HamiltonianError::InvalidPauli(format!("non-finite coefficient on {p}")));
            }
            if map.insert(p, c).is_some() {
                return Err(HamiltonianError::InvalidPauli(format!("duplicate string {p}")));
            }
        }
        Ok(Self {
            n_qubits,
            terms: map.into_iter().map(|(pauli, coeff)| PauliTerm { coeff, pauli }).collect(),
        })
    }

    /// Convenience constructor from `(coefficient, "IXYZ…")` pairs.
    pub fn from_labels(n_qubits: u32, terms: &[(f64, &str)]) -> Result<Self, HamiltonianError> {
        let parsed = terms
            .iter()
            .map(|(c, s)| Ok((*c, s.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>, HamiltonianError>>()?;
        Self::new(n_qubits, parsed)
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `p`, zero when absent.
    pub fn coeff(&self, p: &PauliString) -> f64 {
        self.terms
            .binary_search_by(|t| t.pauli.cmp(p))
            .map(|i| self.terms[i].coeff)
            .unwrap_or(0.0)
    }

    pub fn coeff_of(&self, label: &str) -> f64 {
        label.parse().map(|p| self.coeff(&p)).unwrap_or(0.0)
    }

    /// Σ|c_l|, an upper bound on the spectral radius.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hamiltonian serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HamiltonianError> {
        serde_json::from_str(text).map_err(|e| HamiltonianError::InvalidPauli(e.to_string()))
    }

    /// Real dense matrix; fails when an odd-Y string makes it complex.
    pub fn to_dense_real(&self) -> Result<DMatrix<f64>, HamiltonianError> {
        if self.terms.iter().any(|t| t.pauli.y_count() % 2 == 1 && t.coeff != 0.0) {
            return Err(HamiltonianError::ComplexOperator);
        }
        Ok(pauli_reconstruct(self).map(|c| c.re))
    }
}

/// Dense `Σ c_l P_l`, scattering each term along its signed permutation.
pub fn pauli_reconstruct(ph: &PauliHamiltonian) -> DMatrix<Complex64> {
    let dim = 1usize << ph.n_qubits;
    let mut out = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for t in &ph.terms {
        for b in 0..dim {
            let (row, phase) = t.pauli.act(b);
            out[(row, b)] += phase * t.coeff;
        }
    }
    out
}

/// Decomposes `h.matrix` with the default prune threshold.
pub fn pauli_decompose(h: &StandardHamiltonian) -> Result<PauliHamiltonian, HamiltonianError> {
    pauli_decompose_matrix(&h.matrix, DEFAULT_PRUNE)
}

/// Recursive tensor split on the most significant qubit:
/// for `H = [[A, B], [C, D]]`, the partial operators are
/// `I: (A+D)/2`, `X: (B+C)/2`, `Y: i(B−C)/2`, `Z: (A−D)/2`.
/// Terms with `|c| ≤ prune` are dropped.
pub fn pauli_decompose_matrix(
    h: &DMatrix<f64>,
    prune: f64,
) -> Result<PauliHamiltonian, HamiltonianError> {
    let dim = h.nrows();
    if h.ncols() != dim {
        return Err(HamiltonianError::DimensionMismatch { expected: dim, found: h.ncols() });
    }
    let n = super::qubits_for(dim)?;
    if n > MAX_DENSE_QUBITS {
        return Err(HamiltonianError::TooManyQubits(n));
    }
    // row-major complex working copy
    let data: Vec<Complex64> =
        (0..dim * dim).map(|k| Complex64::new(h[(k / dim, k % dim)], 0.0)).collect();
    let mut terms = Vec::new();
    split(data, dim, n, 0, 0, 0, prune, &mut terms);
    PauliHamiltonian::new(n, terms)
}

#[allow(clippy::too_many_arguments)]
fn split(
    m: Vec<Complex64>,
    dim: usize,
    n: u32,
    level: u32,
    x: u64,
    z: u64,
    prune: f64,
    out: &mut Vec<(f64, PauliString)>,
) {
    if dim == 1 {
        let c = m[0];
        debug_assert!(c.im.abs() <= 1e-9 * (1.0 + c.re.abs()), "imaginary residue {c}");
        if c.re.abs() > prune {
            out.push((c.re, PauliString { n_qubits: n, x, z }));
        }
        return;
    }
    let half = dim / 2;
    let bit = 1u64 << (n - 1 - level);
    let mut parts = [
        Vec::with_capacity(half * half),
        Vec::with_capacity(half * half),
        Vec::with_capacity(half * half),
        Vec::with_capacity(half * half),
    ];
    let i_unit = Complex64::new(0.0, 1.0);
    for r in 0..half {
        for c in 0..half {
            let a = m[r * dim + c];
            let b = m[r * dim + c + half];
            let cc = m[(r + half) * dim + c];
            let d = m[(r + half) * dim + c + half];
            parts[0].push((a + d) * 0.5);
            parts[1].push((b + cc) * 0.5);
            parts[2].push(i_unit * (b - cc) * 0.5);
            parts[3].push((a - d) * 0.5);
        }
    }
    drop(m);
    let masks = [(0, 0), (bit, 0), (bit, bit), (0, bit)];
    let [p0, p1, p2, p3] = parts;
    for (part, (dx, dz)) in [p0, p1, p2, p3].into_iter().zip(masks) {
        // all-zero blocks contribute nothing below
        if part.iter().all(|v| v.norm_sqr() == 0.0) {
            continue;
        }
        split(part, half, n, level + 1, x | dx, z | dz, prune, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_strings(n: u32) -> Vec<PauliString> {
        (0..1u64 << (2 * n))
            .map(|k| {
                let (mut x, mut z) = (0, 0);
                for q in 0..n {
                    match (k >> (2 * q)) & 3 {
                        1 => x |= 1 << q,
                        2 => {
                            x |= 1 << q;
                            z |= 1 << q
                        }
                        3 => z |= 1 << q,
                        _ => {}
                    }
                }
                PauliString { n_qubits: n, x, z }
            })
            .collect()
    }

    /// Tr(P H)/2^N from the definition, one signed permutation per string.
    fn naive_coeff(p: &PauliString, h: &DMatrix<f64>) -> Complex64 {
        let dim = h.nrows();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..dim {
            let (row, phase) = p.act(k);
            acc += phase * h[(k, row)];
        }
        acc / dim as f64
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn string_round_trip_and_order() {
        let p: PauliString = "XIZY".parse().unwrap();
        assert_eq!(p.to_string(), "XIZY");
        assert_eq!(p.factor(3), 'X');
        assert_eq!(p.factor(0), 'Y');
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn trivial_decompositions() {
        let h = pauli_decompose_matrix(&DMatrix::identity(2, 2), DEFAULT_PRUNE).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!((h.terms()[0].coeff, h.terms()[0].pauli.to_string()), (1.0, "I".into()));
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let h = pauli_decompose_matrix(&z, DEFAULT_PRUNE).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.coeff_of("Z"), 1.0);
    }

    #[test]
    fn trivial_reconstructions() {
        let i = PauliHamiltonian::from_labels(1, &[(1.0, "I")]).unwrap();
        assert_eq!(i.to_dense_real().unwrap(), DMatrix::identity(2, 2));
        let xz = PauliHamiltonian::from_labels(1, &[(0.5, "X"), (0.5, "Z")]).unwrap();
        assert_eq!(
            xz.to_dense_real().unwrap(),
            DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, -0.5])
        );
        let y = PauliHamiltonian::from_labels(1, &[(1.0, "Y")]).unwrap();
        let m = pauli_reconstruct(&y);
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
        assert!(y.to_dense_real().is_err());
    }

    #[test]
    fn qubit_ordering_matches_kronecker() {
        // "ZI" = Z on qubit 1 (the high bit): diag(1, 1, -1, -1)
        let h = PauliHamiltonian::from_labels(2, &[(1.0, "ZI")]).unwrap().to_dense_real().unwrap();
        assert_eq!(h.diagonal().as_slice(), &[1.0, 1.0, -1.0, -1.0]);
        let h = PauliHamiltonian::from_labels(2, &[(1.0, "IX")]).unwrap().to_dense_real().unwrap();
        assert_eq!(h[(1, 0)], 1.0);
        assert_eq!(h[(3, 2)], 1.0);
        assert_eq!(h[(2, 0)], 0.0);
    }

    #[test]
    fn sixteen_by_sixteen_matches_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_symmetric(16, &mut rng);
        let ph = pauli_decompose_matrix(&h, DEFAULT_PRUNE).unwrap();
        for p in all_strings(4) {
            let c = naive_coeff(&p, &h);
            assert!(c.im.abs() < 1e-15);
            assert!((c.re - ph.coeff(&p)).abs() <= 1e-12, "{p}");
            if p.y_count() % 2 == 1 {
                assert_eq!(ph.coeff(&p), 0.0);
            }
        }
        let back = ph.to_dense_real().unwrap();
        assert!((back - &h).amax() <= 1e-10);
        assert_eq!(ph.coeff(&PauliString::identity(4)), h.trace() / 16.0);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let ph = PauliHamiltonian::from_labels(2, &[(0.25, "ZZ"), (-1.5, "XI")]).unwrap();
        let text = ph.to_json();
        assert!(text.contains("\"p\": \"ZZ\""));
        assert_eq!(PauliHamiltonian::from_json(&text).unwrap(), ph);
        assert!(PauliHamiltonian::from_json(r#"{"n_qubits":2,"terms":[{"c":1,"p":"Z"}]}"#).is_err());
        assert!(PauliHamiltonian::from_json(
            r#"{"n_qubits":1,"terms":[{"c":1,"p":"Z"},{"c":2,"p":"Z"}]}"#
        )
        .is_err());
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            pauli_decompose_matrix(&DMatrix::identity(3, 3), DEFAULT_PRUNE),
            Err(HamiltonianError::NotPowerOfTwo(3))
        ));
    }
}
