//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn sigma(label: char) -> CMatrix {
    let e = match label {
        'I' => [c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)],
        'X' => [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
        'Y' => [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
        'Z' => [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
        _ => panic!("not a Pauli: {label}"),
    };
    CMatrix::from_row_slice(2, 2, &e)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Dense operator of a label whose first character acts on the most
/// significant qubit.
pub fn pauli_dense(label: &str) -> CMatrix {
    let mut out = CMatrix::from_element(1, 1, c(1., 0.));
    for ch in label.chars() {
        out = kron(&out, &sigma(ch));
    }
    out
}

pub fn all_labels(n: u32) -> Vec<String> {
    let mut labels = vec![String::new()];
    for _ in 0..n {
        labels = labels.iter().flat_map(|l| "IXYZ".chars().map(move |ch| format!("{l}{ch}"))).collect();
    }
    labels
}

/// `Tr(P H) / 2^N` for every string, by brute force.
pub fn naive_coefficients(h: &DMatrix<f64>) -> Vec<(String, Complex64)> {
    let dim = h.nrows();
    let n = dim.trailing_zeros();
    all_labels(n)
        .into_iter()
        .map(|label| {
            let p = pauli_dense(&label);
            let mut tr = c(0., 0.);
            for i in 0..dim {
                for j in 0..dim {
                    tr += p[(i, j)] * h[(j, i)];
                }
            }
            (label, tr / dim as f64)
        })
        .collect()
}

pub fn random_symmetric(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let v = rng.gen_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `A Aᵀ + dim·I`: symmetric positive definite with a modest condition number.
pub fn random_spd(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(dim, dim) * dim as f64
}

pub fn random_amplitudes(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

/// Textbook single-qubit gate matrices.
pub fn gate_2x2(name: &str, theta: f64) -> CMatrix {
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let i = c(0., 1.);
    let id = sigma('I');
    match name {
        "rx" => id.map(|z| z * ch) - sigma('X').map(|z| z * i * sh),
        "ry" => id.map(|z| z * ch) - sigma('Y').map(|z| z * i * sh),
        "rz" => id.map(|z| z * ch) - sigma('Z').map(|z| z * i * sh),
        "h" => (sigma('X') + sigma('Z')).map(|z| z / 2f64.sqrt()),
        "sdg" => CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., -1.)]),
        _ => panic!("unknown gate {name}"),
    }
}

/// `op` on qubit `q` of an `n`-qubit register (qubit 0 least significant).
pub fn embed(n: u32, q: u32, op: &CMatrix) -> CMatrix {
    let id = sigma('I');
    let mut out = CMatrix::from_element(1, 1, c(1., 0.));
    for k in (0..n).rev() {
        out = kron(&out, if k == q { op } else { &id });
    }
    out
}

/// `|0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ U_t`.
pub fn controlled(n: u32, control: u32, target: u32, u: &CMatrix) -> CMatrix {
    let p0 = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
    let p1 = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
    embed(n, control, &p0) + embed(n, control, &p1) * embed(n, target, u)
}

/// Smallest eigenvalue and spectral norm with nalgebra's solver.
pub fn extremes(h: &DMatrix<f64>) -> (f64, f64) {
    let e = h.clone().symmetric_eigen().eigenvalues;
    let min = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let norm = e.iter().map(|x| x.abs()).fold(0.0, f64::max);
    (min, norm)
}
