//! Fundamental natural frequencies of small structural models through a
//! variational quantum eigensolver running on a built-in statevector
//! simulator.
//!
//! Pipeline: [`fem`] generates (or [`matrixio`] ingests) stiffness and mass
//! matrices, [`hamiltonian`] turns the free-DOF pair into a qubit
//! Hamiltonian, [`quantum`] simulates the ansatz, [`vqe`] optimizes it and
//! [`bench`] runs parametric sweeps against the classical eigensolver.

pub mod bench;
pub mod fem;
pub mod hamiltonian;
pub mod matrixio;
pub mod quantum;
pub mod vqe;
