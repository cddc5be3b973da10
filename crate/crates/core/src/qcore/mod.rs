//! Dense statevector linear algebra, Born-rule sampling and unitary-channel norms.
//!
//! Basis index convention: qubit 0 is the most significant bit, so
//! `|0⟩ ⊗ |1⟩ = |01⟩` has its weight at index 1.

pub mod gates;
mod norms;
mod state;
mod unitary;

pub use norms::{diamond_distance_unitary, frobenius_distance, polygon_distance_complement, relative_eigenvalues};
pub use state::{
    fidelity, measure_computational, tensor, tensor_capped, Bitstring, BornSampler, PureState,
};
pub use unitary::{apply, UnitaryOp};

pub use num_complex::Complex64 as C64;

/// Default hard cap on simulated qubits.
pub const MAX_QUBITS: usize = 24;
/// Tolerance on `| ||ψ|| - 1 |`.
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance on `||U†U - I||_F`.
pub const UNITARY_TOL: f64 = 1e-8;
/// Tolerance on `| |λ| - 1 |` for eigenvalues of unitaries.
pub const EIGEN_TOL: f64 = 1e-7;

use crate::{Error, Result};

pub(crate) fn check_capacity(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::Capacity { requested: n, max: cap })
    } else {
        Ok(())
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Bit position of qubit `q` in an `n`-qubit basis index.
#[inline]
pub fn qubit_bit(n: usize, q: usize) -> usize {
    n - 1 - q
}

#[cfg(test)]
pub(crate) fn unitary_defect_for_tests(u: &UnitaryOp) -> f64 {
    unitary::unitarity_defect(u.matrix())
}
