//! Uniform Clifford sampling and Clifford-basis measurement.
//!
//! A Clifford `C` is stored (modulo global phase) as the images of the Pauli
//! generators under conjugation: row `j` is `C X_j C†` and row `n + j` is
//! `C Z_j C†`.

mod symplectic;
mod tableau;

pub use symplectic::{symplectic_from_index, symplectic_group_order, IndexDigits, RandomDigits};
pub use tableau::{
    clifford_group_order, measure_in_clifford_basis, sample_uniform_clifford, tableau_to_unitary,
    CliffordTableau, MeasurementRecord, PauliRow,
};
