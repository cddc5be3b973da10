//! Keyed state families, toy PRFs, random-circuit designs and k-wise
//! independent function families.

mod design;
mod gf2k;
mod kwise;
mod prf;
mod prs;

pub use design::{design_gate_count, sample_design_circuit, sample_design_unitary, DesignCircuit, DesignSchedule};
pub use gf2k::{Gf2k, IRREDUCIBLE_POLYNOMIALS};
pub use kwise::{kwise_eval, KWiseFamily};
pub use prf::{binary_phase_state, prf_eval, PrfBackend, PrfFamily};
pub use prs::{make_prs_family, PrsFamily, PrsKind};
