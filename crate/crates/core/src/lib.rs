//! Desk-scale workbench for attacking pseudorandom quantum states.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`] dense statevectors, unitaries, gate kernels and channel norms
//! * [`haar`] exact Haar sampling and overlap statistics
//! * [`clifford`] uniform Clifford sampling and Clifford-basis measurement
//! * [`ensembles`] keyed state families, toy PRFs, random-circuit designs, k-wise families
//! * [`shadows`] the classical-shadow fidelity estimator
//! * [`attacks`] the shadow/Bayes distinguisher, the collision-pair attack and the PRU game
//! * [`harness`] experiment configs, dispatch and reports
//!
//! Every randomised routine takes an explicit [`RandomStream`].

pub mod attacks;
pub mod clifford;
pub mod ensembles;
mod error;
pub mod haar;
pub mod harness;
pub mod qcore;
mod rng;
pub mod shadows;
pub mod stats;

pub use error::{Error, Result};
pub use rng::{derive_seed, mix64, RandomStream};
