//! Haar-random states and unitaries, and the overlap-tail experiment.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::qcore::{check_capacity, fidelity, PureState, UnitaryOp, C64, MAX_QUBITS};
use crate::{Error, Result};

/// Standard complex Gaussian with `E|z|² = 1`.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar unitary via QR of a complex Ginibre matrix, with the columns of `Q`
/// rescaled by the phases of `diag(R)`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryOp> {
    check_capacity(n, MAX_QUBITS)?;
    let dim = 1usize << n;
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..dim {
        let d = r[(c, c)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        q.column_mut(c).iter_mut().for_each(|x| *x *= phase);
    }
    Ok(UnitaryOp::from_raw(n, q))
}

/// Haar state as a normalized complex Gaussian vector.
pub fn sample_haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    check_capacity(n, MAX_QUBITS)?;
    let amps = (0..1usize << n).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(amps)
}

/// Tail of `|⟨ψ|φ⟩|²` for Haar `ψ` against a fixed `φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub n: usize,
    pub epsilons: Vec<f64>,
    pub empirical_tail: Vec<f64>,
    /// `e^{-εN}`.
    pub tail_bound: Vec<f64>,
    /// Exact `Pr[|⟨ψ|φ⟩|² ≥ ε] = (1 - ε)^{N-1}`.
    #[serde(rename = "exact_cdf")]
    pub exact_tail: Vec<f64>,
    pub samples: usize,
}

impl TailReport {
    /// Whether `e^{-εN}` is a valid upper bound on the exact tail at index `i`.
    pub fn bound_holds(&self, i: usize) -> bool {
        self.exact_tail[i] <= self.tail_bound[i]
    }

    pub fn binomial_sigma(&self, i: usize) -> f64 {
        crate::stats::binomial_sigma(self.exact_tail[i], self.samples)
    }
}

/// `(1 - ε)^{N-1}`, the survival function of `Beta(1, N - 1)`.
pub fn exact_overlap_tail(dim: usize, eps: f64) -> f64 {
    (1.0 - eps).max(0.0).powi(dim as i32 - 1)
}

pub fn overlap_tail_experiment<R: Rng + ?Sized>(
    n: usize,
    epsilons: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<TailReport> {
    if samples == 0 {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    if let Some(&e) = epsilons.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::InvalidParameter(format!("epsilon {e} not in (0, 1]")));
    }
    let phi = sample_haar_state(n, rng)?;
    let mut hits = vec![0usize; epsilons.len()];
    for _ in 0..samples {
        let psi = sample_haar_state(n, rng)?;
        let f = fidelity(&psi, &phi)?;
        for (h, &e) in hits.iter_mut().zip(epsilons) {
            if f >= e {
                *h += 1;
            }
        }
    }
    let dim = 1usize << n;
    Ok(TailReport {
        n,
        epsilons: epsilons.to_vec(),
        empirical_tail: hits.iter().map(|&h| h as f64 / samples as f64).collect(),
        tail_bound: epsilons.iter().map(|e| (-e * dim as f64).exp()).collect(),
        exact_tail: epsilons.iter().map(|&e| exact_overlap_tail(dim, e)).collect(),
        samples,
    })
}

/// Mean of `|⟨ψ_i|ψ_j⟩|^{2t}` over pairs `i ≠ j`.
pub fn frame_potential(states: &[PureState], t: u32) -> Result<f64> {
    if states.len() < 2 {
        return Err(Error::TooFew { needed: 2, got: states.len() });
    }
    let mut acc = 0.0;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            acc += fidelity(a, b)?.powi(t as i32);
        }
    }
    let pairs = states.len() * (states.len() - 1) / 2;
    Ok(acc / pairs as f64)
}

/// Haar value of the frame potential, `t!(N-1)!/(N+t-1)!`.
pub fn haar_frame_potential(dim: usize, t: u32) -> f64 {
    (1..=t).map(|k| k as f64 / (dim as f64 + k as f64 - 1.0)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::unitary_defect_for_tests;
    use crate::RandomStream;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = RandomStream::from_seed(5);
        for n in 1..=4 {
            let u = sample_haar_unitary(n, &mut rng).unwrap();
            assert!(unitary_defect_for_tests(&u) < 1e-8);
        }
    }

    #[test]
    fn haar_state_norm() {
        let mut rng = RandomStream::from_seed(6);
        let s = sample_haar_state(6, &mut rng).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn capacity_and_zero_samples() {
        let mut rng = RandomStream::from_seed(0);
        assert!(matches!(sample_haar_state(25, &mut rng), Err(Error::Capacity { .. })));
        assert!(overlap_tail_experiment(2, &[0.5], 0, &mut rng).is_err());
        assert!(overlap_tail_experiment(2, &[0.0], 10, &mut rng).is_err());
    }

    #[test]
    fn small_epsilon_tail_is_one() {
        let mut rng = RandomStream::from_seed(8);
        let r = overlap_tail_experiment(3, &[1e-12], 200, &mut rng).unwrap();
        assert_eq!(r.empirical_tail[0], 1.0);
        assert!((r.tail_bound[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identical_states_have_unit_frame_potential() {
        let s = PureState::plus(3).unwrap();
        let v = vec![s.clone(), s.clone(), s];
        assert!((frame_potential(&v, 3).unwrap() - 1.0).abs() < 1e-12);
        assert!(frame_potential(&v[..1], 1).is_err());
    }

    #[test]
    fn haar_moment_closed_form() {
        assert!((haar_frame_potential(4, 1) - 0.25).abs() < 1e-15);
        assert!((haar_frame_potential(4, 2) - 2.0 / 20.0).abs() < 1e-15);
    }
}
