//! Random circuits over `{CNOT, H, T, T†}` as approximate unitary designs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qcore::gates::Gate;
use crate::qcore::{check_capacity, PureState, UnitaryOp, C64, MAX_QUBITS};
use crate::{Error, Result};

/// Gate-count schedule `L = ceil(c · n · t² · (n·t + ln(1/ε)))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignSchedule {
    pub c: f64,
}

impl Default for DesignSchedule {
    fn default() -> Self {
        Self { c: 1.0 }
    }
}

pub fn design_gate_count(n: usize, t: usize, eps: f64, schedule: DesignSchedule) -> usize {
    let (nf, tf) = (n as f64, t as f64);
    (schedule.c * nf * tf * tf * (nf * tf + (1.0 / eps).ln())).ceil().max(1.0) as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignCircuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl DesignCircuit {
    pub fn apply_in_place(&self, amps: &mut [C64]) {
        for g in &self.gates {
            g.apply(amps, self.n);
        }
    }

    pub fn apply_to(&self, s: &PureState) -> Result<PureState> {
        crate::qcore::check_dims(1 << self.n, s.dim())?;
        let mut amps = s.amplitudes().to_vec();
        self.apply_in_place(&mut amps);
        PureState::normalized(amps)
    }

    /// `U|0…0⟩`.
    pub fn output_state(&self) -> PureState {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << self.n];
        amps[0] = C64::new(1.0, 0.0);
        self.apply_in_place(&mut amps);
        PureState::normalized(amps).expect("gates preserve the norm")
    }

    pub fn to_unitary(&self) -> UnitaryOp {
        let dim = 1usize << self.n;
        let mut mat = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for c in 0..dim {
            col.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            col[c] = C64::new(1.0, 0.0);
            self.apply_in_place(&mut col);
            mat.column_mut(c).iter_mut().zip(&col).for_each(|(m, a)| *m = *a);
        }
        UnitaryOp::from_raw(self.n, mat)
    }
}

fn random_gate<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Gate {
    let choices = if n >= 2 { 4 } else { 3 };
    match rng.random_range(0..choices) {
        0 => Gate::H(rng.random_range(0..n)),
        1 => Gate::T(rng.random_range(0..n)),
        2 => Gate::Tdg(rng.random_range(0..n)),
        _ => {
            let control = rng.random_range(0..n);
            let mut target = rng.random_range(0..n - 1);
            if target >= control {
                target += 1;
            }
            Gate::Cnot { control, target }
        }
    }
}

pub fn sample_design_circuit<R: Rng + ?Sized>(
    n: usize,
    t: usize,
    eps: f64,
    schedule: DesignSchedule,
    rng: &mut R,
) -> Result<DesignCircuit> {
    check_capacity(n, MAX_QUBITS)?;
    if n == 0 || t == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("design needs n, t ≥ 1 and ε in (0,1); got n={n} t={t} ε={eps}")));
    }
    let len = design_gate_count(n, t, eps, schedule);
    Ok(DesignCircuit { n, gates: (0..len).map(|_| random_gate(n, rng)).collect() })
}

/// Dense unitary of a random design circuit under the default schedule.
pub fn sample_design_unitary<R: Rng + ?Sized>(n: usize, t: usize, eps: f64, rng: &mut R) -> Result<UnitaryOp> {
    Ok(sample_design_circuit(n, t, eps, DesignSchedule::default(), rng)?.to_unitary())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RandomStream;

    #[test]
    fn gate_count_formula() {
        let s = DesignSchedule { c: 1.0 };
        let expected = (4.0 * 4.0 * (8.0 + 10f64.ln())).ceil() as usize;
        assert_eq!(design_gate_count(4, 2, 0.1, s), expected);
    }

    #[test]
    fn output_is_unitary() {
        let mut rng = RandomStream::from_seed(50);
        let u = sample_design_unitary(3, 2, 0.1, &mut rng).unwrap();
        assert!(crate::qcore::unitary_defect_for_tests(&u) < 1e-8);
    }

    #[test]
    fn single_qubit_never_uses_cnot() {
        let mut rng = RandomStream::from_seed(51);
        let c = sample_design_circuit(1, 3, 0.1, DesignSchedule::default(), &mut rng).unwrap();
        assert!(c.gates.iter().all(|g| !matches!(g, Gate::Cnot { .. })));
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = RandomStream::from_seed(0);
        assert!(sample_design_circuit(2, 0, 0.1, DesignSchedule::default(), &mut rng).is_err());
        assert!(sample_design_circuit(2, 2, 0.0, DesignSchedule::default(), &mut rng).is_err());
        assert!(sample_design_circuit(30, 2, 0.1, DesignSchedule::default(), &mut rng).is_err());
    }
}
