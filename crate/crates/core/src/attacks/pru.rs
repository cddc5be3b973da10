use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::haar::sample_haar_unitary;
use crate::qcore::gates::{apply_cswap, apply_hadamard_all};
use crate::qcore::{apply, check_capacity, tensor, PureState, UnitaryOp, MAX_QUBITS};
use crate::stats::mean_stderr;
use crate::{Error, RandomStream, Result};

/// Fixed query strategies for the PRU game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adversary {
    /// Picks a uniform family index `j` and swap-tests `O|0⟩` against
    /// `U_j|0⟩` once per query; outputs 1 iff every test accepts.
    SwapTest,
    /// Outputs a fair coin.
    Ignore,
}

impl std::str::FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap-test" => Ok(Self::SwapTest),
            "ignore" => Ok(Self::Ignore),
            other => Err(Error::InvalidParameter(format!("unknown adversary `{other}` (swap-test, ignore)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    #[serde(rename = "N")]
    pub family_size: usize,
    #[serde(rename = "T")]
    pub queries: usize,
    pub adversary: Adversary,
    pub trials: usize,
    pub adv_hat: f64,
    pub adv_stderr: f64,
    pub accept_pru: f64,
    pub accept_haar: f64,
    /// Closed form, when one is known for the adversary.
    pub predicted: Option<f64>,
}

/// Swap-test advantage at one query with `D = N`: `(1 - 1/N) / (2N)`.
pub fn swap_test_prediction(family_size: usize) -> f64 {
    let n = family_size as f64;
    (1.0 - 1.0 / n) / (2.0 * n)
}

/// Members of the family are drawn only when first queried.
struct LazyFamily {
    n: usize,
    seed_stream: RandomStream,
    members: HashMap<usize, UnitaryOp>,
}

impl LazyFamily {
    fn get(&mut self, k: usize) -> Result<&UnitaryOp> {
        if !self.members.contains_key(&k) {
            let mut r = self.seed_stream.derive("member", k as u64);
            let u = sample_haar_unitary(self.n, &mut r)?;
            self.members.insert(k, u);
        }
        Ok(&self.members[&k])
    }
}

fn swap_test_accept<R: Rng + ?Sized>(a: &PureState, b: &PureState, rng: &mut R) -> Result<bool> {
    let n = a.n();
    let total = 2 * n + 1;
    let mut amps = tensor(&PureState::zero(1)?, &tensor(a, b)?)?.into_amplitudes();
    let reg_a: Vec<usize> = (1..=n).collect();
    let reg_b: Vec<usize> = (n + 1..=2 * n).collect();
    apply_hadamard_all(&mut amps, total, [0]);
    apply_cswap(&mut amps, total, 0, &reg_a, &reg_b);
    apply_hadamard_all(&mut amps, total, [0]);
    let p0: f64 = amps[..amps.len() / 2].iter().map(|z| z.norm_sqr()).sum();
    Ok(rng.random::<f64>() < p0)
}

fn run_adversary<R: Rng + ?Sized>(
    adversary: Adversary,
    oracle: &UnitaryOp,
    reference: &UnitaryOp,
    queries: usize,
    rng: &mut R,
) -> Result<bool> {
    match adversary {
        Adversary::Ignore => Ok(rng.random::<bool>()),
        Adversary::SwapTest => {
            let zero = PureState::zero(oracle.n())?;
            let a = apply(oracle, &zero)?;
            let b = apply(reference, &zero)?;
            for _ in 0..queries {
                if !swap_test_accept(&a, &b, rng)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Advantage `Pr[A^{U_k} = 1] - Pr[A^{V} = 1]` for a family of `N` Haar
/// unitaries on `D = N` dimensions. Each trial shares its family and `j`
/// across both branches.
pub fn pru_advantage_experiment(
    family_size: usize,
    queries: usize,
    adversary: Adversary,
    trials: usize,
    rng: &RandomStream,
) -> Result<AdvantageReport> {
    if !family_size.is_power_of_two() || family_size < 2 {
        return Err(Error::NotPowerOfTwo(family_size));
    }
    let n = family_size.trailing_zeros() as usize;
    check_capacity(2 * n + 1, MAX_QUBITS)?;
    if trials == 0 || queries == 0 {
        return Err(Error::InvalidParameter("trials and queries must be positive".into()));
    }
    let mut pru_hits = Vec::with_capacity(trials);
    let mut haar_hits = Vec::with_capacity(trials);
    let mut diffs = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut trial_rng = rng.derive("pru-trial", i as u64);
        let mut family = LazyFamily { n, seed_stream: trial_rng.derive("family", 0), members: HashMap::new() };
        let k = trial_rng.random_range(0..family_size);
        let j = trial_rng.random_range(0..family_size);
        let fresh = sample_haar_unitary(n, &mut trial_rng)?;
        let reference = family.get(j)?.clone();
        let hidden = family.get(k)?.clone();
        let a = run_adversary(adversary, &hidden, &reference, queries, &mut trial_rng)?;
        let b = run_adversary(adversary, &fresh, &reference, queries, &mut trial_rng)?;
        let (a, b) = (f64::from(u8::from(a)), f64::from(u8::from(b)));
        pru_hits.push(a);
        haar_hits.push(b);
        diffs.push(a - b);
    }
    let (adv_hat, adv_stderr) = mean_stderr(&diffs);
    let predicted = match (adversary, queries) {
        (Adversary::SwapTest, 1) => Some(swap_test_prediction(family_size)),
        (Adversary::Ignore, _) => Some(0.0),
        _ => None,
    };
    Ok(AdvantageReport {
        family_size,
        queries,
        adversary,
        trials,
        adv_hat,
        adv_stderr,
        accept_pru: mean_stderr(&pru_hits).0,
        accept_haar: mean_stderr(&haar_hits).0,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::sample_haar_state;

    #[test]
    fn swap_test_acceptance_matches_overlap() {
        let mut rng = RandomStream::from_seed(100);
        let a = sample_haar_state(2, &mut rng).unwrap();
        let b = sample_haar_state(2, &mut rng).unwrap();
        let want = (1.0 + crate::qcore::fidelity(&a, &b).unwrap()) / 2.0;
        let trials = 20_000;
        let hits = (0..trials).filter(|_| swap_test_accept(&a, &b, &mut rng).unwrap()).count();
        let p = hits as f64 / trials as f64;
        assert!((p - want).abs() < 4.0 * (0.25 / trials as f64).sqrt());
        assert!((0..100).all(|_| swap_test_accept(&a, &a, &mut rng).unwrap()));
    }

    #[test]
    fn prediction_values() {
        assert!((swap_test_prediction(8) - 7.0 / 128.0).abs() < 1e-15);
        assert!(matches!(
            pru_advantage_experiment(6, 1, Adversary::SwapTest, 1, &RandomStream::from_seed(0)),
            Err(Error::NotPowerOfTwo(6))
        ));
    }

    #[test]
    fn reports_are_reproducible() {
        let rng = RandomStream::from_seed(101);
        let a = pru_advantage_experiment(4, 1, Adversary::SwapTest, 300, &rng).unwrap();
        let b = pru_advantage_experiment(4, 1, Adversary::SwapTest, 300, &rng).unwrap();
        assert_eq!(a, b);
        assert!(a.adv_hat.abs() <= 1.0);
    }
}
