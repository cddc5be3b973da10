use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{binary_phase_state, PrfBackend, PrfFamily};
use crate::haar::sample_haar_state;
use crate::qcore::gates::{apply_cswap, apply_hadamard_all, apply_mcx};
use crate::qcore::{check_capacity, BornSampler, Bitstring, PureState, C64, MAX_QUBITS};
use crate::{Error, RandomStream, Result};

/// Largest family searched by brute force.
pub const KEY_SEARCH_CAP: u64 = 1 << 20;

const MAX_ATTEMPTS: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CollisionPair {
    pub x: Bitstring,
    pub y: Bitstring,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionSample {
    pub pair: CollisionPair,
    /// Circuit runs used; all but the last measured the control as 1.
    pub attempts: u32,
}

/// Output of the pair-sampling circuit on `|0⟩|ψ⟩|0^n⟩`, qubit 0 the control:
/// `H` on control and register B, controlled swap of A and B, then
/// `H^{⊗n}` on A, a NOT on the control controlled on `A = 0^n`, `H^{⊗n}` on A.
pub fn collision_circuit_output(state: &PureState) -> Result<PureState> {
    let n = state.n();
    let total = 2 * n + 1;
    check_capacity(total, MAX_QUBITS)?;
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << total];
    for (x, a) in state.amplitudes().iter().enumerate() {
        amps[x << n] = *a;
    }
    let reg_a: Vec<usize> = (1..=n).collect();
    let reg_b: Vec<usize> = (n + 1..=2 * n).collect();
    apply_hadamard_all(&mut amps, total, std::iter::once(0).chain(reg_b.iter().copied()));
    apply_cswap(&mut amps, total, 0, &reg_a, &reg_b);
    apply_hadamard_all(&mut amps, total, reg_a.iter().copied());
    let open: Vec<(usize, bool)> = reg_a.iter().map(|&q| (q, false)).collect();
    apply_mcx(&mut amps, total, &open, 0);
    apply_hadamard_all(&mut amps, total, reg_a.iter().copied());
    debug_assert_eq!(amps.len(), 2 * dim * dim);
    PureState::normalized(amps)
}

/// Repeated measurement of the collision circuit for one fixed input state.
#[derive(Clone, Debug)]
pub struct CollisionSampler {
    n: usize,
    sampler: BornSampler,
    control_zero: f64,
}

impl CollisionSampler {
    pub fn new(state: &PureState) -> Result<Self> {
        let out = collision_circuit_output(state)?;
        let half = out.dim() / 2;
        let control_zero = out.amplitudes()[..half].iter().map(|a| a.norm_sqr()).sum();
        Ok(Self { n: state.n(), sampler: BornSampler::from_state(&out), control_zero })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability that the control reads 0.
    pub fn control_zero_probability(&self) -> f64 {
        self.control_zero
    }

    /// Measures every qubit, repeating until the control reads 0.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CollisionSample> {
        let n = self.n;
        let low = (1usize << (2 * n)) - 1;
        for attempts in 1..=MAX_ATTEMPTS {
            let idx = self.sampler.sample(rng);
            if idx >> (2 * n) == 0 {
                let idx = idx & low;
                let pair = CollisionPair {
                    x: Bitstring::new((idx >> n) as u64, n),
                    y: Bitstring::new((idx & ((1 << n) - 1)) as u64, n),
                };
                return Ok(CollisionSample { pair, attempts });
            }
        }
        Err(Error::InvalidParameter(format!(
            "control never read 0 in {MAX_ATTEMPTS} attempts (probability {:e})",
            self.control_zero
        )))
    }
}

/// One pair from one copy of `|φ_key⟩`.
pub fn sample_collision_pair<R: Rng + ?Sized>(family: &PrfFamily, key: u64, rng: &mut R) -> Result<CollisionSample> {
    CollisionSampler::new(&binary_phase_state(family, key)?)?.sample(rng)
}

/// Lowest key with `f_k(x) = f_k(y)` on every pair, by exhaustive search.
pub fn np_oracle_key_search(pairs: &[CollisionPair], family: &PrfFamily) -> Result<Option<u64>> {
    let keys = family.key_count();
    if keys > KEY_SEARCH_CAP {
        return Err(Error::SearchCap { keys, cap: KEY_SEARCH_CAP });
    }
    let limit = 1u64 << family.n();
    if let Some(p) = pairs.iter().find(|p| p.x.len != family.n() as usize || p.y.len != family.n() as usize) {
        return Err(Error::DimensionMismatch { expected: family.n() as usize, found: p.x.len.max(p.y.len) });
    }
    if let Some(p) = pairs.iter().find(|p| p.x.value >= limit || p.y.value >= limit) {
        return Err(Error::OutOfRange { what: "pair entry", value: p.x.value.max(p.y.value), limit });
    }
    Ok((0..keys).find(|&k| pairs.iter().all(|p| family.eval_unchecked(k, p.x.value) == family.eval_unchecked(k, p.y.value))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackBranchStats {
    pub accept_rate: f64,
    pub accept_stderr: f64,
    pub mean_control_zero: f64,
    pub mean_attempts: f64,
    /// Sampled pairs with `f_k(x) ≠ f_k(y)`; only counted on the PRS branch.
    pub non_collision_pairs: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackendAttackReport {
    pub backend: PrfBackend,
    pub prs: AttackBranchStats,
    pub haar: AttackBranchStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub n: usize,
    pub key_count: u64,
    pub pairs_per_trial: usize,
    pub trials: usize,
    pub backends: Vec<BackendAttackReport>,
}

/// The full game for each backend: PRS branch on `|φ_k⟩` with a uniform key,
/// Haar branch on a fresh Haar state; the search accepts if any key survives.
pub fn binary_phase_attack_experiment(
    n: usize,
    key_count: u64,
    pairs_per_trial: usize,
    trials: usize,
    backends: &[PrfBackend],
    rng: &RandomStream,
) -> Result<AttackReport> {
    check_capacity(2 * n + 1, MAX_QUBITS)?;
    if key_count > KEY_SEARCH_CAP {
        return Err(Error::SearchCap { keys: key_count, cap: KEY_SEARCH_CAP });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut reports = Vec::with_capacity(backends.len());
    for (b, &backend) in backends.iter().enumerate() {
        let family_seed = rng.derive("attack-family", b as u64).seed();
        let family = PrfFamily::new(backend, n as u32, key_count, family_seed)?;
        let prs = run_branch(&family, pairs_per_trial, trials, true, &rng.derive("attack-prs", b as u64))?;
        let haar = run_branch(&family, pairs_per_trial, trials, false, &rng.derive("attack-haar", b as u64))?;
        reports.push(BackendAttackReport { backend, prs, haar });
    }
    Ok(AttackReport { n, key_count, pairs_per_trial, trials, backends: reports })
}

fn run_branch(
    family: &PrfFamily,
    pairs_per_trial: usize,
    trials: usize,
    pseudorandom: bool,
    rng: &RandomStream,
) -> Result<AttackBranchStats> {
    let n = family.n() as usize;
    let mut accepts = 0usize;
    let mut control_zero = 0.0;
    let mut attempts = 0u64;
    let mut bad = 0u64;
    for i in 0..trials {
        let mut trial_rng = rng.derive("trial", i as u64);
        let (state, key) = if pseudorandom {
            let k = trial_rng.random_range(0..family.key_count());
            (binary_phase_state(family, k)?, Some(k))
        } else {
            (sample_haar_state(n, &mut trial_rng)?, None)
        };
        let sampler = CollisionSampler::new(&state)?;
        control_zero += sampler.control_zero_probability();
        let mut pairs = Vec::with_capacity(pairs_per_trial);
        for _ in 0..pairs_per_trial {
            let s = sampler.sample(&mut trial_rng)?;
            attempts += u64::from(s.attempts);
            if let Some(k) = key {
                if family.eval_unchecked(k, s.pair.x.value) != family.eval_unchecked(k, s.pair.y.value) {
                    bad += 1;
                }
            }
            pairs.push(s.pair);
        }
        if np_oracle_key_search(&pairs, family)?.is_some() {
            accepts += 1;
        }
    }
    let p = accepts as f64 / trials as f64;
    Ok(AttackBranchStats {
        accept_rate: p,
        accept_stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        mean_control_zero: control_zero / trials as f64,
        mean_attempts: attempts as f64 / (trials * pairs_per_trial).max(1) as f64,
        non_collision_pairs: bad,
    })
}
