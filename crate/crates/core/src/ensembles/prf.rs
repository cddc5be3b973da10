use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::qcore::{check_capacity, PureState, C64, MAX_QUBITS};
use crate::{mix64, Error, RandomStream, Result};

/// Backend descriptor of a toy PRF family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrfBackend {
    /// Keyed 64-bit avalanche mixer truncated to one bit; near-balanced.
    Mixer,
    /// Stored random truth tables with exactly `2^{n-1}` ones each.
    Balanced,
}

/// Keyed family of functions `{0,1}^n → {0,1}`.
#[derive(Clone, Debug)]
pub struct PrfFamily {
    n: u32,
    key_count: u64,
    seed: u64,
    backend: PrfBackend,
    tables: Vec<u64>,
}

const MAX_TABLE_BITS: u64 = 1 << 30;

impl PrfFamily {
    pub fn new(backend: PrfBackend, n: u32, key_count: u64, seed: u64) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::OutOfRange { what: "PRF input bits", value: u64::from(n), limit: 32 });
        }
        if key_count == 0 {
            return Err(Error::InvalidParameter("key_count must be positive".into()));
        }
        let mut fam = Self { n, key_count, seed, backend, tables: Vec::new() };
        if backend == PrfBackend::Balanced {
            if n > 16 {
                return Err(Error::OutOfRange { what: "balanced-table input bits", value: u64::from(n), limit: 16 });
            }
            let bits = key_count.saturating_mul(1 << n);
            if bits > MAX_TABLE_BITS {
                return Err(Error::OutOfRange { what: "truth-table bits", value: bits, limit: MAX_TABLE_BITS });
            }
            fam.tables = fam.build_tables();
        }
        Ok(fam)
    }

    pub fn mixer(n: u32, key_count: u64, seed: u64) -> Result<Self> {
        Self::new(PrfBackend::Mixer, n, key_count, seed)
    }

    pub fn balanced(n: u32, key_count: u64, seed: u64) -> Result<Self> {
        Self::new(PrfBackend::Balanced, n, key_count, seed)
    }

    fn words_per_key(&self) -> usize {
        ((1usize << self.n) + 63) / 64
    }

    fn build_tables(&self) -> Vec<u64> {
        let dim = 1usize << self.n;
        let wpk = self.words_per_key();
        let mut tables = vec![0u64; wpk * self.key_count as usize];
        let root = RandomStream::from_seed(self.seed);
        let mut idx: Vec<usize> = (0..dim).collect();
        for key in 0..self.key_count as usize {
            let mut rng = root.derive("prf-table", key as u64);
            idx.iter_mut().enumerate().for_each(|(i, v)| *v = i);
            let (ones, _) = idx.partial_shuffle(&mut rng, dim / 2);
            let words = &mut tables[key * wpk..(key + 1) * wpk];
            for &x in ones.iter() {
                words[x / 64] |= 1 << (x % 64);
            }
        }
        tables
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn key_count(&self) -> u64 {
        self.key_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn backend(&self) -> PrfBackend {
        self.backend
    }

    pub fn is_exact_balanced(&self) -> bool {
        self.backend == PrfBackend::Balanced
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, key: u64, x: u64) -> bool {
        match self.backend {
            PrfBackend::Mixer => {
                let k = mix64(self.seed ^ key.wrapping_mul(0xD1B5_4A32_D192_ED03));
                mix64(k ^ x.wrapping_mul(0x9E37_79B9_7F4A_7C15)) & 1 == 1
            }
            PrfBackend::Balanced => {
                let x = x as usize;
                let w = self.tables[key as usize * self.words_per_key() + x / 64];
                (w >> (x % 64)) & 1 == 1
            }
        }
    }

    pub fn truth_table(&self, key: u64) -> Result<Vec<bool>> {
        self.check_key(key)?;
        Ok((0..1u64 << self.n).map(|x| self.eval_unchecked(key, x)).collect())
    }

    fn check_key(&self, key: u64) -> Result<()> {
        if key >= self.key_count {
            return Err(Error::OutOfRange { what: "key", value: key, limit: self.key_count });
        }
        Ok(())
    }
}

pub fn prf_eval(family: &PrfFamily, key: u64, x: u64) -> Result<bool> {
    family.check_key(key)?;
    let dim = 1u64 << family.n;
    if x >= dim {
        return Err(Error::OutOfRange { what: "input", value: x, limit: dim });
    }
    Ok(family.eval_unchecked(key, x))
}

/// `2^{-n/2} Σ_x (-1)^{f_k(x)} |x⟩`.
pub fn binary_phase_state(family: &PrfFamily, key: u64) -> Result<PureState> {
    check_capacity(family.n as usize, MAX_QUBITS)?;
    family.check_key(key)?;
    let dim = 1usize << family.n;
    let a = (dim as f64).sqrt().recip();
    let amps = (0..dim as u64)
        .map(|x| if family.eval_unchecked(key, x) { C64::new(-a, 0.0) } else { C64::new(a, 0.0) })
        .collect();
    Ok(PureState::from_raw(family.n as usize, amps))
}
