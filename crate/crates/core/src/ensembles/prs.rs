use rand::Rng;
use serde::{Deserialize, Serialize};

use super::prf::{binary_phase_state, PrfBackend, PrfFamily};
use crate::haar::sample_haar_state;
use crate::qcore::{check_capacity, PureState, MAX_QUBITS};
use crate::{Error, Result};

/// Generation rule of a keyed state family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrsKind {
    /// Binary-phase states over a PRF with the given backend.
    BinaryPhase(PrfBackend),
    /// `key_count` independent Haar states, stored.
    HaarTable,
    /// Caller-supplied state list.
    Custom,
}

#[derive(Clone, Debug)]
enum Generator {
    BinaryPhase(PrfFamily),
    Table(Vec<PureState>),
}

/// Keyed family `{|φ_k⟩}`; generation is deterministic per key.
#[derive(Clone, Debug)]
pub struct PrsFamily {
    n: usize,
    kind: PrsKind,
    generator: Generator,
}

impl PrsFamily {
    pub fn binary_phase(prf: PrfFamily) -> Result<Self> {
        check_capacity(prf.n() as usize, MAX_QUBITS)?;
        Ok(Self { n: prf.n() as usize, kind: PrsKind::BinaryPhase(prf.backend()), generator: Generator::BinaryPhase(prf) })
    }

    pub fn custom(states: Vec<PureState>) -> Result<Self> {
        let n = states.first().ok_or(Error::TooFew { needed: 1, got: 0 })?.n();
        if let Some(s) = states.iter().find(|s| s.n() != n) {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: s.dim() });
        }
        Ok(Self { n, kind: PrsKind::Custom, generator: Generator::Table(states) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> PrsKind {
        self.kind
    }

    pub fn key_count(&self) -> u64 {
        match &self.generator {
            Generator::BinaryPhase(p) => p.key_count(),
            Generator::Table(t) => t.len() as u64,
        }
    }

    pub fn prf(&self) -> Option<&PrfFamily> {
        match &self.generator {
            Generator::BinaryPhase(p) => Some(p),
            Generator::Table(_) => None,
        }
    }

    /// `|φ_key⟩`.
    pub fn state(&self, key: u64) -> Result<PureState> {
        match &self.generator {
            Generator::BinaryPhase(p) => binary_phase_state(p, key),
            Generator::Table(t) => t
                .get(key as usize)
                .cloned()
                .ok_or(Error::OutOfRange { what: "key", value: key, limit: t.len() as u64 }),
        }
    }
}

/// Builds a family of `kind`; PRF keys (or table entries) come from `rng`.
pub fn make_prs_family<R: Rng + ?Sized>(kind: PrsKind, n: usize, key_count: u64, rng: &mut R) -> Result<PrsFamily> {
    check_capacity(n, MAX_QUBITS)?;
    if key_count == 0 {
        return Err(Error::InvalidParameter("key_count must be positive".into()));
    }
    match kind {
        PrsKind::BinaryPhase(backend) => {
            PrsFamily::binary_phase(PrfFamily::new(backend, n as u32, key_count, rng.random())?)
        }
        PrsKind::HaarTable => {
            let states = (0..key_count).map(|_| sample_haar_state(n, rng)).collect::<Result<Vec<_>>>()?;
            let mut fam = PrsFamily::custom(states)?;
            fam.kind = PrsKind::HaarTable;
            Ok(fam)
        }
        PrsKind::Custom => Err(Error::InvalidParameter("custom families are built with PrsFamily::custom".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RandomStream;

    #[test]
    fn generated_states_are_normalized() {
        let mut rng = RandomStream::from_seed(40);
        for kind in [PrsKind::BinaryPhase(PrfBackend::Mixer), PrsKind::BinaryPhase(PrfBackend::Balanced), PrsKind::HaarTable] {
            let fam = make_prs_family(kind, 4, 6, &mut rng).unwrap();
            assert_eq!(fam.kind(), kind);
            for k in 0..6 {
                assert!((fam.state(k).unwrap().norm() - 1.0).abs() < 1e-9);
                assert_eq!(fam.state(k).unwrap(), fam.state(k).unwrap());
            }
            assert!(fam.state(6).is_err());
        }
    }

    #[test]
    fn custom_rejects_mixed_sizes() {
        let a = PureState::zero(1).unwrap();
        let b = PureState::zero(2).unwrap();
        assert!(PrsFamily::custom(vec![a, b]).is_err());
        assert!(PrsFamily::custom(vec![]).is_err());
    }
}
