use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_capacity, check_dims, C64, MAX_QUBITS, NORM_TOL};
use crate::{Error, Result};

/// Unit-norm amplitude vector on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<C64>,
}

fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

pub(crate) fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

impl PureState {
    /// Wraps `amps`, which must already be unit norm.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len())?;
        check_capacity(n, MAX_QUBITS)?;
        let norm = norm_sqr(&amps).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { n, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len())?;
        check_capacity(n, MAX_QUBITS)?;
        let norm = norm_sqr(&amps).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        let inv = 1.0 / norm;
        amps.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { n, amps })
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n);
        Self { n, amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: u64) -> Result<Self> {
        check_capacity(n, MAX_QUBITS)?;
        let dim = 1u64 << n;
        if index >= dim {
            return Err(Error::OutOfRange { what: "basis index", value: index, limit: dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim as usize];
        amps[index as usize] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self> {
        check_capacity(n, MAX_QUBITS)?;
        let dim = 1usize << n;
        let a = C64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self { n, amps: vec![a; dim] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(inner_raw(&self.amps, &other.amps))
    }

    /// Born-rule probabilities `|amps[x]|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

#[inline]
pub(crate) fn inner_raw(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Kronecker product with the default qubit cap.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    tensor_capped(a, b, MAX_QUBITS)
}

pub fn tensor_capped(a: &PureState, b: &PureState, cap: usize) -> Result<PureState> {
    let n = a.n + b.n;
    check_capacity(n, cap)?;
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        amps.extend(b.amps.iter().map(|y| x * y));
    }
    Ok(PureState { n, amps })
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Computational-basis outcome of an `n`-qubit measurement.
///
/// `value` is the basis index; the string form lists qubit 0 first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    pub value: u64,
    pub len: usize,
}

impl Bitstring {
    pub fn new(value: u64, len: usize) -> Self {
        debug_assert!(len >= 64 || value < (1u64 << len));
        Self { value, len }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.len() > 64 {
            return Err(Error::InvalidParameter(format!("bitstring too long: {}", s.len())));
        }
        let mut value = 0u64;
        for c in s.chars() {
            value <<= 1;
            match c {
                '0' => {}
                '1' => value |= 1,
                _ => return Err(Error::InvalidParameter(format!("bad bit `{c}`"))),
            }
        }
        Ok(Self { value, len: s.len() })
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if (self.value >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Bitstring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Bitstring::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Inverse-CDF sampler for a fixed outcome distribution.
#[derive(Clone, Debug)]
pub struct BornSampler {
    cdf: Vec<f64>,
}

impl BornSampler {
    /// `weights` need not be normalized.
    pub fn new(weights: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cdf = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cdf }
    }

    pub fn from_state(s: &PureState) -> Self {
        Self::new(s.amps.iter().map(|a| a.norm_sqr()))
    }

    pub fn total(&self) -> f64 {
        self.cdf.last().copied().unwrap_or(0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total();
        let i = self.cdf.partition_point(|&c| c <= u);
        // rounding can leave u at the very top; fall back to the last non-empty bin
        if i < self.cdf.len() {
            i
        } else {
            self.cdf.iter().rposition(|&c| c < self.total()).map_or(0, |p| p + 1)
        }
    }
}

/// Samples a computational-basis outcome with probability `|amps[x]|²`.
pub fn measure_computational<R: Rng + ?Sized>(s: &PureState, rng: &mut R) -> Bitstring {
    let u = rng.random::<f64>() * norm_sqr(&s.amps);
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, a) in s.amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if u < acc {
            return Bitstring::new(i as u64, s.n);
        }
    }
    Bitstring::new(last_nonzero as u64, s.n)
}
