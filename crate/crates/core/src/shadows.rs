//! Classical-shadow fidelity estimation from random Clifford measurements.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{measure_in_clifford_basis, sample_uniform_clifford, MeasurementRecord};
use crate::qcore::PureState;
use crate::stats::median;
use crate::{Error, Result};

/// Default constant in `T_min = ceil(c · ln(2M/δ) / ε²)`.
pub const DEFAULT_C_SHADOW: f64 = 34.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowSet {
    pub n: usize,
    pub records: Vec<MeasurementRecord>,
    #[serde(default)]
    pub source: String,
}

impl ShadowSet {
    pub fn new(n: usize, records: Vec<MeasurementRecord>, source: impl Into<String>) -> Result<Self> {
        if let Some(r) = records.iter().find(|r| r.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: r.n() });
        }
        Ok(Self { n, records, source: source.into() })
    }

    /// `t` snapshots of `state`, each in an independent uniform Clifford basis.
    pub fn collect<R: Rng + ?Sized>(state: &PureState, t: usize, rng: &mut R) -> Result<Self> {
        let records = (0..t)
            .map(|_| {
                let c = sample_uniform_clifford(state.n(), rng);
                measure_in_clifford_basis(state, &c, rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(state.n(), records, "collected")
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Single-snapshot estimate of `⟨φ|ρ|φ⟩`: `(2^n + 1)·|⟨x|C|φ⟩|² - 1`. Not clipped.
pub fn snapshot_estimate(record: &MeasurementRecord, phi: &PureState) -> Result<f64> {
    let dim = (1u64 << record.n()) as f64;
    Ok((dim + 1.0) * record.probability(phi)? - 1.0)
}

/// Median of `batches` batch means. Batch size is `floor(T / batches)`; the
/// trailing `T mod batches` records are dropped.
pub fn estimate_fidelity(shadows: &ShadowSet, phi: &PureState, batches: usize) -> Result<f64> {
    let values = shadows.records.iter().map(|r| snapshot_estimate(r, phi)).collect::<Result<Vec<_>>>()?;
    median_of_means(&values, batches)
}

pub(crate) fn median_of_means(values: &[f64], batches: usize) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    if batches == 0 || batches > values.len() {
        return Err(Error::InvalidParameter(format!(
            "batch count {batches} must lie in 1..={}",
            values.len()
        )));
    }
    let size = values.len() / batches;
    let mut means: Vec<f64> = values
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    Ok(median(&mut means))
}

/// `ceil(2 · ln(2M/δ))`.
pub fn default_batches(m: usize, delta: f64) -> usize {
    (2.0 * (2.0 * m as f64 / delta).ln()).ceil().max(1.0) as usize
}

/// `ceil(c · ln(2M/δ) / ε²)`.
pub fn required_snapshots(m: usize, eps: f64, delta: f64, c_shadow: f64) -> usize {
    (c_shadow * (2.0 * m as f64 / delta).ln() / (eps * eps)).ceil() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimates: Vec<f64>,
    pub batches: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub eps: f64,
    pub delta: f64,
}

pub fn estimate_many(shadows: &ShadowSet, observables: &[PureState], eps: f64, delta: f64) -> Result<EstimateReport> {
    estimate_many_with(shadows, observables, eps, delta, DEFAULT_C_SHADOW)
}

pub fn estimate_many_with(
    shadows: &ShadowSet,
    observables: &[PureState],
    eps: f64,
    delta: f64,
    c_shadow: f64,
) -> Result<EstimateReport> {
    if observables.is_empty() {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    if !(eps > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("need ε > 0 and δ in (0,1); got ε={eps} δ={delta}")));
    }
    let m = observables.len();
    let required = required_snapshots(m, eps, delta, c_shadow);
    if shadows.len() < required {
        return Err(Error::InsufficientSnapshots { got: shadows.len(), required });
    }
    let batches = default_batches(m, delta);
    let estimates = observables
        .iter()
        .map(|phi| estimate_fidelity(shadows, phi, batches))
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport { estimates, batches, t: shadows.len(), eps, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordTableau;
    use crate::qcore::Bitstring;
    use crate::RandomStream;

    #[test]
    fn identity_snapshot_arithmetic() {
        let r = MeasurementRecord::new(CliffordTableau::identity(1), Bitstring::new(0, 1)).unwrap();
        let phi = PureState::zero(1).unwrap();
        assert!((snapshot_estimate(&r, &phi).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_batch_is_plain_mean() {
        let v = [1.0, 2.0, 6.0, -3.0];
        assert!((median_of_means(&v, 1).unwrap() - 1.5).abs() < 1e-15);
        // batches of two: means 1.5 and 1.5
        assert!((median_of_means(&v, 2).unwrap() - 1.5).abs() < 1e-15);
        // three batches of one, trailing value dropped
        assert!((median_of_means(&v, 3).unwrap() - 2.0).abs() < 1e-15);
        assert!(median_of_means(&v, 5).is_err());
        assert!(median_of_means(&[], 1).is_err());
    }

    #[test]
    fn batch_rule_and_tmin() {
        assert_eq!(default_batches(64, 0.05), 16);
        let t1 = required_snapshots(64, 0.33, 0.05, 34.0);
        assert_eq!(t1, (34.0 * 2560f64.ln() / (0.33 * 0.33)).ceil() as usize);
        let diff = required_snapshots(128, 0.33, 0.05, 34.0) as f64 - t1 as f64;
        assert!((diff - 34.0 * 2f64.ln() / 0.1089).abs() <= 1.0);
    }

    #[test]
    fn insufficient_snapshots_reports_requirement() {
        let mut rng = RandomStream::from_seed(60);
        let s = PureState::zero(2).unwrap();
        let shadows = ShadowSet::collect(&s, 10, &mut rng).unwrap();
        let err = estimate_many(&shadows, &[s], 0.3, 0.05).unwrap_err();
        assert!(matches!(err, Error::InsufficientSnapshots { got: 10, .. }));
    }

    #[test]
    fn single_observable_matches_estimate_fidelity() {
        let mut rng = RandomStream::from_seed(61);
        let s = PureState::zero(2).unwrap();
        let shadows = ShadowSet::collect(&s, 3000, &mut rng).unwrap();
        let report = estimate_many(&shadows, &[s.clone()], 0.5, 0.1).unwrap();
        let direct = estimate_fidelity(&shadows, &s, report.batches).unwrap();
        assert_eq!(report.estimates[0], direct);
    }
}
