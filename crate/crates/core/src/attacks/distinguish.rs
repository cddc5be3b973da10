use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{measure_in_clifford_basis, sample_uniform_clifford, MeasurementRecord};
use crate::ensembles::PrsFamily;
use crate::haar::{complex_gaussian, sample_haar_state};
use crate::qcore::PureState;
use crate::shadows::{default_batches, estimate_fidelity, ShadowSet};
use crate::stats::mean_stderr;
use crate::{Error, RandomStream, Result};

use super::likelihood::{ensemble_log_likelihood, haar_log_likelihood, mc_log_likelihood, PERMANENT_CAP};

/// Measures `T` copies of `state`, each in a fresh uniform Clifford basis.
pub fn collect_records<R: Rng + ?Sized>(state: &PureState, t: usize, rng: &mut R) -> Result<Vec<MeasurementRecord>> {
    (0..t)
        .map(|_| {
            let c = sample_uniform_clifford(state.n(), rng);
            measure_in_clifford_basis(state, &c, rng)
        })
        .collect()
}

/// How the Haar-branch likelihood was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaarMethod {
    Permanent,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BayesOptions {
    /// Record counts up to this use the permanent formula.
    pub permanent_cap: usize,
    /// Haar samples for the Monte Carlo path above the cap.
    pub mc_samples: usize,
}

impl Default for BayesOptions {
    fn default() -> Self {
        Self { permanent_cap: PERMANENT_CAP, mc_samples: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BayesOutcome {
    pub guess: u8,
    pub p0: f64,
    pub p1: f64,
    pub log_prs: f64,
    pub log_haar: f64,
    pub method: HaarMethod,
}

/// Posterior of `X` under a uniform prior. Ties go to 1.
pub fn bayes_decision(
    records: &[MeasurementRecord],
    family: &PrsFamily,
    opts: &BayesOptions,
    rng: &mut RandomStream,
) -> Result<BayesOutcome> {
    let log_prs = ensemble_log_likelihood(records, family)?;
    let (log_haar, method) = if records.len() <= opts.permanent_cap.min(PERMANENT_CAP) {
        (haar_log_likelihood(records)?, HaarMethod::Permanent)
    } else {
        let mut mc = rng.derive("haar-mc", 0);
        let l = mc_log_likelihood(records, opts.mc_samples, |buf| {
            buf.iter_mut().for_each(|z| *z = complex_gaussian(&mut mc));
            let norm = buf.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            buf.iter_mut().for_each(|z| *z /= norm);
            Ok(())
        })?;
        (l, HaarMethod::MonteCarlo)
    };
    if log_prs == f64::NEG_INFINITY && log_haar == f64::NEG_INFINITY {
        return Err(Error::DegenerateLikelihood);
    }
    let p0 = 1.0 / (1.0 + (log_haar - log_prs).exp());
    let p1 = 1.0 - p0;
    let guess = if log_prs > log_haar { 0 } else { 1 };
    Ok(BayesOutcome { guess, p0, p1, log_prs, log_haar, method })
}

/// 0 iff some key's median-of-means fidelity estimate reaches `threshold`.
pub fn shadow_decision(records: &[MeasurementRecord], family: &PrsFamily, threshold: f64, batches: usize) -> Result<u8> {
    if records.is_empty() {
        return Ok(1);
    }
    let shadows = ShadowSet::new(family.n(), records.to_vec(), "trial")?;
    let batches = batches.clamp(1, records.len());
    for k in 0..family.key_count() {
        if estimate_fidelity(&shadows, &family.state(k)?, batches)? >= threshold {
            return Ok(0);
        }
    }
    Ok(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishOptions {
    pub bayes: BayesOptions,
    pub threshold: f64,
    /// Median-of-means batches for the shadow rule; `None` uses
    /// `ceil(2 ln(2|K|/0.05))`.
    pub batches: Option<usize>,
    /// Fix the hidden bit instead of drawing it.
    pub forced_hidden: Option<u8>,
}

impl Default for DistinguishOptions {
    fn default() -> Self {
        Self { bayes: BayesOptions::default(), threshold: 2.0 / 3.0, batches: None, forced_hidden: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishTrial {
    #[serde(rename = "X")]
    pub hidden: u8,
    pub key: Option<u64>,
    pub bayes: u8,
    pub shadow: u8,
    pub p0: f64,
    pub p1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishReport {
    pub n: usize,
    pub key_count: u64,
    #[serde(rename = "T")]
    pub t: usize,
    pub trials: usize,
    pub batches: usize,
    pub threshold: f64,
    pub haar_method: HaarMethod,
    pub bayes_success: f64,
    pub bayes_stderr: f64,
    pub shadow_success: f64,
    pub shadow_stderr: f64,
    /// Mean and standard error of the per-trial difference bayes − shadow.
    pub paired_difference: f64,
    pub paired_stderr: f64,
    /// Fraction of trials with `max(p0, p1) ≥ 3/4`.
    pub confident_fraction: f64,
    pub outcomes: Vec<DistinguishTrial>,
}

/// The hidden-bit game: `X` uniform (or forced), `T` copies of `|φ_k⟩` for a
/// uniform key when `X = 0`, of a Haar state when `X = 1`; both rules see the
/// same records. Trial `i` runs on sub-stream `("distinguish-trial", i)`.
pub fn distinguishing_experiment(
    family: &PrsFamily,
    t: usize,
    trials: usize,
    opts: &DistinguishOptions,
    rng: &RandomStream,
) -> Result<DistinguishReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if let Some(x) = opts.forced_hidden {
        if x > 1 {
            return Err(Error::OutOfRange { what: "forced hidden bit", value: x as u64, limit: 1 });
        }
    }
    let batches = opts.batches.unwrap_or_else(|| default_batches(family.key_count() as usize, 0.05));
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut trial_rng = rng.derive("distinguish-trial", i as u64);
            let hidden = opts.forced_hidden.unwrap_or_else(|| trial_rng.random_range(0..2u8));
            let (state, key) = if hidden == 0 {
                let k = trial_rng.random_range(0..family.key_count());
                (family.state(k)?, Some(k))
            } else {
                (sample_haar_state(family.n(), &mut trial_rng)?, None)
            };
            let records = collect_records(&state, t, &mut trial_rng)?;
            let bayes = bayes_decision(&records, family, &opts.bayes, &mut trial_rng)?;
            let shadow = shadow_decision(&records, family, opts.threshold, batches)?;
            Ok(DistinguishTrial { hidden, key, bayes: bayes.guess, shadow, p0: bayes.p0, p1: bayes.p1 })
        })
        .collect::<Result<Vec<_>>>()?;

    let bayes_hits: Vec<f64> = outcomes.iter().map(|o| f64::from(u8::from(o.bayes == o.hidden))).collect();
    let shadow_hits: Vec<f64> = outcomes.iter().map(|o| f64::from(u8::from(o.shadow == o.hidden))).collect();
    let diffs: Vec<f64> = bayes_hits.iter().zip(&shadow_hits).map(|(b, s)| b - s).collect();
    let (bayes_success, bayes_stderr) = mean_stderr(&bayes_hits);
    let (shadow_success, shadow_stderr) = mean_stderr(&shadow_hits);
    let (paired_difference, paired_stderr) = mean_stderr(&diffs);
    let confident = outcomes.iter().filter(|o| o.p0.max(o.p1) >= 0.75).count();
    let haar_method = if t <= opts.bayes.permanent_cap.min(PERMANENT_CAP) {
        HaarMethod::Permanent
    } else {
        HaarMethod::MonteCarlo
    };
    Ok(DistinguishReport {
        n: family.n(),
        key_count: family.key_count(),
        t,
        trials,
        batches,
        threshold: opts.threshold,
        haar_method,
        bayes_success,
        bayes_stderr,
        shadow_success,
        shadow_stderr,
        paired_difference,
        paired_stderr,
        confident_fraction: confident as f64 / trials as f64,
        outcomes,
    })
}
