use crate::clifford::MeasurementRecord;
use crate::ensembles::PrsFamily;
use crate::qcore::C64;
use crate::stats::log_sum_exp;
use crate::{Error, Result};

use super::permanent::permanent;

/// Largest record count handled by the permanent formula.
pub const PERMANENT_CAP: usize = 20;

const CHUNK: usize = 512;

fn check_records(records: &[MeasurementRecord], n: usize) -> Result<()> {
    match records.iter().find(|r| r.n() != n) {
        Some(r) => Err(Error::DimensionMismatch { expected: n, found: r.n() }),
        None => Ok(()),
    }
}

/// Row-major `T × T` Gram matrix `G_ij = ⟨v_i|v_j⟩` of the record directions.
pub fn gram_matrix(records: &[MeasurementRecord]) -> Result<Vec<C64>> {
    let t = records.len();
    let mut g = vec![C64::new(0.0, 0.0); t * t];
    for i in 0..t {
        for j in 0..t {
            g[i * t + j] = records[i].direction().inner(records[j].direction())?;
        }
    }
    Ok(g)
}

/// `E_ψ~Haar ∏_i |⟨v_i|ψ⟩|² = perm(G) / (N (N+1) ··· (N+T-1))`.
pub fn haar_likelihood(records: &[MeasurementRecord]) -> Result<f64> {
    Ok(haar_log_likelihood(records)?.exp())
}

pub fn haar_log_likelihood(records: &[MeasurementRecord]) -> Result<f64> {
    let t = records.len();
    if t == 0 {
        return Ok(0.0);
    }
    if t > PERMANENT_CAP {
        return Err(Error::PermanentCap { size: t, cap: PERMANENT_CAP });
    }
    let n = records[0].n();
    check_records(records, n)?;
    let perm = permanent(&gram_matrix(records)?, t, PERMANENT_CAP)?.re;
    let dim = (1u64 << n) as f64;
    let log_denominator: f64 = (0..t).map(|i| (dim + i as f64).ln()).sum();
    Ok(perm.max(0.0).ln() - log_denominator)
}

/// `ln((1/|K|) Σ_k ∏_i |⟨v_i|φ_k⟩|²)`, evaluated in the log domain.
pub fn ensemble_log_likelihood(records: &[MeasurementRecord], family: &PrsFamily) -> Result<f64> {
    check_records(records, family.n())?;
    let keys = family.key_count();
    let mut logs = Vec::with_capacity(keys as usize);
    for k in 0..keys {
        let phi = family.state(k)?;
        let mut acc = 0.0;
        for r in records {
            acc += r.probability(&phi)?.ln();
        }
        logs.push(acc);
    }
    Ok(log_sum_exp(logs) - (keys as f64).ln())
}

pub fn ensemble_likelihood(records: &[MeasurementRecord], family: &PrsFamily) -> Result<f64> {
    Ok(ensemble_log_likelihood(records, family)?.exp())
}

/// `ln` of the sample mean of `∏_i |⟨v_i|ψ⟩|²` over `samples` states drawn by
/// `draw`, which fills a buffer of `2^n` amplitudes with a unit vector.
///
/// Overlaps are computed in blocks as one real matrix product.
pub fn mc_log_likelihood<F>(records: &[MeasurementRecord], samples: usize, mut draw: F) -> Result<f64>
where
    F: FnMut(&mut [C64]) -> Result<()>,
{
    if samples == 0 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least one sample".into()));
    }
    let t = records.len();
    if t == 0 {
        return Ok(0.0);
    }
    let n = records[0].n();
    check_records(records, n)?;
    let dim = 1usize << n;

    // lhs = [[re a, -im a], [im a, re a]] with a_i = conj(v_i), shape 2T × 2N.
    let mut lhs = vec![0.0; 2 * t * 2 * dim];
    for (i, r) in records.iter().enumerate() {
        for (b, v) in r.direction().amplitudes().iter().enumerate() {
            let a = v.conj();
            lhs[i * 2 * dim + b] = a.re;
            lhs[i * 2 * dim + dim + b] = -a.im;
            lhs[(t + i) * 2 * dim + b] = a.im;
            lhs[(t + i) * 2 * dim + dim + b] = a.re;
        }
    }

    let mut logs = Vec::with_capacity(samples);
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    let mut rhs = vec![0.0; 2 * dim * CHUNK];
    let mut out = vec![0.0; 2 * t * CHUNK];
    let mut done = 0;
    while done < samples {
        let m = CHUNK.min(samples - done);
        for j in 0..m {
            draw(&mut buf)?;
            for (b, z) in buf.iter().enumerate() {
                rhs[b * m + j] = z.re;
                rhs[(dim + b) * m + j] = z.im;
            }
        }
        // SAFETY: all three buffers hold at least the addressed extents:
        // lhs is 2T × 2N, rhs is 2N × m, out is 2T × m, all row-major.
        unsafe {
            matrixmultiply::dgemm(
                2 * t,
                2 * dim,
                m,
                1.0,
                lhs.as_ptr(),
                (2 * dim) as isize,
                1,
                rhs.as_ptr(),
                m as isize,
                1,
                0.0,
                out.as_mut_ptr(),
                m as isize,
                1,
            );
        }
        for j in 0..m {
            let mut acc = 0.0;
            for i in 0..t {
                let re = out[i * m + j];
                let im = out[(t + i) * m + j];
                acc += (re * re + im * im).ln();
            }
            logs.push(acc);
        }
        done += m;
    }
    Ok(log_sum_exp(logs) - (samples as f64).ln())
}

#[cfg(test)]
pub(crate) fn fill_from_state(buf: &mut [C64], s: &crate::qcore::PureState) -> Result<()> {
    if buf.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: buf.len(), found: s.dim() });
    }
    buf.copy_from_slice(s.amplitudes());
    Ok(())
}
