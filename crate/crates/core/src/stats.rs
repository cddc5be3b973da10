//! Small statistical helpers shared by experiments and tests.

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Standard deviation of a binomial proportion with success probability `p`.
pub fn binomial_sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// One-sided tail mass of the normal distribution beyond 3σ.
pub const THREE_SIGMA_TAIL: f64 = 0.001_349_898;

/// Whether `hits` successes in `trials` is consistent with probability `p` at
/// the 3σ level: inside `np ± 3σ`, or, for small expected counts, not further
/// into either exact binomial tail than a 3σ normal deviation.
pub fn binomial_consistent(hits: u64, trials: u64, p: f64) -> bool {
    let n = trials as f64;
    let sigma = (n * p * (1.0 - p)).sqrt();
    if (hits as f64 - n * p).abs() <= 3.0 * sigma {
        return true;
    }
    if n * p <= 0.0 {
        return hits == 0;
    }
    let Ok(dist) = Binomial::new(p.min(1.0), trials) else {
        return false;
    };
    let tail = if hits as f64 > n * p {
        if hits == 0 { 1.0 } else { dist.sf(hits - 1) }
    } else {
        dist.cdf(hits)
    };
    tail >= THREE_SIGMA_TAIL
}

/// Whether `hits` in `trials` is consistent with a success probability of at
/// most `bound`, at the 3σ level.
pub fn binomial_at_most(hits: u64, trials: u64, bound: f64) -> bool {
    hits as f64 <= trials as f64 * bound || binomial_consistent(hits, trials, bound)
}

/// Pearson chi-square statistic and upper-tail p-value.
///
/// `expected` holds expected counts; bins with zero expectation must have zero
/// observations and are skipped.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e <= 0.0 {
            if o > 0 {
                return (f64::INFINITY, 0.0);
            }
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        bins += 1;
    }
    if bins < 2 {
        return (stat, 1.0);
    }
    let dist = ChiSquared::new((bins - 1) as f64).expect("positive dof");
    (stat, 1.0 - dist.cdf(stat))
}

/// Chi-square test against a uniform distribution over `observed.len()` bins.
pub fn chi_square_uniform(observed: &[u64]) -> (f64, f64) {
    let total: u64 = observed.iter().sum();
    let e = total as f64 / observed.len() as f64;
    chi_square_gof(observed, &vec![e; observed.len()])
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_q(lambda))
}

/// Complementary Kolmogorov distribution `Q_KS(λ)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let term = sign * (-2.0 * (k as f64 * lambda).powi(2)).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Numerically stable `ln Σ exp(x_i)`.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty());
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_consistency_rules() {
        assert!(binomial_consistent(500, 1000, 0.5));
        assert!(!binomial_consistent(600, 1000, 0.5));
        // expected 0.2 events: two observations sit in a 1.8% tail
        assert!(binomial_consistent(2, 100_000, 2e-6));
        assert!(!binomial_consistent(6, 100_000, 2e-6));
        assert!(binomial_consistent(0, 100_000, 2e-6));
        assert!(binomial_at_most(0, 10, 0.5));
        assert!(!binomial_at_most(10, 10, 0.1));
    }

    #[test]
    fn chi_square_perfect_fit() {
        let (s, p) = chi_square_uniform(&[10, 10, 10, 10]);
        assert_eq!(s, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_rejects_skew() {
        let (_, p) = chi_square_uniform(&[1000, 10, 10, 10]);
        assert!(p < 1e-6);
    }

    #[test]
    fn ks_identical_and_shifted() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let (d, p) = ks_two_sample(&a, &a);
        assert_eq!(d, 0.0);
        assert!(p > 0.99);
        let b: Vec<f64> = a.iter().map(|x| x + 0.2).collect();
        let (d, p) = ks_two_sample(&a, &b);
        assert!((d - 0.2).abs() <= 1.5e-3, "{d}");
        assert!(p < 1e-10);
    }

    #[test]
    fn lse_matches_direct() {
        let xs = [0.1, -2.0, 3.5];
        let direct = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(xs) - direct).abs() < 1e-12);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY; 2]), f64::NEG_INFINITY);
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
