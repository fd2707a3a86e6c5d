//! Means, normal confidence intervals and chi-square goodness of fit.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided 97.5% normal quantile.
pub const Z_975: f64 = 1.959_963_984_540_054;

/// Sample mean and standard deviation (denominator `len - 1`; zero for a
/// single value).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (m - 1.0)).sqrt())
}

/// Normal-approximation 95% interval for the mean.
pub fn normal_ci95(mean: f64, sd: f64, count: usize) -> [f64; 2] {
    let half = Z_975 * sd / (count as f64).sqrt();
    [mean - half, mean + half]
}

/// Upper tail `P(Z >= z)` of the standard normal.
pub fn normal_upper_tail(z: f64) -> f64 {
    Normal::standard().sf(z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
}

/// Pearson goodness of fit of `observed` counts against `probs`.
/// Categories of probability zero are dropped; an observation in one of
/// them gives `p = 0`.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != probs.len() || probs.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
        return Err(Error::InvalidCounts("observed and probability vectors disagree or probabilities leave [0, 1]".into()));
    }
    let total: u64 = observed.iter().sum();
    let psum: f64 = probs.iter().sum();
    if total == 0 || (psum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidCounts(format!("{total} observations, probabilities summing to {psum}")));
    }
    let expected: Vec<f64> = probs.iter().map(|p| p * total as f64).collect();
    let mut stat = 0.0;
    let mut cats = 0usize;
    let mut impossible = false;
    for (&o, &e) in observed.iter().zip(&expected) {
        if e > 0.0 {
            stat += (o as f64 - e).powi(2) / e;
            cats += 1;
        } else if o > 0 {
            impossible = true;
        }
    }
    let dof = cats.saturating_sub(1);
    let p_value = if impossible {
        0.0
    } else if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidCounts(e.to_string()))?;
        1.0 - dist.cdf(stat)
    };
    Ok(ChiSquareResult {
        statistic: stat,
        dof,
        p_value,
        observed: observed.to_vec(),
        expected,
    })
}

/// Draw `draws` rounds of `k` uniform squares from `[n]`, tally
/// `classify(squares)` into `probs.len()` bins and test the tally against
/// `probs`.
pub fn case_frequency_test<R, F>(n: usize, k: usize, draws: u64, probs: &[f64], rng: &mut R, mut classify: F) -> Result<ChiSquareResult>
where
    R: Rng + ?Sized,
    F: FnMut(&[usize]) -> usize,
{
    let mut counts = vec![0u64; probs.len()];
    let mut squares = vec![0usize; k];
    for _ in 0..draws {
        for s in squares.iter_mut() {
            *s = rng.random_range(1..=n);
        }
        let c = classify(&squares);
        if c >= counts.len() {
            return Err(Error::InvalidCounts(format!("category {c} out of range")));
        }
        counts[c] += 1;
    }
    chi_square(&counts, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn mean_and_interval() {
        let (m, sd) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let ci = normal_ci95(m, sd, 4);
        assert!(ci[0] < m && m < ci[1]);
        assert_eq!(mean_sd(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn normal_tail_values() {
        assert!((normal_upper_tail(0.0) - 0.5).abs() < 1e-15);
        let p = normal_upper_tail(Z_975);
        assert!((p - 0.025).abs() < 1e-11, "{p}");
    }

    #[test]
    fn chi_square_known_statistic() {
        // expected (25, 25, 50), observed (30, 20, 50): stat = 2
        let r = chi_square(&[30, 20, 50], &[0.25, 0.25, 0.5]).unwrap();
        assert!((r.statistic - 2.0).abs() < 1e-12);
        assert_eq!(r.dof, 2);
        assert!((r.p_value - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(chi_square(&[1, 0], &[0.0, 1.0]).unwrap().p_value, 0.0);
        assert!(chi_square(&[1, 1], &[0.3, 0.3]).is_err());
    }

    #[test]
    fn uniform_square_parity_is_fair() {
        let mut rng = trial_rng(5, 0);
        let r = case_frequency_test(10, 1, 100_000, &[0.5, 0.5], &mut rng, |s| s[0] % 2).unwrap();
        assert!(r.p_value > 1e-3, "{r:?}");
    }
}
