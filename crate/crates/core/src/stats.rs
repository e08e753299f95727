//! Pearson chi-square goodness-of-fit tests for sampled outcome histograms.

use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    /// True when the null hypothesis survives at `significance`.
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }

    /// Critical value of the statistic at `significance`.
    pub fn critical_value(&self, significance: f64) -> f64 {
        if self.degrees_of_freedom == 0 {
            return 0.0;
        }
        ChiSquared::new(self.degrees_of_freedom as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(1.0 - significance)
    }
}

pub fn chi_square_uniform(counts: &[u64]) -> ChiSquareTest {
    let k = counts.len().max(1);
    chi_square_goodness_of_fit(counts, &vec![1.0 / k as f64; counts.len()])
}

/// Goodness of fit of `counts` against `probabilities`.
///
/// Bins with zero expected probability are excluded from the degrees of
/// freedom; any observation in such a bin yields an infinite statistic and a
/// p-value of zero.
pub fn chi_square_goodness_of_fit(counts: &[u64], probabilities: &[f64]) -> ChiSquareTest {
    assert_eq!(counts.len(), probabilities.len(), "bin count mismatch");
    let total: u64 = counts.iter().sum();
    let mut statistic = 0.0;
    let mut bins = 0usize;
    for (&observed, &p) in counts.iter().zip(probabilities) {
        if p <= 0.0 {
            if observed > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        bins += 1;
        let expected = p * total as f64;
        let diff = observed as f64 - expected;
        statistic += diff * diff / expected;
    }
    let degrees_of_freedom = bins.saturating_sub(1);
    let p_value = if statistic.is_infinite() {
        0.0
    } else if degrees_of_freedom == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(degrees_of_freedom as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(statistic)
    };
    ChiSquareTest {
        statistic,
        degrees_of_freedom,
        p_value,
    }
}
