//! Interval estimates and chi-square tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Binomial standard error `sqrt(p (1 - p) / n)`.
pub fn standard_error(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n.max(1) as f64).sqrt()
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (low, high)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: u64,
    pub p_value: f64,
}

fn upper_tail(statistic: f64, df: u64) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(statistic)
}

/// Pearson test of homogeneity for two binomial samples (2x2 table).
pub fn chi_square_two_sample(a_hits: u64, a_n: u64, b_hits: u64, b_n: u64) -> ChiSquare {
    let table = [[a_hits, a_n - a_hits], [b_hits, b_n - b_hits]];
    chi_square_contingency(&table.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

/// Pearson test of homogeneity for an `r x c` table of counts. Columns with
/// a zero total are dropped.
pub fn chi_square_contingency(table: &[Vec<u64>]) -> ChiSquare {
    let cols = table.first().map_or(0, |r| r.len());
    let col_tot: Vec<f64> = (0..cols)
        .map(|j| table.iter().map(|r| r[j] as f64).sum())
        .collect();
    let row_tot: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let total: f64 = row_tot.iter().sum();
    let live: Vec<usize> = (0..cols).filter(|j| col_tot[*j] > 0.0).collect();
    let mut stat = 0.0;
    for (i, row) in table.iter().enumerate() {
        for &j in &live {
            let expect = row_tot[i] * col_tot[j] / total;
            if expect > 0.0 {
                stat += (row[j] as f64 - expect).powi(2) / expect;
            }
        }
    }
    let df = (table.len().saturating_sub(1) * live.len().saturating_sub(1)) as u64;
    ChiSquare {
        statistic: stat,
        df,
        p_value: upper_tail(stat, df),
    }
}

/// Goodness of fit of `counts` against equal expected counts.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let total: u64 = counts.iter().sum();
    let expect = total as f64 / counts.len() as f64;
    let stat = counts
        .iter()
        .map(|c| (*c as f64 - expect).powi(2) / expect)
        .sum();
    let df = counts.len().saturating_sub(1) as u64;
    ChiSquare {
        statistic: stat,
        df,
        p_value: upper_tail(stat, df),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!(
            (lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3,
            "{lo} {hi}"
        );
        assert_eq!(wilson_interval(0, 40, 1.96).0, 0.0);
        assert_eq!(wilson_interval(40, 40, 1.96).1, 1.0);
    }

    #[test]
    fn chi_square_known_value() {
        // 2x2 table [[10, 20], [20, 10]]: statistic 6.667 with one degree of freedom.
        let r = chi_square_two_sample(10, 30, 20, 30);
        assert!((r.statistic - 20.0 / 3.0).abs() < 1e-9);
        assert!((r.p_value - 0.009823).abs() < 1e-5, "{}", r.p_value);
        assert_eq!(chi_square_uniform(&[5, 5, 5]).statistic, 0.0);
        assert_eq!(chi_square_uniform(&[5, 5, 5]).p_value, 1.0);
    }
}
