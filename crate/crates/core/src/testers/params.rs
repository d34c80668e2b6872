use crate::group::Sign;
use crate::{Epsilon, Error, GroupSpec, Result};
use serde::{Deserialize, Serialize};

/// Iterations of the unpredictable test inside the online-resilient wrappers.
pub const ONLINE_REPETITIONS: u64 = 48;

/// Default constant `c` in the admissible-`t` range check.
pub const DEFAULT_RANGE_CONSTANT: f64 = 0.01;

/// Desk-scale escape hatches. Any of them marks the verdict as forced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_reps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_sample_count: Option<u64>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        self.force_m.is_none() && self.force_reps.is_none() && self.force_sample_count.is_none()
    }
}

fn one() -> u64 {
    1
}

fn is_one(x: &u64) -> bool {
    *x == 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TesterParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Epsilon>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Sign vector for `fixed-signs`; all plus when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<Sign>>,
    /// Expected generation count used by `generated-subgroup`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_of_g: Option<f64>,
    /// Independent runs per trial; a trial rejects if any run rejects.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub repetitions: u64,
    #[serde(default, skip_serializing_if = "Overrides::is_empty")]
    pub overrides: Overrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_constant: Option<f64>,
}

impl Default for TesterParams {
    fn default() -> Self {
        TesterParams {
            epsilon: None,
            k: None,
            m: None,
            signs: None,
            e_of_g: None,
            repetitions: 1,
            overrides: Overrides::default(),
            range_constant: None,
        }
    }
}

impl TesterParams {
    pub fn epsilon(&self) -> Result<Epsilon> {
        let eps = self
            .epsilon
            .ok_or_else(|| Error::Config("epsilon is required".into()))?;
        require_proper(eps)?;
        Ok(eps)
    }

    pub fn k(&self) -> Result<usize> {
        match self.k {
            Some(k) if k >= 1 => Ok(k),
            Some(_) => Err(Error::Config("k must be at least 1".into())),
            None => Err(Error::Config("k is required".into())),
        }
    }

    pub fn m(&self) -> Result<usize> {
        let m = self
            .m
            .ok_or_else(|| Error::Config("m is required".into()))?;
        require_even(m as u64)?;
        Ok(m)
    }
}

pub(crate) fn require_proper(eps: Epsilon) -> Result<()> {
    if !eps.is_proper() {
        return Err(Error::Config(format!(
            "epsilon must lie in (0, 1), got {eps}"
        )));
    }
    Ok(())
}

pub(crate) fn require_even(m: u64) -> Result<()> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::Config(format!(
            "m must be a positive even integer, got {m}"
        )));
    }
    Ok(())
}

/// `ceil(log_base t)` summand, returned as `floor` and a flag telling whether
/// the logarithm is an exact integer. `t <= 1` contributes zero.
fn log_part(t: u64, base: u64) -> (u32, bool, f64) {
    if t <= 1 {
        return (0, true, 0.0);
    }
    let mut e = 0u32;
    let mut acc = 1u128;
    while acc * (base as u128) <= t as u128 {
        acc *= base as u128;
        e += 1;
    }
    let exact = acc == t as u128;
    (e, exact, (t as f64).ln() / (base as f64).ln())
}

/// `4 * ceil(log_base t + 15 / eps) + 12`.
///
/// When `t` is a power of `base` the sum is rational and evaluated exactly;
/// otherwise the logarithm is irrational and the sum is never an integer, so
/// the floating ceiling is safe.
pub fn online_m(eps: Epsilon, t: u64, base: u64) -> Result<u64> {
    require_proper(eps)?;
    let (e, exact, log) = log_part(t, base);
    let frac = (15 * eps.denom() as u128).div_ceil(eps.numer() as u128) as u64;
    let inner = if exact {
        e as u64 + frac
    } else {
        (log + 15.0 * eps.denom() as f64 / eps.numer() as f64).ceil() as u64
    };
    Ok(4 * inner + 12)
}

/// `ceil(log2 |G|) + 10`.
pub fn gr_sample_count(g: &GroupSpec) -> u64 {
    ceil_log2(g.order()) as u64 + 10
}

pub(crate) fn ceil_log2(n: u128) -> u32 {
    if n <= 1 {
        0
    } else {
        128 - (n - 1).leading_zeros()
    }
}

/// Whether `2^m <= |G|^(1/4)`, i.e. `2^(4m) <= |G|`.
pub fn signs_branch_applies(g: &GroupSpec, m: u64) -> bool {
    m < 32 && 1u128 << (4 * m) <= g.order()
}

/// `c * min(eps^2, 1 / log2(|G|)^2) * |G|`, the largest `t` the dispatch
/// theorems cover.
pub fn admissible_t(g: &GroupSpec, eps: Epsilon, c: f64) -> f64 {
    let order = g.order() as f64;
    let log = order.log2();
    let inv = if log > 0.0 {
        1.0 / (log * log)
    } else {
        f64::INFINITY
    };
    c * eps.as_f64().powi(2).min(inv) * order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(s: &str) -> Epsilon {
        s.parse().unwrap()
    }

    #[test]
    fn online_m_examples() {
        assert_eq!(online_m(eps("1/2"), 2, 2).unwrap(), 136);
        assert_eq!(online_m(eps("1/2"), 3, 3).unwrap(), 136);
        assert_eq!(online_m(eps("1/2"), 0, 2).unwrap(), 132);
        assert_eq!(online_m(eps("1/2"), 1, 2).unwrap(), 132);
        // log2(3) + 30 = 31.58..
        assert_eq!(online_m(eps("1/2"), 3, 2).unwrap(), 140);
        // 15 / (2/7) = 52.5
        assert_eq!(online_m(eps("2/7"), 4, 2).unwrap(), 4 * 55 + 12);
        assert!(online_m(eps("1"), 4, 2).is_err());
    }

    #[test]
    fn m_is_a_multiple_of_four() {
        for t in 0..200 {
            for e in ["1/2", "1/3", "2/5", "1/10"] {
                assert_eq!(online_m(eps(e), t, 2).unwrap() % 4, 0);
            }
        }
    }

    #[test]
    fn branch_predicate_is_inclusive() {
        let g: GroupSpec = "F2^64".parse().unwrap();
        assert!(signs_branch_applies(&g, 16));
        assert!(!signs_branch_applies(&g, 17));
        let g: GroupSpec = "F2^16".parse().unwrap();
        assert!(signs_branch_applies(&g, 4));
        assert!(!signs_branch_applies(&g, 136));
    }

    #[test]
    fn gr_count() {
        assert_eq!(gr_sample_count(&"F2^16".parse().unwrap()), 26);
        assert_eq!(gr_sample_count(&"Z5".parse().unwrap()), 13);
        assert_eq!(gr_sample_count(&"Z1".parse().unwrap()), 10);
    }

    #[test]
    fn params_json() {
        let p: TesterParams =
            serde_json::from_str(r#"{"epsilon":"1/4","overrides":{"force_m":8}}"#).unwrap();
        assert_eq!(p.overrides.force_m, Some(8));
        assert_eq!(p.repetitions, 1);
        let back: TesterParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<TesterParams>(r#"{"eps":"1/4"}"#).is_err());
    }
}
