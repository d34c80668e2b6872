//! Closed forms used in the analysis, with the quantities they bound.

use crate::group::linalg::rank;
use crate::{Error, GroupSpec, Result};
use rand::Rng;

/// `Pr[Bin(n, p) is even] = (1 + (1 - 2p)^n) / 2`.
pub fn binomial_even_probability(n: u32, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} is not a probability")));
    }
    Ok((1.0 + (1.0 - 2.0 * p).powi(n as i32)) / 2.0)
}

/// `1 + 1 / (2^(x-1) - 1)`, an upper bound on `ζ(x)` for `x ≥ 2`.
pub fn zeta_upper_bound(x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::Domain(format!("zeta bound needs x >= 2, got {x}")));
    }
    Ok(1.0 + 1.0 / ((x - 1.0).exp2() - 1.0))
}

/// `Σ_{n ≤ terms} n^-x` and a bound on the omitted tail,
/// `∫_terms^∞ t^-x dt = terms^(1-x) / (x-1)`.
pub fn zeta_partial_sum(x: f64, terms: u64) -> Result<(f64, f64)> {
    if !(x > 1.0) || terms == 0 {
        return Err(Error::Domain(format!(
            "series needs x > 1 and terms > 0, got x = {x}"
        )));
    }
    // Summed smallest first to limit rounding.
    let sum = (1..=terms).rev().map(|n| (n as f64).powf(-x)).sum();
    Ok((sum, (terms as f64).powf(1.0 - x) / (x - 1.0)))
}

/// `Π_{i<k} (1 - p^(i-n))`: probability that `k` uniform vectors of `F_p^n`
/// are linearly independent.
pub fn linear_independence_exact(p: u64, n: u32, k: u32) -> f64 {
    (0..k)
        .map(|i| 1.0 - (p as f64).powi(i as i32 - n as i32))
        .product()
}

/// `1 - 2 / p^(n/2)`.
pub fn linear_independence_bound(p: u64, n: u32) -> f64 {
    1.0 - 2.0 / (p as f64).powf(n as f64 / 2.0)
}

/// Empirical probability that `ceil(n/2)` uniform vectors of `F_p^n` are
/// linearly independent.
pub fn linear_independence_probability<R: Rng + ?Sized>(
    p: u64,
    n: u32,
    draws: u64,
    rng: &mut R,
) -> Result<f64> {
    if draws == 0 {
        return Err(Error::Config("draws must be positive".into()));
    }
    let g = GroupSpec::vector_space(p, n)?;
    let k = n.div_ceil(2) as usize;
    let mut hits = 0u64;
    let mut xs = Vec::with_capacity(k);
    for _ in 0..draws {
        xs.clear();
        xs.extend((0..k).map(|_| g.sample_uniform(rng)));
        hits += (rank(&g, &xs)? == k) as u64;
    }
    Ok(hits as f64 / draws as f64)
}
