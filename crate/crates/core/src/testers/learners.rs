//! Sample-based testers: learn the unique candidate homomorphism from a
//! sample that spans the domain, then spot-check it.

use super::params::{gr_sample_count, require_proper};
use super::{Probe, Verdict, Witness};
use crate::function::{fit, Fit};
use crate::group::{
    estimate_e, exact_e, generates, partial_sums_cover, GroupElement, DEFAULT_PARTIAL_SUMS_CAP_LOG2,
};
use crate::oracle::OnlineOracle;
use crate::rng::{keyed_hash, stream};
use crate::{Epsilon, Error, GroupSpec, Result};
use rand::Rng;

/// Trials behind the Monte-Carlo fallback of [`resolve_e`].
const E_ESTIMATE_TRIALS: u64 = 4000;

/// Expected generation count: closed form when known, otherwise a
/// Monte-Carlo estimate on a stream keyed by the group alone.
pub fn resolve_e(g: &GroupSpec) -> Result<f64> {
    if let Some(e) = exact_e(g) {
        return Ok(e);
    }
    let key = g
        .to_string()
        .bytes()
        .fold(0u64, |h, b| keyed_hash(h, b as u64));
    let stats = estimate_e(g, E_ESTIMATE_TRIALS, &[], &mut stream(key, &[0x45]))?;
    Ok(stats.e_estimate)
}

/// Queries the sample, fits, then spot-checks. `⊥` ends the run with accept.
fn learn_and_check<R: Rng + ?Sized>(
    probe: &mut Probe,
    sample: &[GroupElement],
    eps: Epsilon,
    rng: &mut R,
) -> Result<Option<Witness>> {
    let (g, h) = (probe.domain(), probe.codomain());
    let mut pairs = Vec::with_capacity(sample.len());
    for &x in sample {
        match probe.query(x)?.value() {
            Some(v) => pairs.push((x, v)),
            None => return Ok(None),
        }
    }
    let hom = match fit(&g, &h, &pairs)? {
        Fit::Unique(hom) => hom,
        Fit::Inconsistent => {
            return Ok(Some(Witness::Learner {
                samples: pairs,
                spot: None,
            }))
        }
        Fit::Underdetermined => {
            return Err(Error::Domain(
                "sample generates the domain but does not determine a map".into(),
            ))
        }
    };
    for _ in 0..eps.ceil_scaled_inverse(3) {
        let x = g.sample_uniform(rng);
        match probe.query(x)?.value() {
            Some(v) if v != hom.eval(x) => {
                return Ok(Some(Witness::Learner {
                    samples: pairs,
                    spot: Some((x, v)),
                }))
            }
            Some(_) => {}
            None => return Ok(None),
        }
    }
    Ok(None)
}

fn run_learner<R: Rng + ?Sized>(
    name: &str,
    oracle: &mut OnlineOracle,
    eps: Epsilon,
    count: u64,
    covers: impl Fn(&GroupSpec, &[GroupElement]) -> Result<bool>,
    rng: &mut R,
) -> Result<Verdict> {
    require_proper(eps)?;
    let g = oracle.domain().clone();
    let mut v = Verdict::new(name);
    v.iterations_run = 1;
    v.m = Some(count);
    let sample: Vec<GroupElement> = (0..count).map(|_| g.sample_uniform(rng)).collect();
    let covered = covers(&g, &sample)?;
    v.sample_generated = Some(covered);
    if !covered {
        return Ok(v);
    }
    let mut probe = Probe {
        oracle,
        verdict: &mut v,
    };
    if let Some(w) = learn_and_check(&mut probe, &sample, eps, rng)? {
        v.reject(w);
    }
    Ok(v)
}

/// Sample `ceil(log2 |G|) + 10` points (or `sample_count`); accept unless
/// their subset sums cover the domain; otherwise learn and spot-check.
pub fn gr_sample_based_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    eps: Epsilon,
    sample_count: Option<u64>,
    rng: &mut R,
) -> Result<Verdict> {
    let count = sample_count.unwrap_or_else(|| gr_sample_count(oracle.domain()));
    let mut v = run_learner(
        "gr-sample",
        oracle,
        eps,
        count,
        |g, s| Ok(partial_sums_cover(g, s, DEFAULT_PARTIAL_SUMS_CAP_LOG2)?),
        rng,
    )?;
    v.forced_parameters = sample_count.is_some();
    Ok(v)
}

/// Sample `ceil(e_of_g) + 9` points (or `sample_count`); accept unless they
/// generate the domain; otherwise learn and spot-check.
pub fn generated_subgroup_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    eps: Epsilon,
    e_of_g: f64,
    sample_count: Option<u64>,
    rng: &mut R,
) -> Result<Verdict> {
    if !(e_of_g.is_finite() && e_of_g >= 0.0) {
        return Err(Error::Config(format!(
            "e_of_g must be a non-negative number, got {e_of_g}"
        )));
    }
    let count = sample_count.unwrap_or(e_of_g.ceil() as u64 + 9);
    run_learner(
        "generated-subgroup",
        oracle,
        eps,
        count,
        |g, s| Ok(generates(g, s)?),
        rng,
    )
}

/// `ceil(3 / eps)` uniform queries; rejects on any non-identity value.
pub fn zero_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    eps: Epsilon,
    rng: &mut R,
) -> Result<Verdict> {
    require_proper(eps)?;
    let (g, h) = (oracle.domain().clone(), oracle.codomain().clone());
    let mut v = Verdict::new("zero");
    v.iterations_run = 1;
    let mut probe = Probe {
        oracle,
        verdict: &mut v,
    };
    let mut witness = None;
    for _ in 0..eps.ceil_scaled_inverse(3) {
        let x = g.sample_uniform(rng);
        if let Some(a) = probe.query(x)?.value() {
            if a != h.identity() {
                witness = Some(Witness::NonZero {
                    point: x,
                    answer: a,
                });
                break;
            }
        }
    }
    if let Some(w) = witness {
        v.reject(w);
    }
    Ok(v)
}
