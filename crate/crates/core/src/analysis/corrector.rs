//! The plurality-vote corrector `g(a)`: the most common value of
//! `⊕ σ_i f(x_i)` over tuples in `Fix(a)`.

use super::exact::{profile_rejection, sum_profile};
use super::fix::sample_fix_a;
use crate::function::{enumerate_homomorphisms, FunctionTable};
use crate::group::{Direction, GroupElement, Sign, SignedTuple};
use crate::{Error, Result};
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CorrectorMode {
    Exact,
    MonteCarlo { samples: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrectorReport {
    /// Rejection probability of the random signs test on `k2` points.
    pub mu: Ratio<u128>,
    /// `η_a`, keyed by the element's text form.
    pub eta_per_element: BTreeMap<String, Ratio<u128>>,
    pub eta_max: Ratio<u128>,
    /// Fraction of the domain where `f` and `g` differ.
    pub delta: Ratio<u128>,
    #[serde(skip)]
    pub g: FunctionTable,
    pub g_values: Vec<String>,
    pub g_is_hom: bool,
    pub exact: bool,
    /// Trials behind each Monte-Carlo estimate; zero in exact mode.
    pub samples: u64,
}

impl CorrectorReport {
    pub fn mu_f64(&self) -> f64 {
        ratio_f64(self.mu)
    }
}

pub fn ratio_f64(r: Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Index of the largest count; ties go to the smallest index.
fn plurality(counts: impl Iterator<Item = u128>) -> (usize, u128) {
    counts.enumerate().fold(
        (0, 0),
        |best, (i, c)| if c > best.1 { (i, c) } else { best },
    )
}

fn tuple_image(f: &FunctionTable, t: &SignedTuple) -> Result<GroupElement> {
    let img = SignedTuple {
        entries: t.entries.iter().map(|(s, x)| (*s, f.eval(*x))).collect(),
    };
    Ok(f.codomain().signed_sum(&img, Direction::Increasing)?)
}

pub fn corrector<R: Rng + ?Sized>(
    f: &FunctionTable,
    k2: usize,
    mode: CorrectorMode,
    rng: &mut R,
) -> Result<CorrectorReport> {
    if k2 < 2 {
        return Err(Error::Config("k2 must be at least 2".into()));
    }
    let (g, h) = (f.domain().clone(), f.codomain().clone());
    let n = g.small_order(1 << 12)?;
    let hn = h.small_order(1 << 12)?;
    // Per element: (g(a) index, votes for it, votes in total).
    let mut votes: Vec<(usize, u128, u128)> = Vec::with_capacity(n);
    let (mu, samples) = match mode {
        CorrectorMode::Exact => {
            let profile = sum_profile(f, k2)?;
            for a in 0..n {
                let (c, best) = plurality((0..hn).map(|c| profile.count(a, c)));
                votes.push((c, best, profile.fix_size()));
            }
            (profile_rejection(f, &profile), 0)
        }
        CorrectorMode::MonteCarlo { samples } => {
            if samples == 0 {
                return Err(Error::Config("samples must be positive".into()));
            }
            let mut bad = 0u128;
            for _ in 0..samples {
                let t = SignedTuple::from_signs(
                    (0..k2).map(|_| (Sign::random(rng), g.sample_uniform(rng))),
                );
                let a = g.signed_sum(&t, Direction::Increasing)?;
                bad += (tuple_image(f, &t)? != f.eval(a)) as u128;
            }
            for a in 0..n {
                let a = g.element_at(a as u64);
                let mut tally = vec![0u128; hn];
                for _ in 0..samples {
                    let t = sample_fix_a(&g, a, k2, rng)?;
                    tally[h.index_of(tuple_image(f, &t)?) as usize] += 1;
                }
                let (c, best) = plurality(tally.into_iter());
                votes.push((c, best, samples as u128));
            }
            (Ratio::new(bad, samples as u128), samples)
        }
    };
    let corrected = FunctionTable::from_fn(&g, &h, |x| {
        h.element_at(votes[g.index_of(x) as usize].0 as u64)
    })?;
    let mut eta_per_element = BTreeMap::new();
    let mut eta_max = Ratio::from_integer(0);
    for (i, (_, best, total)) in votes.iter().enumerate() {
        let eta = Ratio::new(total - best, *total);
        eta_max = eta_max.max(eta);
        eta_per_element.insert(g.format_element(g.element_at(i as u64)), eta);
    }
    let differ = (0..n as u64).filter(|i| {
        let x = g.element_at(*i);
        f.eval(x) != corrected.eval(x)
    });
    let delta = Ratio::new(differ.count() as u128, n as u128);
    let g_is_hom = is_listed_homomorphism(&corrected)?;
    Ok(CorrectorReport {
        mu,
        eta_per_element,
        eta_max,
        delta,
        g_values: corrected
            .dense_values()
            .unwrap_or(&[])
            .iter()
            .map(|v| h.format_element(*v))
            .collect(),
        g: corrected,
        g_is_hom,
        exact: matches!(mode, CorrectorMode::Exact),
        samples,
    })
}

/// Whether the dense table `f` equals one of the enumerated homomorphisms.
pub fn is_listed_homomorphism(f: &FunctionTable) -> Result<bool> {
    let values = f
        .dense_values()
        .ok_or_else(|| Error::Unsupported("dense table required".into()))?;
    for hom in enumerate_homomorphisms(f.domain(), f.codomain())? {
        if hom.table()? == values {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Corrector-lemma predicates on one report: `η ≤ 2μ`, `δ ≤ 2μ`, `g` a homomorphism.
pub fn corrector_lemmas_hold(r: &CorrectorReport) -> (bool, bool, bool) {
    let two_mu = r.mu * Ratio::from_integer(2);
    (r.eta_max <= two_mu, r.delta <= two_mu, r.g_is_hom)
}
