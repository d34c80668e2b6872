//! How predictable is the last query of the unpredictable tests?
//!
//! For a fixed draw `X = (x_1..x_m)` the last query is `y = Σ_{j∈S} c_j x_j`
//! over a uniform `m/2`-subset `S` and uniform scalars. The probe computes
//! this conditional distribution exactly per `X` (or samples it when the
//! scalar space is large), and records whether `X` is degenerate.

use super::exact::Cayley;
use crate::function::{distance_to_hom, FunctionTable};
use crate::group::{linalg, Direction, GroupElement, Scalar, Sign, SignedTuple};
use crate::testers::signs_branch_applies;
use crate::{Error, GroupSpec, Result};
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::io::Write;

/// Largest number of `(S, scalars)` combinations enumerated per draw of `X`.
const ENUMERATION_LIMIT: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVariant {
    Signs,
    Coefficients,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessConfig {
    pub variant: ProbeVariant,
    pub m: usize,
    pub x_draws: u64,
    /// Samples per `X` when exact enumeration is too large.
    pub tuple_draws: u64,
    /// Length of the agreement-probability sequence; 0 skips it.
    #[serde(default)]
    pub agreement_k: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatnessReport {
    pub variant: ProbeVariant,
    pub group: GroupSpec,
    pub m: usize,
    pub samples_of_x: u64,
    pub per_x_max_mass: Vec<f64>,
    pub per_x_support: Vec<u64>,
    pub per_x_deficit: Vec<bool>,
    /// Fraction of draws whose subset sums have fewer distinct values than
    /// the full support size.
    pub support_deficit_fraction: f64,
    /// Largest max-mass over non-deficit draws.
    pub max_mass_non_deficit: f64,
    /// Flatness of the whole test: `m/|G|` for the uniform queries plus the
    /// worst last-query mass.
    pub alpha_empirical: f64,
    pub beta_empirical: f64,
    /// `C(m, m/2)` times `(p-1)^(m/2)` for the coefficient variant.
    pub full_support: u64,
    pub exact_conditional: bool,
    /// Agreement of `⊕ f(x_i)` with `⊕ g(x_i)` for the nearest homomorphism `g`.
    pub agreement_probabilities: Vec<f64>,
    pub in_regime: bool,
    pub regime_note: String,
}

impl FlatnessReport {
    /// `x_draw,max_mass,support,deficit` per drawn `X`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x_draw", "max_mass", "support", "deficit"])
            .map_err(|e| Error::Io(e.into()))?;
        for (i, ((mass, support), deficit)) in self
            .per_x_max_mass
            .iter()
            .zip(&self.per_x_support)
            .zip(&self.per_x_deficit)
            .enumerate()
        {
            out.write_record([
                i.to_string(),
                mass.to_string(),
                support.to_string(),
                deficit.to_string(),
            ])
            .map_err(|e| Error::Io(e.into()))?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `k`-subsets of `0..m` in lexicographic order.
pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=m - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// Scalar alphabet of the variant.
fn scalars(g: &GroupSpec, variant: ProbeVariant) -> Result<Vec<Scalar>> {
    Ok(match variant {
        ProbeVariant::Signs => Sign::all().into_iter().map(Scalar::from).collect(),
        ProbeVariant::Coefficients => {
            let (p, _) = g.require_vector_space()?;
            (1..p)
                .map(|c| crate::group::Coefficient::new(c, p).map(Scalar::from))
                .collect::<Result<_, _>>()?
        }
    })
}

struct XStats {
    max_mass: f64,
    support: u64,
    deficit: bool,
}

fn sum_over(
    g: &GroupSpec,
    xs: &[GroupElement],
    subset: &[usize],
    choice: &[Scalar],
) -> Result<GroupElement> {
    let t = SignedTuple {
        entries: subset
            .iter()
            .zip(choice)
            .map(|(&j, s)| (*s, xs[j]))
            .collect(),
    };
    Ok(g.signed_sum(&t, Direction::Increasing)?)
}

/// Decodes `idx` into `len` scalars (mixed radix, first most significant).
fn decode(mut idx: u128, len: usize, alphabet: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![alphabet[0]; len];
    for slot in out.iter_mut().rev() {
        *slot = alphabet[(idx % alphabet.len() as u128) as usize];
        idx /= alphabet.len() as u128;
    }
    out
}

fn probe_x<R: Rng + ?Sized>(
    g: &GroupSpec,
    xs: &[GroupElement],
    cfg: &FlatnessConfig,
    alphabet: &[Scalar],
    subs: &[Vec<usize>],
    rng: &mut R,
) -> Result<(XStats, bool)> {
    let half = cfg.m / 2;
    let per_subset = (alphabet.len() as u128).pow(half as u32);
    let combos = subs.len() as u128 * per_subset;
    let full = combos as u64;
    let mut counts: HashMap<GroupElement, u64> = HashMap::new();
    let exact = combos <= ENUMERATION_LIMIT;
    if exact {
        for s in subs {
            for idx in 0..per_subset {
                *counts
                    .entry(sum_over(g, xs, s, &decode(idx, half, alphabet))?)
                    .or_default() += 1;
            }
        }
    } else {
        for _ in 0..cfg.tuple_draws {
            let s = &subs[rng.gen_range(0..subs.len())];
            let choice: Vec<Scalar> = (0..half)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect();
            *counts.entry(sum_over(g, xs, s, &choice)?).or_default() += 1;
        }
    }
    let n = counts.values().sum::<u64>().max(1);
    let max_mass = *counts.values().max().unwrap_or(&0) as f64 / n as f64;
    let deficit = match cfg.variant {
        ProbeVariant::Signs => sign_deficit(g, xs, subs, rng)?,
        ProbeVariant::Coefficients => {
            linalg::rank(g, xs)? < cfg.m || (exact && (counts.len() as u64) < full)
        }
    };
    Ok((
        XStats {
            max_mass,
            support: counts.len() as u64,
            deficit,
        },
        exact,
    ))
}

/// Whether some sign vector yields fewer than `C(m, m/2)` distinct subset sums.
/// Every sign vector is checked when there are at most 4096 of them; beyond
/// that a random sample of 4096.
fn sign_deficit<R: Rng + ?Sized>(
    g: &GroupSpec,
    xs: &[GroupElement],
    subs: &[Vec<usize>],
    rng: &mut R,
) -> Result<bool> {
    let m = xs.len();
    let vectors: Vec<u64> = if m <= 12 {
        (0..1u64 << m).collect()
    } else {
        (0..4096)
            .map(|_| rng.gen::<u64>() & ((1u64 << m.min(63)) - 1))
            .collect()
    };
    for bits in vectors {
        let signs: Vec<Sign> = (0..m)
            .map(|j| {
                if bits >> j & 1 == 1 {
                    Sign::Minus
                } else {
                    Sign::Plus
                }
            })
            .collect();
        let mut seen = HashSet::with_capacity(subs.len());
        for s in subs {
            let choice: Vec<Scalar> = s.iter().map(|&j| signs[j].into()).collect();
            seen.insert(sum_over(g, xs, s, &choice)?);
        }
        if seen.len() < subs.len() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact `p_1..p_K` with all-plus signs: the probability that `⊕ f(x_i)`
/// equals `⊕ g(x_i)`, where `g` is the nearest homomorphism.
pub fn agreement_probabilities(f: &FunctionTable, k_max: usize) -> Result<Vec<Ratio<u128>>> {
    let (_, hom) = distance_to_hom(f)?;
    let (g, h) = (f.domain(), f.codomain());
    let ht = Cayley::new(h)?;
    let n = g.small_order(crate::function::DENSE_CAP)?;
    let hn = ht.order();
    // Pairs (f(x), g(x)) with multiplicities.
    let mut pairs: HashMap<(usize, usize), u128> = HashMap::new();
    for i in 0..n as u64 {
        let x = g.element_at(i);
        *pairs
            .entry((
                h.index_of(f.eval(x)) as usize,
                h.index_of(hom.eval(x)) as usize,
            ))
            .or_default() += 1;
    }
    let mut state = vec![0u128; hn * hn];
    state[0] = 1;
    let mut total = 1u128;
    let mut out = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        let mut next = vec![0u128; hn * hn];
        for (idx, &c) in state.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (a, b) = (idx / hn, idx % hn);
            for (&(fa, ga), &w) in &pairs {
                next[ht.mul(a, fa) * hn + ht.mul(b, ga)] += c * w;
            }
        }
        state = next;
        total = total
            .checked_mul(n as u128)
            .ok_or_else(|| Error::ResourceCap("agreement counts overflow".into()))?;
        let agree: u128 = (0..hn).map(|a| state[a * hn + a]).sum();
        out.push(Ratio::new(agree, total));
    }
    Ok(out)
}

pub fn flatness_probe<R: Rng + ?Sized>(
    g: &GroupSpec,
    f: Option<&FunctionTable>,
    cfg: &FlatnessConfig,
    rng: &mut R,
) -> Result<FlatnessReport> {
    if cfg.m == 0 || cfg.m % 2 == 1 || cfg.m > 62 {
        return Err(Error::Config(format!(
            "m must be even and in 2..=62, got {}",
            cfg.m
        )));
    }
    if binomial(cfg.m as u64, cfg.m as u64 / 2) > ENUMERATION_LIMIT {
        return Err(Error::ResourceCap(format!(
            "C({}, {}) subsets",
            cfg.m,
            cfg.m / 2
        )));
    }
    if cfg.x_draws == 0 {
        return Err(Error::Config("x_draws must be positive".into()));
    }
    let alphabet = scalars(g, cfg.variant)?;
    let subs = subsets(cfg.m, cfg.m / 2);
    let full = (subs.len() as u128 * (alphabet.len() as u128).pow(cfg.m as u32 / 2)) as u64;
    let (in_regime, regime_note) = match cfg.variant {
        ProbeVariant::Signs => {
            let ok = signs_branch_applies(g, cfg.m as u64);
            (
                ok,
                if ok {
                    "2^m <= |G|^(1/4)".to_string()
                } else {
                    format!("2^{} > |{g}|^(1/4)", cfg.m)
                },
            )
        }
        ProbeVariant::Coefficients => {
            let (_, n) = g.require_vector_space()?;
            let ok = 4 * cfg.m <= n as usize;
            (
                ok,
                if ok {
                    "m <= n/4".to_string()
                } else {
                    format!("m = {} > n/4 = {}/4", cfg.m, n)
                },
            )
        }
    };
    let mut report = FlatnessReport {
        variant: cfg.variant,
        group: g.clone(),
        m: cfg.m,
        samples_of_x: cfg.x_draws,
        per_x_max_mass: Vec::new(),
        per_x_support: Vec::new(),
        per_x_deficit: Vec::new(),
        support_deficit_fraction: 0.0,
        max_mass_non_deficit: 0.0,
        alpha_empirical: 0.0,
        beta_empirical: 0.0,
        full_support: full,
        exact_conditional: true,
        agreement_probabilities: Vec::new(),
        in_regime,
        regime_note,
    };
    for _ in 0..cfg.x_draws {
        let xs: Vec<GroupElement> = (0..cfg.m).map(|_| g.sample_uniform(rng)).collect();
        let (stats, exact) = probe_x(g, &xs, cfg, &alphabet, &subs, rng)?;
        report.exact_conditional &= exact;
        if !stats.deficit {
            report.max_mass_non_deficit = report.max_mass_non_deficit.max(stats.max_mass);
        }
        report.per_x_max_mass.push(stats.max_mass);
        report.per_x_support.push(stats.support);
        report.per_x_deficit.push(stats.deficit);
    }
    let deficits = report.per_x_deficit.iter().filter(|d| **d).count();
    report.support_deficit_fraction = deficits as f64 / cfg.x_draws as f64;
    report.beta_empirical = report.support_deficit_fraction;
    report.alpha_empirical = cfg.m as f64 / g.order() as f64 + report.max_mass_non_deficit;
    if let (Some(f), true) = (f, cfg.agreement_k > 0) {
        report.agreement_probabilities = agreement_probabilities(f, cfg.agreement_k)?
            .into_iter()
            .map(super::corrector::ratio_f64)
            .collect();
    }
    Ok(report)
}
