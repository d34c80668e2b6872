//! Exhaustive computations over signed tuples.

use crate::function::FunctionTable;
use crate::group::{Direction, GroupElement, Sign, SignedTuple};
use crate::{Error, GroupSpec, Result};
use num_rational::Ratio;

/// Largest number of tuples visited by literal enumeration.
pub const TUPLE_ENUMERATION_CAP: u128 = 100_000_000;

/// Largest number of transitions in the joint-sum recursion.
pub const PROFILE_WORK_CAP: u128 = 1_000_000_000;

/// Largest group handled by the lookup tables below.
const TABLE_CAP: u128 = 1 << 12;

/// Index-level multiplication and inversion tables.
pub(crate) struct Cayley {
    pub elems: Vec<GroupElement>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl Cayley {
    pub fn new(g: &GroupSpec) -> Result<Self> {
        let n = g.small_order(TABLE_CAP)?;
        let elems = g.elements(TABLE_CAP)?;
        let mut mul = vec![0u32; n * n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                mul[i * n + j] = g.index_of(g.op(*a, *b)) as u32;
            }
        }
        let inv = elems
            .iter()
            .map(|a| g.index_of(g.inverse(*a)) as u32)
            .collect();
        Ok(Cayley { elems, mul, inv })
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i * self.elems.len() + j] as usize
    }

    #[inline]
    pub fn signed(&self, s: Sign, i: usize) -> usize {
        match s {
            Sign::Plus => i,
            Sign::Minus => self.inv[i] as usize,
        }
    }
}

fn tuple_total(g_order: usize, len: usize) -> Result<u128> {
    (2 * g_order as u128)
        .checked_pow(len as u32)
        .ok_or_else(|| Error::ResourceCap(format!("(2|G|)^{len} overflows")))
}

/// Number of signed tuples of length `k` whose increasing-order sum is each
/// `a`, by visiting every tuple. Indexed by canonical element order.
pub fn signed_sum_histogram(g: &GroupSpec, k: usize) -> Result<Vec<u128>> {
    let total = tuple_total(g.small_order(TABLE_CAP)?, k)?;
    if total > TUPLE_ENUMERATION_CAP {
        return Err(Error::ResourceCap(format!(
            "{total} tuples exceed {TUPLE_ENUMERATION_CAP}"
        )));
    }
    let elems = g.elements(TABLE_CAP)?;
    let n = elems.len();
    let mut hist = vec![0u128; n];
    let mut digits = vec![0usize; k];
    for _ in 0..total {
        let tuple = SignedTuple::from_signs(digits.iter().map(|d| {
            (
                if d % 2 == 0 { Sign::Plus } else { Sign::Minus },
                elems[d / 2],
            )
        }));
        hist[g.index_of(g.signed_sum(&tuple, Direction::Increasing)?) as usize] += 1;
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < 2 * n {
                break;
            }
            *d = 0;
        }
    }
    Ok(hist)
}

/// Joint distribution of `(Σ σ_i x_i, ⊕ σ_i f(x_i))` over all `(2|G|)^len`
/// signed tuples, as counts indexed `[a * |H| + c]`.
#[derive(Clone, Debug)]
pub struct SumProfile {
    pub len: usize,
    pub g_order: usize,
    pub h_order: usize,
    pub counts: Vec<u128>,
    pub total: u128,
}

impl SumProfile {
    pub fn count(&self, a: usize, c: usize) -> u128 {
        self.counts[a * self.h_order + c]
    }

    /// Tuples summing to `a`.
    pub fn fix_size(&self) -> u128 {
        self.total / self.g_order as u128
    }
}

pub fn sum_profile(f: &FunctionTable, len: usize) -> Result<SumProfile> {
    let (gt, ht) = (Cayley::new(f.domain())?, Cayley::new(f.codomain())?);
    let (n, m) = (gt.order(), ht.order());
    let total = tuple_total(n, len)?;
    let work = len as u128 * (n * m) as u128 * 2 * n as u128;
    if work > PROFILE_WORK_CAP {
        return Err(Error::ResourceCap(format!(
            "profile needs {work} steps, cap {PROFILE_WORK_CAP}"
        )));
    }
    let h = f.codomain();
    let image: Vec<usize> = gt
        .elems
        .iter()
        .map(|x| h.index_of(f.eval(*x)) as usize)
        .collect();
    let mut counts = vec![0u128; n * m];
    counts[0] = 1;
    for _ in 0..len {
        let mut next = vec![0u128; n * m];
        for (state, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (a, b) = (state / m, state % m);
            for x in 0..n {
                for s in Sign::all() {
                    let a2 = gt.mul(a, gt.signed(s, x));
                    let b2 = ht.mul(b, ht.signed(s, image[x]));
                    next[a2 * m + b2] += c;
                }
            }
        }
        counts = next;
    }
    Ok(SumProfile {
        len,
        g_order: n,
        h_order: m,
        counts,
        total,
    })
}

/// Exact rejection probability of the random signs test on `2k` points.
pub fn exact_rejection_probability(f: &FunctionTable, k: usize) -> Result<Ratio<u128>> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let profile = sum_profile(f, 2 * k)?;
    Ok(profile_rejection(f, &profile))
}

pub(crate) fn profile_rejection(f: &FunctionTable, profile: &SumProfile) -> Ratio<u128> {
    let (g, h) = (f.domain(), f.codomain());
    let mut bad = 0u128;
    for a in 0..profile.g_order {
        let fa = h.index_of(f.eval(g.element_at(a as u64))) as usize;
        bad += (0..profile.h_order)
            .filter(|c| *c != fa)
            .map(|c| profile.count(a, c))
            .sum::<u128>();
    }
    Ratio::new(bad, profile.total)
}
