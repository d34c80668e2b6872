use super::{Manipulation, OracleView};
use crate::group::linalg::VectorBasis;
use crate::group::{GroupElement, GroupSpec, Sign};
use crate::rng::StreamRng;
use crate::{Error, Result};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// An online adversary. Called after every answered query while budget is
/// available; must return at most `view.budget` manipulations.
pub trait AdversaryStrategy: Send {
    fn name(&self) -> String;
    fn respond(&mut self, view: &OracleView<'_>, rng: &mut StreamRng) -> Result<Vec<Manipulation>>;
}

pub struct NullStrategy;

impl AdversaryStrategy for NullStrategy {
    fn name(&self) -> String {
        "null".into()
    }

    fn respond(&mut self, _: &OracleView<'_>, _: &mut StreamRng) -> Result<Vec<Manipulation>> {
        Ok(Vec::new())
    }
}

/// Closure-backed strategy, mostly for tests.
pub struct FnStrategy<F> {
    name: String,
    f: F,
}

impl<F> FnStrategy<F>
where
    F: FnMut(&OracleView<'_>, &mut StreamRng) -> Result<Vec<Manipulation>> + Send,
{
    pub fn new(name: &str, f: F) -> Self {
        FnStrategy {
            name: name.into(),
            f,
        }
    }
}

impl<F> AdversaryStrategy for FnStrategy<F>
where
    F: FnMut(&OracleView<'_>, &mut StreamRng) -> Result<Vec<Manipulation>> + Send,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn respond(&mut self, view: &OracleView<'_>, rng: &mut StreamRng) -> Result<Vec<Manipulation>> {
        (self.f)(view, rng)
    }
}

/// Spends the whole budget on uniformly random points not yet manipulated.
pub struct UniformEraser;

const UNIFORM_RETRIES: usize = 64;
const SMALL_DOMAIN: u128 = 256;

impl AdversaryStrategy for UniformEraser {
    fn name(&self) -> String {
        "uniform".into()
    }

    fn respond(&mut self, view: &OracleView<'_>, rng: &mut StreamRng) -> Result<Vec<Manipulation>> {
        let g = view.base.domain();
        let free = g.order().saturating_sub(view.manipulated_count() as u128);
        if free == 0 {
            return Ok(Vec::new());
        }
        if g.order() <= SMALL_DOMAIN && free * 4 < g.order() {
            // Few points left: draw them exactly instead of retrying.
            let left: Vec<GroupElement> = g
                .elements(SMALL_DOMAIN)?
                .into_iter()
                .filter(|x| !view.is_manipulated(*x))
                .collect();
            let take = (view.budget as usize).min(left.len());
            return Ok(sample(rng, left.len(), take)
                .into_iter()
                .map(|i| Manipulation::erase(left[i]))
                .collect());
        }
        let mut picked = HashSet::new();
        let mut out = Vec::new();
        let mut misses = 0;
        while (out.len() as u64) < view.budget && misses < UNIFORM_RETRIES {
            let x = g.sample_uniform(rng);
            if view.is_manipulated(x) || !picked.insert(x) {
                misses += 1;
                continue;
            }
            out.push(Manipulation::erase(x));
        }
        Ok(out)
    }
}

/// Targets signed sums of the most recent queries: every sum of between 2 and
/// `w` of the last `w` queries that includes the newest one, terms in query
/// order, all-plus sign pattern first.
pub struct SumHunter {
    w: usize,
}

impl SumHunter {
    pub fn new(w: usize) -> Self {
        SumHunter { w: w.max(2) }
    }

    fn candidates(
        &self,
        g: &GroupSpec,
        recent: &[GroupElement],
        mut emit: impl FnMut(GroupElement) -> bool,
    ) {
        let newest = *recent.last().expect("nonempty");
        let older = &recent[..recent.len() - 1];
        let m = older.len();
        for size in 2..=self.w.min(m + 1) {
            // choose size-1 older queries, most recent first
            let mut chosen: Vec<usize> = (0..size - 1).map(|i| m - 1 - i).collect();
            loop {
                let mut terms: Vec<GroupElement> = chosen.iter().rev().map(|i| older[*i]).collect();
                terms.push(newest);
                for pattern in 0u32..(1 << size) {
                    let mut acc = g.identity();
                    for (j, x) in terms.iter().enumerate() {
                        let s = if pattern >> j & 1 == 1 {
                            Sign::Minus
                        } else {
                            Sign::Plus
                        };
                        acc = g.op(acc, g.signed_apply(s, *x));
                    }
                    if !emit(acc) {
                        return;
                    }
                }
                if !next_combination_desc(&mut chosen, m) {
                    break;
                }
            }
        }
    }
}

/// Steps a strictly decreasing index list to the next combination in
/// "most recent first" order.
fn next_combination_desc(c: &mut [usize], _m: usize) -> bool {
    let r = c.len();
    for i in (0..r).rev() {
        let floor = r - 1 - i;
        if c[i] > floor {
            c[i] -= 1;
            for j in i + 1..r {
                c[j] = c[j - 1] - 1;
            }
            return true;
        }
    }
    false
}

impl AdversaryStrategy for SumHunter {
    fn name(&self) -> String {
        format!("sum_hunter({})", self.w)
    }

    fn respond(&mut self, view: &OracleView<'_>, _: &mut StreamRng) -> Result<Vec<Manipulation>> {
        let g = view.base.domain();
        let entries = &view.transcript.entries;
        let start = entries.len().saturating_sub(self.w);
        let recent: Vec<GroupElement> = entries[start..].iter().map(|e| e.0).collect();
        let mut out = Vec::new();
        let mut picked = HashSet::new();
        let budget = view.budget as usize;
        self.candidates(g, &recent, |y| {
            if !view.is_manipulated(y) && picked.insert(y) {
                out.push(Manipulation::erase(y));
            }
            out.len() < budget
        });
        Ok(out)
    }
}

/// Erases points of the span of all queries so far, never the queries
/// themselves, walking the span in canonical order.
pub struct SpanEraser {
    basis: Option<VectorBasis>,
    queried: HashSet<GroupElement>,
    seen: usize,
    cursor: u128,
}

impl SpanEraser {
    pub fn new(domain: &GroupSpec) -> Result<Self> {
        Ok(SpanEraser {
            basis: Some(VectorBasis::new(domain)?),
            queried: HashSet::new(),
            seen: 0,
            cursor: 0,
        })
    }
}

impl AdversaryStrategy for SpanEraser {
    fn name(&self) -> String {
        "span_eraser".into()
    }

    fn respond(&mut self, view: &OracleView<'_>, _: &mut StreamRng) -> Result<Vec<Manipulation>> {
        let basis = self.basis.as_mut().expect("constructed");
        for (x, _) in &view.transcript.entries[self.seen..] {
            self.queried.insert(*x);
            if basis.insert(*x) {
                self.cursor = 0;
            }
        }
        self.seen = view.transcript.entries.len();
        let mut out = Vec::new();
        let size = basis.span_size();
        while (out.len() as u64) < view.budget && self.cursor < size {
            let y = basis.span_element(self.cursor);
            self.cursor += 1;
            if self.queried.contains(&y) || view.is_manipulated(y) {
                continue;
            }
            out.push(Manipulation::erase(y));
        }
        Ok(out)
    }
}

/// Strategy selection by name, as used in experiment configs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum StrategySpec {
    Null,
    Uniform,
    SumHunter {
        #[serde(default = "default_window")]
        w: usize,
    },
    SpanEraser,
}

fn default_window() -> usize {
    2
}

impl StrategySpec {
    pub fn build(&self, domain: &GroupSpec) -> Result<Box<dyn AdversaryStrategy>> {
        Ok(match self {
            StrategySpec::Null => Box::new(NullStrategy),
            StrategySpec::Uniform => Box::new(UniformEraser),
            StrategySpec::SumHunter { w } => Box::new(SumHunter::new(*w)),
            StrategySpec::SpanEraser => Box::new(SpanEraser::new(domain).map_err(|_| {
                Error::Domain(format!(
                    "span eraser needs a vector-space domain, got {domain}"
                ))
            })?),
        })
    }

    pub fn applies_to(&self, domain: &GroupSpec) -> bool {
        !matches!(self, StrategySpec::SpanEraser) || domain.as_vector_space().is_some()
    }

    pub fn label(&self) -> String {
        match self {
            StrategySpec::Null => "null".into(),
            StrategySpec::Uniform => "uniform".into(),
            StrategySpec::SumHunter { w } => format!("sum_hunter({w})"),
            StrategySpec::SpanEraser => "span_eraser".into(),
        }
    }
}
