use super::{Answer, Mode, OnlineOracle, Schedule};
use crate::function::FunctionTable;
use crate::group::GroupElement;
use crate::oracle::AdversaryStrategy;
use crate::rng::StreamRng;
use crate::Result;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A deterministic, possibly adaptive, query algorithm.
pub trait QueryPolicy {
    /// Next query given the answers so far, or `None` to stop.
    fn next_query(&mut self, answers: &[Answer]) -> Option<GroupElement>;
    fn reset(&mut self) {}
}

/// Queries a fixed list regardless of the answers.
#[derive(Clone, Debug)]
pub struct FixedQueries(pub Vec<GroupElement>);

impl QueryPolicy for FixedQueries {
    fn next_query(&mut self, answers: &[Answer]) -> Option<GroupElement> {
        self.0.get(answers.len()).copied()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnswerHistogram {
    pub counts: BTreeMap<Vec<Answer>, u64>,
    pub trials: u64,
}

impl AnswerHistogram {
    pub fn probability(&self, key: &[Answer]) -> f64 {
        self.counts.get(key).copied().unwrap_or(0) as f64 / self.trials.max(1) as f64
    }
}

pub fn total_variation(a: &AnswerHistogram, b: &AnswerHistogram) -> f64 {
    let keys: std::collections::BTreeSet<&Vec<Answer>> =
        a.counts.keys().chain(b.counts.keys()).collect();
    keys.into_iter()
        .map(|k| (a.probability(k) - b.probability(k)).abs())
        .sum::<f64>()
        / 2.0
}

/// Empirical distribution of the answer string seen by `policy` on instances
/// drawn from `sample_instance`, against a fresh adversary per trial.
#[allow(clippy::too_many_arguments)]
pub fn transcript_distribution<P, S, A>(
    policy: &mut P,
    mut sample_instance: S,
    mut make_strategy: A,
    mode: Mode,
    schedule: Schedule,
    t: u64,
    trials: u64,
    rng: &mut StreamRng,
) -> Result<AnswerHistogram>
where
    P: QueryPolicy,
    S: FnMut(&mut StreamRng) -> Result<FunctionTable>,
    A: FnMut() -> Result<Box<dyn AdversaryStrategy>>,
{
    let mut hist = AnswerHistogram::default();
    for _ in 0..trials {
        let f = sample_instance(rng)?;
        let child = crate::rng::stream(rng.gen(), &[]);
        let mut oracle = OnlineOracle::new(&f, make_strategy()?, mode, schedule, t, child);
        policy.reset();
        let mut answers = Vec::new();
        while let Some(x) = policy.next_query(&answers) {
            answers.push(oracle.query(x)?);
        }
        *hist.counts.entry(answers).or_insert(0) += 1;
        hist.trials += 1;
    }
    Ok(hist)
}
