//! The online query channel.
//!
//! Every answered query credits the adversary with `t` manipulations (added to
//! the running budget when budget-managing, replacing it when fixed-rate), then
//! hands control to the strategy, whose manipulations take effect before the
//! next query. Nothing is manipulated before the first query.

mod strategy;
mod transcript_dist;

pub use strategy::{
    AdversaryStrategy, FnStrategy, NullStrategy, SpanEraser, StrategySpec, SumHunter, UniformEraser,
};
pub use transcript_dist::{
    total_variation, transcript_distribution, AnswerHistogram, FixedQueries, QueryPolicy,
};

use crate::function::FunctionTable;
use crate::group::GroupElement;
use crate::rng::StreamRng;
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Value(GroupElement),
    Bottom,
}

impl Answer {
    pub fn value(self) -> Option<GroupElement> {
        match self {
            Answer::Value(v) => Some(v),
            Answer::Bottom => None,
        }
    }

    pub fn is_bottom(self) -> bool {
        matches!(self, Answer::Bottom)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Erasure,
    Corruption,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    #[default]
    FixedRate,
    BudgetManaging,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Override {
    Erased,
    Corrupted(GroupElement),
}

/// A single requested manipulation. `value` must be `None` in erasure mode;
/// in corruption mode `None` means "a uniformly random different value".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Manipulation {
    pub target: GroupElement,
    pub value: Option<GroupElement>,
}

impl Manipulation {
    pub fn erase(target: GroupElement) -> Self {
        Manipulation {
            target,
            value: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub entries: Vec<(GroupElement, Answer)>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn answers(&self) -> Vec<Answer> {
        self.entries.iter().map(|e| e.1).collect()
    }

    /// One JSON object per line: `{"query": "...", "answer": "..."}`, with
    /// `"⊥"` for erased answers.
    pub fn write_jsonl<W: Write>(&self, f: &FunctionTable, mut w: W) -> Result<()> {
        for (x, a) in &self.entries {
            let answer = match a {
                Answer::Value(v) => f.codomain().format_element(*v),
                Answer::Bottom => "⊥".to_string(),
            };
            let line =
                serde_json::json!({ "query": f.domain().format_element(*x), "answer": answer });
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// What a strategy is allowed to see.
pub struct OracleView<'o> {
    pub base: &'o FunctionTable,
    pub transcript: &'o Transcript,
    pub budget: u64,
    pub t: u64,
    pub mode: Mode,
    overrides: &'o HashMap<GroupElement, Override>,
}

impl OracleView<'_> {
    pub fn is_manipulated(&self, x: GroupElement) -> bool {
        self.overrides.contains_key(&x)
    }

    pub fn manipulated_count(&self) -> usize {
        self.overrides.len()
    }
}

pub struct OnlineOracle<'a> {
    base: &'a FunctionTable,
    overrides: HashMap<GroupElement, Override>,
    mode: Mode,
    schedule: Schedule,
    t: u64,
    budget: u64,
    queries_answered: u64,
    manipulations_made: u64,
    manipulated_hits: u64,
    transcript: Transcript,
    strategy: Box<dyn AdversaryStrategy + 'a>,
    rng: StreamRng,
}

impl<'a> OnlineOracle<'a> {
    pub fn new(
        base: &'a FunctionTable,
        strategy: Box<dyn AdversaryStrategy + 'a>,
        mode: Mode,
        schedule: Schedule,
        t: u64,
        rng: StreamRng,
    ) -> Self {
        OnlineOracle {
            base,
            overrides: HashMap::new(),
            mode,
            schedule,
            t,
            budget: 0,
            queries_answered: 0,
            manipulations_made: 0,
            manipulated_hits: 0,
            transcript: Transcript::default(),
            strategy,
            rng,
        }
    }

    /// Oracle with no adversary.
    pub fn honest(base: &'a FunctionTable, rng: StreamRng) -> Self {
        Self::new(
            base,
            Box::new(NullStrategy),
            Mode::Erasure,
            Schedule::FixedRate,
            0,
            rng,
        )
    }

    pub fn base(&self) -> &FunctionTable {
        self.base
    }

    pub fn domain(&self) -> &crate::GroupSpec {
        self.base.domain()
    }

    pub fn codomain(&self) -> &crate::GroupSpec {
        self.base.codomain()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn budget_available(&self) -> u64 {
        self.budget
    }

    pub fn queries_answered(&self) -> u64 {
        self.queries_answered
    }

    pub fn manipulations_made(&self) -> u64 {
        self.manipulations_made
    }

    /// Queries whose answer came from a manipulated point.
    pub fn manipulated_hits(&self) -> u64 {
        self.manipulated_hits
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn is_manipulated(&self, x: GroupElement) -> bool {
        self.overrides.contains_key(&x)
    }

    fn current(&self, x: GroupElement) -> Answer {
        match self.overrides.get(&x) {
            Some(Override::Erased) => Answer::Bottom,
            Some(Override::Corrupted(v)) => Answer::Value(*v),
            None => Answer::Value(self.base.eval(x)),
        }
    }

    pub fn query(&mut self, x: GroupElement) -> Result<Answer> {
        if !self.base.domain().contains(x) {
            return Err(Error::Domain(format!(
                "query {:#x} is outside {}",
                x.bits(),
                self.base.domain()
            )));
        }
        let answer = self.current(x);
        if self.overrides.contains_key(&x) {
            self.manipulated_hits += 1;
        }
        self.transcript.entries.push((x, answer));
        self.queries_answered += 1;
        match self.schedule {
            Schedule::BudgetManaging => self.budget += self.t,
            Schedule::FixedRate => self.budget = self.t,
        }
        if self.budget > 0 {
            self.run_strategy()?;
        }
        if self.schedule == Schedule::FixedRate {
            self.budget = 0;
        }
        Ok(answer)
    }

    fn run_strategy(&mut self) -> Result<()> {
        let view = OracleView {
            base: self.base,
            transcript: &self.transcript,
            budget: self.budget,
            t: self.t,
            mode: self.mode,
            overrides: &self.overrides,
        };
        let moves = self.strategy.respond(&view, &mut self.rng)?;
        if moves.len() as u64 > self.budget {
            return Err(Error::ProtocolViolation(format!(
                "{} requested {} manipulations with budget {}",
                self.strategy.name(),
                moves.len(),
                self.budget
            )));
        }
        let (g, h) = (self.base.domain(), self.base.codomain());
        for m in moves {
            if !g.contains(m.target) {
                return Err(Error::ProtocolViolation(format!(
                    "target {:#x} is outside {g}",
                    m.target.bits()
                )));
            }
            let o = match (self.mode, m.value) {
                (Mode::Erasure, None) => Override::Erased,
                (Mode::Erasure, Some(_)) => {
                    return Err(Error::ProtocolViolation(
                        "value supplied in erasure mode".into(),
                    ))
                }
                (Mode::Corruption, Some(v)) if h.contains(v) => Override::Corrupted(v),
                (Mode::Corruption, Some(v)) => {
                    return Err(Error::ProtocolViolation(format!(
                        "value {:#x} is outside {h}",
                        v.bits()
                    )))
                }
                (Mode::Corruption, None) => {
                    if h.order() < 2 {
                        return Err(Error::ProtocolViolation("no different value exists".into()));
                    }
                    let old = match self.current(m.target) {
                        Answer::Value(v) => h.index_of(v),
                        Answer::Bottom => 0,
                    };
                    let r = self.rng.gen_range(1..h.order() as u64);
                    Override::Corrupted(
                        h.element_at(((old as u128 + r as u128) % h.order()) as u64),
                    )
                }
            };
            if !matches!(self.overrides.get(&m.target), Some(Override::Erased)) {
                self.overrides.insert(m.target, o);
            }
            self.manipulations_made += 1;
            self.budget -= 1;
        }
        Ok(())
    }
}
