//! How often does an iteration of the online signs test touch an erased
//! point, compared with `α q r t + β`?

use super::stats::standard_error;
use crate::function::FunctionTable;
use crate::oracle::{Mode, OnlineOracle, Schedule, StrategySpec};
use crate::rng::{stream, LABEL_ADVERSARY, LABEL_TESTER};
use crate::testers::{online_resilient_signs_test, Overrides};
use crate::{Epsilon, Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ManipulationCheck {
    pub strategy: String,
    pub iterations: u64,
    pub hit_iterations: u64,
    pub rate: f64,
    pub standard_error: f64,
    /// `α q r t + β` with `q = m + 1` queries per iteration.
    pub bound: f64,
    /// `rate <= bound + 3 SE`.
    pub holds: bool,
}

/// Runs the online signs test with `force_m = m`, `force_reps = reps` on a
/// homomorphism under erasures and counts iterations that saw `⊥`.
#[allow(clippy::too_many_arguments)]
pub fn manipulation_check(
    f: &FunctionTable,
    strategy: &StrategySpec,
    schedule: Schedule,
    t: u64,
    m: u64,
    reps: u64,
    trials: u64,
    alpha: f64,
    beta: f64,
    seed: u64,
) -> Result<ManipulationCheck> {
    let overrides = Overrides {
        force_m: Some(m),
        force_reps: Some(reps),
        force_sample_count: None,
    };
    let eps = Epsilon::new(1, 2).expect("constant");
    let per_iter = (m + 1) as usize;
    let mut hit_iterations = 0u64;
    let mut iterations = 0u64;
    for trial in 0..trials {
        let adversary = stream(seed, &[trial, LABEL_ADVERSARY]);
        let mut oracle = OnlineOracle::new(
            f,
            strategy.build(f.domain())?,
            Mode::Erasure,
            schedule,
            t,
            adversary,
        );
        let v = online_resilient_signs_test(
            &mut oracle,
            eps,
            t,
            &overrides,
            &mut stream(seed, &[trial, LABEL_TESTER]),
        )?;
        if !v.accepted() {
            return Err(Error::Domain(
                "the manipulation check needs a homomorphism input".into(),
            ));
        }
        for chunk in oracle.transcript().entries.chunks(per_iter) {
            iterations += 1;
            hit_iterations += chunk.iter().any(|(_, a)| a.is_bottom()) as u64;
        }
    }
    let rate = hit_iterations as f64 / iterations.max(1) as f64;
    let se = standard_error(rate, iterations);
    let bound = alpha * (m + 1) as f64 * reps as f64 * t as f64 + beta;
    Ok(ManipulationCheck {
        strategy: strategy.label(),
        iterations,
        hit_iterations,
        rate,
        standard_error: se,
        bound,
        holds: rate <= bound + 3.0 * se,
    })
}
