//! Answer-string distributions a fixed query policy sees on random
//! homomorphisms (`D+`) versus random functions (`D-`) of `F_p^n -> F_p`,
//! against the span-erasing adversary.

use crate::function::{gen_instance, InstanceKind};
use crate::oracle::{
    total_variation, transcript_distribution, AdversaryStrategy, AnswerHistogram, FixedQueries,
    Mode, Schedule, SpanEraser,
};
use crate::rng::stream;
use crate::{Error, GroupElement, GroupSpec, Result};
use serde::Serialize;

const LABEL_PLUS: u64 = 11;
const LABEL_MINUS: u64 = 12;

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub domain: String,
    pub t: u64,
    pub queries: Vec<String>,
    pub trials: u64,
    pub total_variation: f64,
    pub plus: AnswerHistogram,
    pub minus: AnswerHistogram,
}

/// `e_1, ..., e_k` followed by `e_1 + ... + e_k`, which lies in their span.
pub fn unit_vectors_then_sum(g: &GroupSpec, k: usize) -> Result<Vec<GroupElement>> {
    let (_, n) = g.require_vector_space()?;
    if k == 0 || k > n as usize {
        return Err(Error::Config(format!(
            "need 1 <= k <= {n} unit vectors, got {k}"
        )));
    }
    let mut out = Vec::with_capacity(k + 1);
    let mut sum = g.identity();
    for i in 0..k {
        let mut digits = vec![0u64; n as usize];
        digits[i] = 1;
        let e = g.vector(&digits)?;
        sum = g.op(sum, e);
        out.push(e);
    }
    out.push(sum);
    Ok(out)
}

pub fn lowerbound_demo(
    p: u64,
    n: u32,
    t: u64,
    queries: &[GroupElement],
    trials: u64,
    seed: u64,
) -> Result<LowerBoundReport> {
    let g = GroupSpec::vector_space(p, n)?;
    let h = GroupSpec::vector_space(p, 1)?;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let view = |kind: InstanceKind, label: u64| {
        transcript_distribution(
            &mut FixedQueries(queries.to_vec()),
            |r| gen_instance(&kind, &g, &h, r),
            || Ok(Box::new(SpanEraser::new(&g)?) as Box<dyn AdversaryStrategy>),
            Mode::Erasure,
            Schedule::FixedRate,
            t,
            trials,
            &mut stream(seed, &[label]),
        )
    };
    let plus = view(InstanceKind::RandomHom, LABEL_PLUS)?;
    let minus = view(InstanceKind::RandomFunction, LABEL_MINUS)?;
    Ok(LowerBoundReport {
        domain: g.to_string(),
        t,
        queries: queries.iter().map(|x| g.format_element(*x)).collect(),
        trials,
        total_variation: total_variation(&plus, &minus),
        plus,
        minus,
    })
}
