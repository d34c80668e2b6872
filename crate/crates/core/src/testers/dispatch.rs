//! Theorem-level dispatch between the online wrappers and the sample-based
//! learners.

use super::learners::{generated_subgroup_test, gr_sample_based_test, resolve_e};
use super::params::{
    admissible_t, online_m, signs_branch_applies, TesterParams, DEFAULT_RANGE_CONSTANT,
};
use super::signs::{online_resilient_coefficients_test, online_resilient_signs_test};
use super::Verdict;
use crate::oracle::OnlineOracle;
use crate::{Epsilon, Error, GroupSpec, Result};
use rand::Rng;

fn range_warning(g: &GroupSpec, eps: Epsilon, t: u64, params: &TesterParams) -> Option<String> {
    let c = params.range_constant.unwrap_or(DEFAULT_RANGE_CONSTANT);
    let bound = admissible_t(g, eps, c);
    (t as f64 > bound).then(|| format!("t = {t} exceeds the admissible range {bound:.3} (c = {c})"))
}

fn tag(mut v: Verdict, prefix: &str, warning: Option<String>) -> Verdict {
    v.algorithm = format!("{prefix}:{}", v.algorithm);
    v.warnings.extend(warning);
    v
}

/// Online signs wrapper when `2^m <= |G|^(1/4)`, else the subset-sum learner.
pub fn dispatch_general<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    eps: Epsilon,
    t: u64,
    params: &TesterParams,
    rng: &mut R,
) -> Result<Verdict> {
    let g = oracle.domain().clone();
    let warning = range_warning(&g, eps, t, params);
    let m = match params.overrides.force_m {
        Some(m) => m,
        None => online_m(eps, t, 2)?,
    };
    let v = if signs_branch_applies(&g, m) {
        online_resilient_signs_test(oracle, eps, t, &params.overrides, rng)?
    } else {
        gr_sample_based_test(oracle, eps, params.overrides.force_sample_count, rng)?
    };
    Ok(tag(v, "dispatch-general", warning))
}

/// Online coefficients wrapper when `m <= n/4`, else the generated-subgroup learner.
pub fn dispatch_prime<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    eps: Epsilon,
    t: u64,
    params: &TesterParams,
    rng: &mut R,
) -> Result<Verdict> {
    let g = oracle.domain().clone();
    let (p, n) = match (g.as_vector_space(), oracle.codomain().as_vector_space()) {
        (Some((p, n)), Some((q, _))) if p == q => (p, n),
        _ => {
            return Err(Error::Domain(format!(
                "prime-field dispatch needs F_p^n -> F_p^r, got {g} -> {}",
                oracle.codomain()
            )))
        }
    };
    let warning = range_warning(&g, eps, t, params);
    let m = match params.overrides.force_m {
        Some(m) => m,
        None => online_m(eps, t, p)?,
    };
    let v = if 4 * m <= n as u64 {
        online_resilient_coefficients_test(oracle, eps, t, &params.overrides, rng)?
    } else {
        let e = match params.e_of_g {
            Some(e) => e,
            None => resolve_e(&g)?,
        };
        let mut v =
            generated_subgroup_test(oracle, eps, e, params.overrides.force_sample_count, rng)?;
        v.forced_parameters = params.overrides.force_sample_count.is_some();
        v
    };
    Ok(tag(v, "dispatch-prime", warning))
}
