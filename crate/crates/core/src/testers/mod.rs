//! The testers. Each one drives an [`OnlineOracle`] and returns a [`Verdict`].
//!
//! Answers of `⊥` never cause a rejection, so every tester has one-sided error
//! against erasures.

mod dispatch;
mod learners;
mod params;
mod signs;

pub use dispatch::{dispatch_general, dispatch_prime};
pub use learners::{generated_subgroup_test, gr_sample_based_test, resolve_e, zero_test};
pub use params::{
    admissible_t, gr_sample_count, online_m, signs_branch_applies, Overrides, TesterParams,
    DEFAULT_RANGE_CONSTANT, ONLINE_REPETITIONS,
};
pub use signs::{
    fixed_signs_test, online_resilient_coefficients_test, online_resilient_signs_test,
    random_coefficients_test, random_signs_test, unpredictable_coefficients_test,
    unpredictable_signs_test,
};

use crate::function::{fit, Fit, FunctionTable};
use crate::group::{Direction, GroupElement, SignedTuple};
use crate::oracle::{Answer, OnlineOracle};
use crate::{Error, GroupSpec, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

/// Evidence behind a rejection, as answered by the oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `⊕ σ_i answers_i != answer` where `point = Σ σ_i x_i`.
    Tuple {
        tuple: SignedTuple,
        point: GroupElement,
        answers: Vec<GroupElement>,
        answer: GroupElement,
    },
    /// Sampled values admit no homomorphism, or the fitted one disagrees at `spot`.
    Learner {
        samples: Vec<(GroupElement, GroupElement)>,
        spot: Option<(GroupElement, GroupElement)>,
    },
    /// A non-identity value where only the zero map is a homomorphism.
    NonZero {
        point: GroupElement,
        answer: GroupElement,
    },
}

impl Witness {
    /// Re-checks the witness against `f` itself, ignoring the recorded answers.
    pub fn violates(&self, f: &FunctionTable) -> Result<bool> {
        let (g, h) = (f.domain(), f.codomain());
        match self {
            Witness::Tuple { tuple, point, .. } => {
                if g.signed_sum(tuple, Direction::Increasing)? != *point {
                    return Ok(false);
                }
                let image = SignedTuple {
                    entries: tuple
                        .entries
                        .iter()
                        .map(|(s, x)| (*s, f.eval(*x)))
                        .collect(),
                };
                Ok(h.signed_sum(&image, Direction::Increasing)? != f.eval(*point))
            }
            Witness::Learner { samples, spot } => {
                let mut pts: Vec<_> = samples.iter().map(|(x, _)| (*x, f.eval(*x))).collect();
                if let Some((x, _)) = spot {
                    pts.push((*x, f.eval(*x)));
                }
                Ok(matches!(fit(g, h, &pts)?, Fit::Inconsistent))
            }
            Witness::NonZero { point, .. } => Ok(f.eval(*point) != h.identity()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub algorithm: String,
    pub decision: Decision,
    pub queries_made: u64,
    pub erasures_seen: u64,
    pub iterations_run: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reject_witness: Option<Witness>,
    /// Sample size, or `m` for the unpredictable family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    /// Learners: whether the sample covered or generated the domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_generated: Option<bool>,
    /// Parameters came from overrides rather than the formulas.
    #[serde(default)]
    pub forced_parameters: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Verdict {
    fn new(algorithm: &str) -> Self {
        Verdict {
            algorithm: algorithm.to_string(),
            decision: Decision::Accept,
            queries_made: 0,
            erasures_seen: 0,
            iterations_run: 0,
            reject_witness: None,
            m: None,
            sample_generated: None,
            forced_parameters: false,
            warnings: Vec::new(),
        }
    }

    pub fn accepted(&self) -> bool {
        self.decision == Decision::Accept
    }

    fn reject(&mut self, w: Witness) {
        self.decision = Decision::Reject;
        self.reject_witness = Some(w);
    }

    /// Folds a sub-run into this verdict: counters add up, the first rejection wins.
    fn absorb(&mut self, other: Verdict) {
        self.queries_made += other.queries_made;
        self.erasures_seen += other.erasures_seen;
        self.iterations_run += other.iterations_run;
        self.forced_parameters |= other.forced_parameters;
        self.m = self.m.or(other.m);
        self.sample_generated = self.sample_generated.or(other.sample_generated);
        if self.accepted() && !other.accepted() {
            self.decision = Decision::Reject;
            self.reject_witness = other.reject_witness;
        }
        self.warnings.extend(other.warnings);
    }
}

/// Counts queries and erasures for one verdict.
struct Probe<'v, 'o, 'a> {
    oracle: &'o mut OnlineOracle<'a>,
    verdict: &'v mut Verdict,
}

impl Probe<'_, '_, '_> {
    fn query(&mut self, x: GroupElement) -> Result<Answer> {
        let a = self.oracle.query(x)?;
        self.verdict.queries_made += 1;
        if a.is_bottom() {
            self.verdict.erasures_seen += 1;
        }
        Ok(a)
    }

    fn domain(&self) -> GroupSpec {
        self.oracle.domain().clone()
    }

    fn codomain(&self) -> GroupSpec {
        self.oracle.codomain().clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TesterName {
    Signs,
    FixedSigns,
    UnpredictableSigns,
    OnlineSigns,
    GrSample,
    GeneratedSubgroup,
    Coeffs,
    UnpredictableCoeffs,
    OnlineCoeffs,
    Zero,
    DispatchGeneral,
    DispatchPrime,
}

impl TesterName {
    pub const ALL: [TesterName; 12] = [
        TesterName::Signs,
        TesterName::FixedSigns,
        TesterName::UnpredictableSigns,
        TesterName::OnlineSigns,
        TesterName::GrSample,
        TesterName::GeneratedSubgroup,
        TesterName::Coeffs,
        TesterName::UnpredictableCoeffs,
        TesterName::OnlineCoeffs,
        TesterName::Zero,
        TesterName::DispatchGeneral,
        TesterName::DispatchPrime,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TesterName::Signs => "signs",
            TesterName::FixedSigns => "fixed-signs",
            TesterName::UnpredictableSigns => "unpredictable-signs",
            TesterName::OnlineSigns => "online-signs",
            TesterName::GrSample => "gr-sample",
            TesterName::GeneratedSubgroup => "generated-subgroup",
            TesterName::Coeffs => "coeffs",
            TesterName::UnpredictableCoeffs => "unpredictable-coeffs",
            TesterName::OnlineCoeffs => "online-coeffs",
            TesterName::Zero => "zero",
            TesterName::DispatchGeneral => "dispatch-general",
            TesterName::DispatchPrime => "dispatch-prime",
        }
    }

    /// Whether the tester is defined for maps `g -> h`.
    pub fn applies_to(self, g: &GroupSpec, h: &GroupSpec) -> bool {
        let same_char = match (g.as_vector_space(), h.as_vector_space()) {
            (Some((p, _)), Some((q, _))) => p == q,
            _ => false,
        };
        match self {
            TesterName::Coeffs | TesterName::UnpredictableCoeffs | TesterName::OnlineCoeffs => {
                same_char
            }
            TesterName::DispatchPrime => same_char,
            TesterName::Zero => {
                let mut seen = 0;
                let walk = crate::function::for_each_homomorphism(g, h, |_| {
                    seen += 1;
                    if seen > 1 {
                        std::ops::ControlFlow::Break(())
                    } else {
                        std::ops::ControlFlow::Continue(())
                    }
                });
                walk.is_ok() && seen == 1
            }
            _ => true,
        }
    }
}

impl fmt::Display for TesterName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TesterName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TesterName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown tester `{s}`")))
    }
}

/// A tester by name together with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesterSpec {
    pub name: TesterName,
    #[serde(flatten)]
    pub params: TesterParams,
}

impl TesterSpec {
    pub fn new(name: TesterName, params: TesterParams) -> Self {
        TesterSpec { name, params }
    }

    /// Fills in parameters that are expensive to derive per trial.
    pub fn resolve(&mut self, g: &GroupSpec) -> Result<()> {
        let needs_e = matches!(
            self.name,
            TesterName::GeneratedSubgroup | TesterName::DispatchPrime
        );
        if needs_e && self.params.e_of_g.is_none() {
            self.params.e_of_g = Some(resolve_e(g)?);
        }
        Ok(())
    }

    /// Runs `params.repetitions` independent copies; rejects if any copy does.
    pub fn run<R: Rng + ?Sized>(&self, oracle: &mut OnlineOracle, rng: &mut R) -> Result<Verdict> {
        let mut total = Verdict::new(self.name.as_str());
        for _ in 0..self.params.repetitions.max(1) {
            let v = self.run_once(oracle, rng)?;
            total.algorithm = v.algorithm.clone();
            total.absorb(v);
            if !total.accepted() {
                break;
            }
        }
        Ok(total)
    }

    fn run_once<R: Rng + ?Sized>(&self, oracle: &mut OnlineOracle, rng: &mut R) -> Result<Verdict> {
        let p = &self.params;
        let t = oracle.t();
        match self.name {
            TesterName::Signs => random_signs_test(oracle, p.k()?, rng),
            TesterName::FixedSigns => {
                let signs = match &p.signs {
                    Some(s) => s.clone(),
                    None => vec![crate::group::Sign::Plus; p.k()?],
                };
                fixed_signs_test(oracle, &signs, rng)
            }
            TesterName::UnpredictableSigns => unpredictable_signs_test(oracle, p.m()?, rng),
            TesterName::OnlineSigns => {
                online_resilient_signs_test(oracle, p.epsilon()?, t, &p.overrides, rng)
            }
            TesterName::GrSample => {
                gr_sample_based_test(oracle, p.epsilon()?, p.overrides.force_sample_count, rng)
            }
            TesterName::GeneratedSubgroup => {
                let e = match p.e_of_g {
                    Some(e) => e,
                    None => resolve_e(oracle.domain())?,
                };
                let mut v = generated_subgroup_test(
                    oracle,
                    p.epsilon()?,
                    e,
                    p.overrides.force_sample_count,
                    rng,
                )?;
                v.forced_parameters |= p.overrides.force_sample_count.is_some();
                Ok(v)
            }
            TesterName::Coeffs => random_coefficients_test(oracle, p.k()?, rng),
            TesterName::UnpredictableCoeffs => unpredictable_coefficients_test(oracle, p.m()?, rng),
            TesterName::OnlineCoeffs => {
                online_resilient_coefficients_test(oracle, p.epsilon()?, t, &p.overrides, rng)
            }
            TesterName::Zero => zero_test(oracle, p.epsilon()?, rng),
            TesterName::DispatchGeneral => dispatch_general(oracle, p.epsilon()?, t, p, rng),
            TesterName::DispatchPrime => dispatch_prime(oracle, p.epsilon()?, t, p, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in TesterName::ALL {
            assert_eq!(n.as_str().parse::<TesterName>().unwrap(), n);
            let json = serde_json::to_string(&n).unwrap();
            assert_eq!(json, format!("\"{}\"", n.as_str()));
        }
        assert!("blr".parse::<TesterName>().is_err());
    }

    #[test]
    fn spec_json_flattens_params() {
        let s: TesterSpec = serde_json::from_str(
            r#"{"name":"online-signs","epsilon":"1/4","overrides":{"force_m":8}}"#,
        )
        .unwrap();
        assert_eq!(s.name, TesterName::OnlineSigns);
        assert_eq!(s.params.overrides.force_m, Some(8));
    }

    #[test]
    fn applicability() {
        let g = |s: &str| s.parse::<GroupSpec>().unwrap();
        assert!(TesterName::Coeffs.applies_to(&g("F3^4"), &g("F3^2")));
        assert!(!TesterName::Coeffs.applies_to(&g("Z5"), &g("Z5")));
        assert!(TesterName::Zero.applies_to(&g("Z2"), &g("Z3")));
        assert!(!TesterName::Zero.applies_to(&g("Z5"), &g("Z5")));
    }
}
