//! Signs and coefficients family: a single check, its unpredictable variant,
//! and the 48-fold online wrapper.

use super::params::{online_m, require_even, Overrides, ONLINE_REPETITIONS};
use super::{Probe, Verdict, Witness};
use crate::group::{Coefficient, Direction, GroupElement, Scalar, Sign, SignedTuple};
use crate::oracle::{Answer, OnlineOracle};
use crate::{Epsilon, Error, GroupSpec, Result};
use rand::seq::index::sample;
use rand::Rng;

/// How the scalars of a check are drawn.
#[derive(Clone, Debug)]
pub(crate) enum ScalarDraw<'s> {
    RandomSigns,
    FixedSigns(&'s [Sign]),
    RandomCoefficients(u64),
}

impl ScalarDraw<'_> {
    fn draw<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Scalar {
        match self {
            ScalarDraw::RandomSigns => Sign::random(rng).into(),
            ScalarDraw::FixedSigns(s) => s[i].into(),
            ScalarDraw::RandomCoefficients(p) => Coefficient::random(*p, rng).into(),
        }
    }
}

/// Field characteristic shared by domain and codomain.
fn shared_characteristic(g: &GroupSpec, h: &GroupSpec) -> Result<u64> {
    match (g.as_vector_space(), h.as_vector_space()) {
        (Some((p, _)), Some((q, _))) if p == q => Ok(p),
        _ => Err(Error::Domain(format!(
            "coefficient tests need F_p^n -> F_p^r with one p, got {g} -> {h}"
        ))),
    }
}

/// Compares `⊕ s_i a_i` with `answer`. Returns `None` when some answer is `⊥`.
fn check(
    h: &GroupSpec,
    tuple: &SignedTuple,
    point: GroupElement,
    answers: &[Answer],
    answer: Answer,
) -> Result<Option<Witness>> {
    let (Some(values), Some(answer)) = (
        answers
            .iter()
            .map(|a| a.value())
            .collect::<Option<Vec<_>>>(),
        answer.value(),
    ) else {
        return Ok(None);
    };
    let image = SignedTuple {
        entries: tuple
            .entries
            .iter()
            .zip(&values)
            .map(|((s, _), v)| (*s, *v))
            .collect(),
    };
    if h.signed_sum(&image, Direction::Increasing)? == answer {
        return Ok(None);
    }
    Ok(Some(Witness::Tuple {
        tuple: tuple.clone(),
        point,
        answers: values,
        answer,
    }))
}

/// One check on `k` points. All `k + 1` queries are made even after a `⊥`.
fn single_check<R: Rng + ?Sized>(
    probe: &mut Probe,
    k: usize,
    draw: &ScalarDraw,
    rng: &mut R,
) -> Result<Option<Witness>> {
    let (g, h) = (probe.domain(), probe.codomain());
    let xs: Vec<GroupElement> = (0..k).map(|_| g.sample_uniform(rng)).collect();
    let tuple = SignedTuple {
        entries: xs
            .iter()
            .enumerate()
            .map(|(i, x)| (draw.draw(i, rng), *x))
            .collect(),
    };
    let a = g.signed_sum(&tuple, Direction::Increasing)?;
    let answers = xs
        .iter()
        .map(|x| probe.query(*x))
        .collect::<Result<Vec<_>>>()?;
    let fa = probe.query(a)?;
    check(&h, &tuple, a, &answers, fa)
}

/// The unpredictable variant: query `m` points, then the scalars and an
/// `m/2`-subset are drawn, then the last query.
fn unpredictable_check<R: Rng + ?Sized>(
    probe: &mut Probe,
    m: usize,
    draw: &ScalarDraw,
    rng: &mut R,
) -> Result<Option<Witness>> {
    let (g, h) = (probe.domain(), probe.codomain());
    let xs: Vec<GroupElement> = (0..m).map(|_| g.sample_uniform(rng)).collect();
    let answers = xs
        .iter()
        .map(|x| probe.query(*x))
        .collect::<Result<Vec<_>>>()?;
    let scalars: Vec<Scalar> = (0..m).map(|i| draw.draw(i, rng)).collect();
    let mut subset = sample(rng, m, m / 2).into_vec();
    subset.sort_unstable();
    let tuple = SignedTuple {
        entries: subset.iter().map(|&j| (scalars[j], xs[j])).collect(),
    };
    let y = g.signed_sum(&tuple, Direction::Increasing)?;
    let fy = probe.query(y)?;
    let picked: Vec<Answer> = subset.iter().map(|&j| answers[j]).collect();
    check(&h, &tuple, y, &picked, fy)
}

fn run_single<R: Rng + ?Sized>(
    name: &str,
    oracle: &mut OnlineOracle,
    k: usize,
    draw: ScalarDraw,
    rng: &mut R,
) -> Result<Verdict> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let mut v = Verdict::new(name);
    v.iterations_run = 1;
    let mut probe = Probe {
        oracle,
        verdict: &mut v,
    };
    if let Some(w) = single_check(&mut probe, k, &draw, rng)? {
        v.reject(w);
    }
    Ok(v)
}

fn run_unpredictable<R: Rng + ?Sized>(
    name: &str,
    oracle: &mut OnlineOracle,
    m: usize,
    reps: u64,
    draw: ScalarDraw,
    rng: &mut R,
) -> Result<Verdict> {
    require_even(m as u64)?;
    let mut v = Verdict::new(name);
    v.m = Some(m as u64);
    for _ in 0..reps {
        v.iterations_run += 1;
        let mut probe = Probe {
            oracle,
            verdict: &mut v,
        };
        if let Some(w) = unpredictable_check(&mut probe, m, &draw, rng)? {
            v.reject(w);
            break;
        }
    }
    Ok(v)
}

fn run_online<R: Rng + ?Sized>(
    name: &str,
    oracle: &mut OnlineOracle,
    eps: Epsilon,
    t: u64,
    base: u64,
    overrides: &Overrides,
    draw: ScalarDraw,
    rng: &mut R,
) -> Result<Verdict> {
    let m = match overrides.force_m {
        Some(m) => m,
        None => online_m(eps, t, base)?,
    };
    let reps = overrides.force_reps.unwrap_or(ONLINE_REPETITIONS);
    let mut v = run_unpredictable(name, oracle, m as usize, reps, draw, rng)?;
    v.forced_parameters = overrides.force_m.is_some() || overrides.force_reps.is_some();
    Ok(v)
}

/// Draws `k` points and `k` signs, queries the points and their signed sum.
pub fn random_signs_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    k: usize,
    rng: &mut R,
) -> Result<Verdict> {
    run_single("signs", oracle, k, ScalarDraw::RandomSigns, rng)
}

pub fn fixed_signs_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    signs: &[Sign],
    rng: &mut R,
) -> Result<Verdict> {
    run_single(
        "fixed-signs",
        oracle,
        signs.len(),
        ScalarDraw::FixedSigns(signs),
        rng,
    )
}

pub fn unpredictable_signs_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    m: usize,
    rng: &mut R,
) -> Result<Verdict> {
    run_unpredictable(
        "unpredictable-signs",
        oracle,
        m,
        1,
        ScalarDraw::RandomSigns,
        rng,
    )
}

pub fn online_resilient_signs_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    eps: Epsilon,
    t: u64,
    overrides: &Overrides,
    rng: &mut R,
) -> Result<Verdict> {
    run_online(
        "online-signs",
        oracle,
        eps,
        t,
        2,
        overrides,
        ScalarDraw::RandomSigns,
        rng,
    )
}

pub fn random_coefficients_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    k: usize,
    rng: &mut R,
) -> Result<Verdict> {
    let p = shared_characteristic(oracle.domain(), oracle.codomain())?;
    run_single("coeffs", oracle, k, ScalarDraw::RandomCoefficients(p), rng)
}

pub fn unpredictable_coefficients_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    m: usize,
    rng: &mut R,
) -> Result<Verdict> {
    let p = shared_characteristic(oracle.domain(), oracle.codomain())?;
    run_unpredictable(
        "unpredictable-coeffs",
        oracle,
        m,
        1,
        ScalarDraw::RandomCoefficients(p),
        rng,
    )
}

pub fn online_resilient_coefficients_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    eps: Epsilon,
    t: u64,
    overrides: &Overrides,
    rng: &mut R,
) -> Result<Verdict> {
    let p = shared_characteristic(oracle.domain(), oracle.codomain())?;
    run_online(
        "online-coeffs",
        oracle,
        eps,
        t,
        p,
        overrides,
        ScalarDraw::RandomCoefficients(p),
        rng,
    )
}

/// Unpredictable check with a fixed sign vector of length `m`.
#[cfg(test)]
pub(crate) fn unpredictable_fixed_signs_test<R: Rng + ?Sized>(
    oracle: &mut OnlineOracle,
    signs: &[Sign],
    rng: &mut R,
) -> Result<Verdict> {
    run_unpredictable(
        "unpredictable-fixed-signs",
        oracle,
        signs.len(),
        1,
        ScalarDraw::FixedSigns(signs),
        rng,
    )
}
