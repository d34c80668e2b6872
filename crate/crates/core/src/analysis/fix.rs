//! Uniform sampling from `Fix(a)`, the signed tuples whose increasing-order
//! sum is `a`.
//!
//! Each sampler is a deterministic function of explicit choices plus a thin
//! random wrapper, so the choice space can be enumerated in tests.

use crate::group::{Direction, GroupElement, Sign, SignedTuple};
use crate::{Error, GroupSpec, Result};
use rand::Rng;

/// Completes `prefix` with the unique `(sign, x)` making the sum equal `a`.
pub fn complete_to(
    g: &GroupSpec,
    prefix: &SignedTuple,
    last: Sign,
    a: GroupElement,
) -> Result<SignedTuple> {
    let p = g.signed_sum(prefix, Direction::Increasing)?;
    let need = g.op(g.inverse(p), a);
    let mut out = prefix.clone();
    out.push(last, g.signed_apply(last, need));
    Ok(out)
}

/// Tuple from `len` signs and the first `len - 1` elements.
pub fn fix_a_from_choices(
    g: &GroupSpec,
    a: GroupElement,
    signs: &[Sign],
    prefix: &[GroupElement],
) -> Result<SignedTuple> {
    if signs.is_empty() || prefix.len() + 1 != signs.len() {
        return Err(Error::Config("need len signs and len - 1 elements".into()));
    }
    let head = SignedTuple::from_signs(signs.iter().copied().zip(prefix.iter().copied()));
    complete_to(g, &head, signs[signs.len() - 1], a)
}

/// Uniform element of `Fix(a)` of length `k2`.
pub fn sample_fix_a<R: Rng + ?Sized>(
    g: &GroupSpec,
    a: GroupElement,
    k2: usize,
    rng: &mut R,
) -> Result<SignedTuple> {
    if k2 < 2 {
        return Err(Error::Config("k2 must be at least 2".into()));
    }
    let signs: Vec<Sign> = (0..k2).map(|_| Sign::random(rng)).collect();
    let prefix: Vec<GroupElement> = (0..k2 - 1).map(|_| g.sample_uniform(rng)).collect();
    fix_a_from_choices(g, a, &signs, &prefix)
}

/// Choices for the left/right composition draw: a middle value `z`, then a
/// left half summing to `a - z` and a right half summing to `z`.
#[derive(Clone, Debug)]
pub struct SplitChoices {
    pub z: GroupElement,
    pub left_signs: Vec<Sign>,
    pub left_prefix: Vec<GroupElement>,
    pub right_signs: Vec<Sign>,
    pub right_prefix: Vec<GroupElement>,
}

/// Left half summing to `a z^-1` followed by a right half summing to `z`.
pub fn fix_a_split_from_choices(
    g: &GroupSpec,
    a: GroupElement,
    c: &SplitChoices,
) -> Result<SignedTuple> {
    let left_target = g.op(a, g.inverse(c.z));
    let mut out = fix_a_from_choices(g, left_target, &c.left_signs, &c.left_prefix)?;
    let right = fix_a_from_choices(g, c.z, &c.right_signs, &c.right_prefix)?;
    out.entries.extend(right.entries);
    Ok(out)
}

/// The composition draw with halves of length `k2 / 2`.
pub fn sample_fix_a_split<R: Rng + ?Sized>(
    g: &GroupSpec,
    a: GroupElement,
    k2: usize,
    rng: &mut R,
) -> Result<SignedTuple> {
    if k2 < 2 || k2 % 2 == 1 {
        return Err(Error::Config("k2 must be even and at least 2".into()));
    }
    let k = k2 / 2;
    let z = g.sample_uniform(rng);
    let half = |rng: &mut R| {
        let s: Vec<Sign> = (0..k).map(|_| Sign::random(rng)).collect();
        let p: Vec<GroupElement> = (0..k - 1).map(|_| g.sample_uniform(rng)).collect();
        (s, p)
    };
    let (left_signs, left_prefix) = half(rng);
    let (right_signs, right_prefix) = half(rng);
    fix_a_split_from_choices(
        g,
        a,
        &SplitChoices {
            z,
            left_signs,
            left_prefix,
            right_signs,
            right_prefix,
        },
    )
}
