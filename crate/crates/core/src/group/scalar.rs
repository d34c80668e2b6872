use super::{linalg, GroupElement, GroupError, GroupSpec};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen::<bool>() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn all() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }
}

/// Nonzero field scalar in `[1, p-1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coefficient(u64);

impl Coefficient {
    pub fn new(value: u64, p: u64) -> Result<Self, GroupError> {
        if value == 0 || value >= p {
            return Err(GroupError::InvalidCoefficient(value, p.saturating_sub(1)));
        }
        Ok(Coefficient(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Uniform over `[1, p-1]`. Consumes no randomness when `p = 2`.
    pub fn random<R: Rng + ?Sized>(p: u64, rng: &mut R) -> Self {
        if p == 2 {
            Coefficient(1)
        } else {
            Coefficient(rng.gen_range(1..p))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scalar {
    Sign(Sign),
    Coeff(Coefficient),
}

impl From<Sign> for Scalar {
    fn from(s: Sign) -> Self {
        Scalar::Sign(s)
    }
}

impl From<Coefficient> for Scalar {
    fn from(c: Coefficient) -> Self {
        Scalar::Coeff(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Ordered `(scalar, element)` pairs. Order matters in non-abelian groups.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedTuple {
    pub entries: Vec<(Scalar, GroupElement)>,
}

impl SignedTuple {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_signs(entries: impl IntoIterator<Item = (Sign, GroupElement)>) -> Self {
        SignedTuple {
            entries: entries
                .into_iter()
                .map(|(s, x)| (Scalar::Sign(s), x))
                .collect(),
        }
    }

    pub fn push(&mut self, s: impl Into<Scalar>, x: GroupElement) {
        self.entries.push((s.into(), x));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl GroupSpec {
    pub fn signed_apply(&self, s: Sign, a: GroupElement) -> GroupElement {
        match s {
            Sign::Plus => a,
            Sign::Minus => self.inverse(a),
        }
    }

    /// Componentwise multiplication by `c` in `F_p^n`.
    pub fn coefficient_apply(
        &self,
        c: Coefficient,
        a: GroupElement,
    ) -> Result<GroupElement, GroupError> {
        let (p, n) = self.require_vector_space()?;
        if c.0 >= p {
            return Err(GroupError::InvalidCoefficient(c.0, p - 1));
        }
        Ok(self.scale_unchecked(c.0, a, p, n))
    }

    #[inline]
    pub(crate) fn scale_unchecked(&self, c: u64, a: GroupElement, p: u64, n: u32) -> GroupElement {
        if c == 1 {
            a
        } else {
            GroupElement::from_bits(linalg::digit_scale(a.bits(), c, p, n))
        }
    }

    pub fn scalar_apply(&self, s: Scalar, a: GroupElement) -> Result<GroupElement, GroupError> {
        match s {
            Scalar::Sign(s) => Ok(self.signed_apply(s, a)),
            Scalar::Coeff(c) => self.coefficient_apply(c, a),
        }
    }

    /// Folds the scalar actions over `t` in the given index order.
    pub fn signed_sum(
        &self,
        t: &SignedTuple,
        direction: Direction,
    ) -> Result<GroupElement, GroupError> {
        let mut acc = self.identity();
        let mut step = |entry: &(Scalar, GroupElement)| -> Result<(), GroupError> {
            acc = self.op(acc, self.scalar_apply(entry.0, entry.1)?);
            Ok(())
        };
        match direction {
            Direction::Increasing => t.entries.iter().try_for_each(&mut step)?,
            Direction::Decreasing => t.entries.iter().rev().try_for_each(&mut step)?,
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negation_and_identity() {
        let z5 = GroupSpec::cyclic(5).unwrap();
        let two = z5.residue(2).unwrap();
        assert_eq!(z5.signed_apply(Sign::Plus, two), two);
        assert_eq!(z5.signed_apply(Sign::Minus, two), z5.residue(3).unwrap());
        assert_eq!(z5.signed_apply(Sign::Minus, z5.identity()), z5.identity());
    }

    #[test]
    fn cyclic_signed_sum() {
        let z5 = GroupSpec::cyclic(5).unwrap();
        let r = |v| z5.residue(v).unwrap();
        let t =
            SignedTuple::from_signs([(Sign::Plus, r(2)), (Sign::Minus, r(4)), (Sign::Plus, r(1))]);
        assert_eq!(z5.signed_sum(&t, Direction::Increasing).unwrap(), r(4));
        assert_eq!(
            z5.signed_sum(&SignedTuple::new(), Direction::Decreasing)
                .unwrap(),
            z5.identity()
        );
    }

    #[test]
    fn direction_matters_in_s3() {
        let s3 = GroupSpec::symmetric(3).unwrap();
        let a = s3.permutation(&[1, 0, 2]).unwrap();
        let c = s3.permutation(&[1, 2, 0]).unwrap();
        let t = SignedTuple::from_signs([(Sign::Plus, a), (Sign::Minus, c)]);
        let inc = s3.signed_sum(&t, Direction::Increasing).unwrap();
        let dec = s3.signed_sum(&t, Direction::Decreasing).unwrap();
        // a then c^{-1} = [2,0,1]: 0->1->0, 1->0->2, 2->2->1
        assert_eq!(s3.permutation_word(inc).unwrap(), vec![0, 2, 1]);
        assert_eq!(s3.permutation_word(dec).unwrap(), vec![2, 1, 0]);
        assert_ne!(inc, dec);
    }

    #[test]
    fn coefficient_action() {
        let f3 = GroupSpec::vector_space(3, 3).unwrap();
        let v = f3.vector(&[1, 2, 0]).unwrap();
        let two = Coefficient::new(2, 3).unwrap();
        assert_eq!(
            f3.digits(f3.coefficient_apply(two, v).unwrap()).unwrap(),
            vec![2, 1, 0]
        );
        assert_eq!(
            f3.coefficient_apply(Coefficient::new(1, 3).unwrap(), v)
                .unwrap(),
            v
        );
        let f5 = GroupSpec::vector_space(5, 2).unwrap();
        let w = f5.vector(&[1, 1]).unwrap();
        let four = Coefficient::new(4, 5).unwrap();
        assert_eq!(
            f5.digits(f5.coefficient_apply(four, w).unwrap()).unwrap(),
            vec![4, 4]
        );
        assert!(Coefficient::new(0, 5).is_err());
        assert!(Coefficient::new(5, 5).is_err());
        let z5 = GroupSpec::cyclic(5).unwrap();
        assert!(z5.coefficient_apply(four, z5.identity()).is_err());
        let mut t = SignedTuple::new();
        t.push(four, z5.identity());
        assert!(z5.signed_sum(&t, Direction::Increasing).is_err());
    }
}
