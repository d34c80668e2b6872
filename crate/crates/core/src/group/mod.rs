//! Finite groups with packed canonical element encodings.
//!
//! Every element is a single `u64` whose layout depends on the group kind:
//!
//! * cyclic `Z_n`: the residue;
//! * vector space `F_p^n`: `n` digit fields of `bits(p-1)` bits, digit `i` at bit
//!   offset `i * width` (for `p = 2` this is the plain bit vector);
//! * symmetric `S_n`: the permutation word `w` (`w[i]` is the image of `i`), entry 0
//!   in the most significant field;
//! * dihedral `D_n`: the rotation in the low bits, the reflection flag above it;
//! * direct product: component encodings concatenated, first component highest.
//!
//! The layouts are chosen so that numeric order of encodings is the canonical
//! element order (and the order of [`GroupSpec::index_of`]). Elements carry no
//! reference to their group; operations take the [`GroupSpec`] explicitly.
//!
//! Non-abelian groups are written additively with `a + b` meaning "apply `a`,
//! then `b`".

mod closure;
pub mod linalg;
mod scalar;
mod text;

pub use closure::{
    estimate_e, exact_e, expected_generation_count_vector_space, generated_subgroup, generates,
    greedy_generating_sequence, partial_sums, partial_sums_cover, DBeta, GenerationTracker,
    GeneratorStats, DEFAULT_PARTIAL_SUMS_CAP_LOG2, DEFAULT_SUBGROUP_CAP,
};
pub use scalar::{Coefficient, Direction, Scalar, Sign, SignedTuple};

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element {0:#x} does not belong to {1}")]
    Foreign(u64, String),
    #[error("{0} is not a vector space over a prime field")]
    NotVectorSpace(String),
    #[error("invalid group parameters: {0}")]
    InvalidSpec(String),
    #[error("cannot parse `{0}`: {1}")]
    Parse(String, String),
    #[error("resource cap exceeded: {what} (limit {limit})")]
    ResourceCap { what: String, limit: u128 },
    #[error("coefficient {0} is outside [1, {1}]")]
    InvalidCoefficient(u64, u64),
}

/// Packed canonical encoding of a group element.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct GroupElement(u64);

impl GroupElement {
    /// Wraps a raw encoding. Use [`GroupSpec::contains`] to validate foreign input.
    pub const fn from_bits(bits: u64) -> Self {
        GroupElement(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Cyclic(u64),
    VectorSpace { p: u64, n: u32 },
    Symmetric(u32),
    Dihedral(u64),
    Product(Vec<GroupSpec>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
    order: u128,
    abelian: bool,
    width: u32,
}

pub(crate) fn bits_for(max_value: u64) -> u32 {
    64 - max_value.leading_zeros()
}

#[inline]
pub(crate) fn field_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

const MAX_SYMMETRIC_DEGREE: u32 = 16;

impl GroupSpec {
    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidSpec("cyclic group of order 0".into()));
        }
        Ok(GroupSpec {
            kind: GroupKind::Cyclic(n),
            order: n as u128,
            abelian: true,
            width: bits_for(n - 1),
        })
    }

    pub fn vector_space(p: u64, n: u32) -> Result<Self, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::InvalidSpec(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(GroupError::InvalidSpec(
                "vector space of dimension 0".into(),
            ));
        }
        let width = n as u64 * bits_for(p - 1) as u64;
        if width > 64 {
            return Err(GroupError::InvalidSpec(format!(
                "F{p}^{n} does not pack into 64 bits"
            )));
        }
        let order = (p as u128)
            .checked_pow(n)
            .filter(|o| *o <= 1u128 << 64)
            .ok_or_else(|| GroupError::InvalidSpec(format!("F{p}^{n} is too large")))?;
        Ok(GroupSpec {
            kind: GroupKind::VectorSpace { p, n },
            order,
            abelian: true,
            width: width as u32,
        })
    }

    pub fn symmetric(n: u32) -> Result<Self, GroupError> {
        if n == 0 || n > MAX_SYMMETRIC_DEGREE {
            return Err(GroupError::InvalidSpec(format!(
                "symmetric degree must be in 1..={MAX_SYMMETRIC_DEGREE}"
            )));
        }
        let order = (1..=n as u128).product();
        Ok(GroupSpec {
            kind: GroupKind::Symmetric(n),
            order,
            abelian: n <= 2,
            width: n * bits_for(n as u64 - 1),
        })
    }

    /// Symmetries of a regular `n`-gon (order `2n`).
    pub fn dihedral(n: u64) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidSpec("dihedral group D0".into()));
        }
        let width = bits_for(n - 1) + 1;
        if width > 64 {
            return Err(GroupError::InvalidSpec(format!("D{n} is too large")));
        }
        Ok(GroupSpec {
            kind: GroupKind::Dihedral(n),
            order: 2 * n as u128,
            abelian: n <= 2,
            width,
        })
    }

    pub fn product(factors: Vec<GroupSpec>) -> Result<Self, GroupError> {
        if factors.len() < 2 {
            return Err(GroupError::InvalidSpec(
                "a direct product needs at least two factors".into(),
            ));
        }
        let width: u32 = factors.iter().map(|f| f.width).sum();
        if width > 64 {
            return Err(GroupError::InvalidSpec(
                "product does not pack into 64 bits".into(),
            ));
        }
        let mut order: u128 = 1;
        for f in &factors {
            order = order
                .checked_mul(f.order)
                .filter(|o| *o <= 1u128 << 64)
                .ok_or_else(|| GroupError::InvalidSpec("product is too large".into()))?;
        }
        let abelian = factors.iter().all(|f| f.abelian);
        Ok(GroupSpec {
            kind: GroupKind::Product(factors),
            order,
            abelian,
            width,
        })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    /// Bits used by the packed encoding.
    pub fn encoding_width(&self) -> u32 {
        self.width
    }

    /// `(p, n)` when this is `F_p^n`.
    pub fn as_vector_space(&self) -> Option<(u64, u32)> {
        match self.kind {
            GroupKind::VectorSpace { p, n } => Some((p, n)),
            _ => None,
        }
    }

    pub fn require_vector_space(&self) -> Result<(u64, u32), GroupError> {
        self.as_vector_space()
            .ok_or_else(|| GroupError::NotVectorSpace(self.to_string()))
    }

    /// Order as a `usize`, for groups small enough to materialize.
    pub fn small_order(&self, cap: u128) -> Result<usize, GroupError> {
        if self.order > cap {
            return Err(GroupError::ResourceCap {
                what: format!("materializing {self}"),
                limit: cap,
            });
        }
        Ok(self.order as usize)
    }

    fn product_shifts(factors: &[GroupSpec]) -> impl Iterator<Item = (&GroupSpec, u32)> {
        let mut remaining: u32 = factors.iter().map(|f| f.width).sum();
        factors.iter().map(move |f| {
            remaining -= f.width;
            (f, remaining)
        })
    }

    fn split(factors: &[GroupSpec], x: u64) -> impl Iterator<Item = (&GroupSpec, u64, u32)> {
        Self::product_shifts(factors).map(move |(f, shift)| {
            let v = if f.width == 0 {
                0
            } else {
                (x >> shift) & field_mask(f.width)
            };
            (f, v, shift)
        })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(self.identity_bits())
    }

    fn identity_bits(&self) -> u64 {
        match &self.kind {
            GroupKind::Symmetric(n) => pack_perm(&identity_word(*n), *n),
            GroupKind::Product(fs) => Self::product_shifts(fs)
                .map(|(f, shift)| shift_in(f.identity_bits(), shift))
                .fold(0, |a, b| a | b),
            _ => 0,
        }
    }

    pub fn contains(&self, x: GroupElement) -> bool {
        self.contains_bits(x.0)
    }

    fn contains_bits(&self, x: u64) -> bool {
        if self.width < 64 && x >> self.width != 0 {
            return false;
        }
        match &self.kind {
            GroupKind::Cyclic(n) => x < *n,
            GroupKind::VectorSpace { p, n } => {
                let w = bits_for(p - 1);
                (0..*n).all(|i| (x >> (i * w)) & field_mask(w) < *p)
            }
            GroupKind::Symmetric(n) => {
                let word = unpack_perm(x, *n);
                let mut seen = 0u32;
                for &v in &word[..*n as usize] {
                    if v as u32 >= *n || seen & (1 << v) != 0 {
                        return false;
                    }
                    seen |= 1 << v;
                }
                true
            }
            GroupKind::Dihedral(n) => x & field_mask(self.width - 1) < *n,
            GroupKind::Product(fs) => Self::split(fs, x).all(|(f, v, _)| f.contains_bits(v)),
        }
    }

    fn check(&self, x: GroupElement) -> Result<(), GroupError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GroupError::Foreign(x.0, self.to_string()))
        }
    }

    /// The group law; callers guarantee both operands belong to `self`.
    #[inline]
    pub fn op(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        GroupElement(self.op_bits(a.0, b.0))
    }

    /// [`op`](Self::op) with membership validation of both operands.
    pub fn checked_op(&self, a: GroupElement, b: GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.op(a, b))
    }

    fn op_bits(&self, a: u64, b: u64) -> u64 {
        match &self.kind {
            GroupKind::Cyclic(n) => {
                let s = a as u128 + b as u128;
                (s % *n as u128) as u64
            }
            GroupKind::VectorSpace { p, n } => {
                if *p == 2 {
                    a ^ b
                } else {
                    linalg::digit_add(a, b, *p, *n)
                }
            }
            GroupKind::Symmetric(n) => {
                let (wa, wb) = (unpack_perm(a, *n), unpack_perm(b, *n));
                let mut out = [0u8; MAX_SYMMETRIC_DEGREE as usize];
                for i in 0..*n as usize {
                    out[i] = wb[wa[i] as usize];
                }
                pack_perm(&out, *n)
            }
            GroupKind::Dihedral(n) => {
                let rw = self.width - 1;
                let (ra, sa) = (a & field_mask(rw), a >> rw);
                let (rb, sb) = (b & field_mask(rw), b >> rw);
                // x -> (-1)^s x + r; applying a then b.
                let moved = if sb == 1 { (n - ra) % n } else { ra };
                let r = ((moved as u128 + rb as u128) % *n as u128) as u64;
                r | ((sa ^ sb) << rw)
            }
            GroupKind::Product(fs) => {
                let mut out = 0;
                for ((f, va, shift), (_, vb, _)) in Self::split(fs, a).zip(Self::split(fs, b)) {
                    out |= shift_in(f.op_bits(va, vb), shift);
                }
                out
            }
        }
    }

    pub fn inverse(&self, a: GroupElement) -> GroupElement {
        GroupElement(self.inverse_bits(a.0))
    }

    fn inverse_bits(&self, a: u64) -> u64 {
        match &self.kind {
            GroupKind::Cyclic(n) => (n - a) % n,
            GroupKind::VectorSpace { p, n } => {
                if *p == 2 {
                    a
                } else {
                    linalg::digit_neg(a, *p, *n)
                }
            }
            GroupKind::Symmetric(n) => {
                let w = unpack_perm(a, *n);
                let mut inv = [0u8; MAX_SYMMETRIC_DEGREE as usize];
                for i in 0..*n as usize {
                    inv[w[i] as usize] = i as u8;
                }
                pack_perm(&inv, *n)
            }
            GroupKind::Dihedral(n) => {
                let rw = self.width - 1;
                if a >> rw == 1 {
                    a
                } else {
                    (n - a) % n
                }
            }
            GroupKind::Product(fs) => Self::split(fs, a)
                .map(|(f, v, shift)| shift_in(f.inverse_bits(v), shift))
                .fold(0, |x, y| x | y),
        }
    }

    /// `c`-fold sum `a + a + ... + a` (identity for `c = 0`).
    pub fn times(&self, a: GroupElement, mut c: u64) -> GroupElement {
        let mut acc = self.identity();
        let mut base = a;
        while c > 0 {
            if c & 1 == 1 {
                acc = self.op(acc, base);
            }
            base = self.op(base, base);
            c >>= 1;
        }
        acc
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        GroupElement(self.sample_bits(rng))
    }

    fn sample_bits<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.kind {
            GroupKind::Cyclic(n) => rng.gen_range(0..*n),
            GroupKind::VectorSpace { p, n } => {
                if *p == 2 {
                    rng.gen::<u64>() & field_mask(*n)
                } else {
                    let w = bits_for(p - 1);
                    (0..*n).fold(0, |acc, i| acc | (rng.gen_range(0..*p) << (i * w)))
                }
            }
            GroupKind::Symmetric(n) => {
                let mut word = identity_word(*n);
                for i in (1..*n as usize).rev() {
                    let j = rng.gen_range(0..=i);
                    word.swap(i, j);
                }
                pack_perm(&word, *n)
            }
            GroupKind::Dihedral(n) => {
                let r = rng.gen_range(0..*n);
                let s = rng.gen::<bool>() as u64;
                r | (s << (self.width - 1))
            }
            GroupKind::Product(fs) => {
                let mut out = 0;
                for (f, shift) in Self::product_shifts(fs) {
                    out |= shift_in(f.sample_bits(rng), shift);
                }
                out
            }
        }
    }

    /// Position of `x` in the canonical element order.
    pub fn index_of(&self, x: GroupElement) -> u64 {
        self.index_bits(x.0)
    }

    fn index_bits(&self, x: u64) -> u64 {
        match &self.kind {
            GroupKind::Cyclic(_) => x,
            GroupKind::VectorSpace { p, n } => {
                if *p == 2 {
                    x
                } else {
                    let w = bits_for(p - 1);
                    (0..*n)
                        .rev()
                        .fold(0, |acc, i| acc * p + ((x >> (i * w)) & field_mask(w)))
                }
            }
            GroupKind::Symmetric(n) => lehmer_rank(&unpack_perm(x, *n)[..*n as usize]),
            GroupKind::Dihedral(n) => {
                let rw = self.width - 1;
                (x >> rw) * n + (x & field_mask(rw))
            }
            GroupKind::Product(fs) => Self::split(fs, x).fold(0u64, |acc, (f, v, _)| {
                acc.wrapping_mul(f.order as u64)
                    .wrapping_add(f.index_bits(v))
            }),
        }
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn element_at(&self, index: u64) -> GroupElement {
        debug_assert!((index as u128) < self.order);
        GroupElement(self.unindex_bits(index))
    }

    fn unindex_bits(&self, mut index: u64) -> u64 {
        match &self.kind {
            GroupKind::Cyclic(_) => index,
            GroupKind::VectorSpace { p, n } => {
                if *p == 2 {
                    index
                } else {
                    let w = bits_for(p - 1);
                    let mut out = 0;
                    for i in 0..*n {
                        out |= (index % p) << (i * w);
                        index /= p;
                    }
                    out
                }
            }
            GroupKind::Symmetric(n) => pack_perm(&lehmer_unrank(index, *n), *n),
            GroupKind::Dihedral(n) => {
                let rw = self.width - 1;
                (index % n) | ((index / n) << rw)
            }
            GroupKind::Product(fs) => {
                let mut out = 0;
                for (f, shift) in Self::product_shifts(fs)
                    .collect::<Vec<_>>()
                    .into_iter()
                    .rev()
                {
                    let o = f.order as u64;
                    let (digit, rest) = if o == 0 {
                        (index, 0)
                    } else {
                        (index % o, index / o)
                    };
                    out |= shift_in(f.unindex_bits(digit), shift);
                    index = rest;
                }
                out
            }
        }
    }

    /// All elements in canonical order.
    pub fn elements(&self, cap: u128) -> Result<Vec<GroupElement>, GroupError> {
        let n = self.small_order(cap)?;
        Ok((0..n as u64).map(|i| self.element_at(i)).collect())
    }

    // -- kind-specific constructors ---------------------------------------

    pub fn residue(&self, r: u64) -> Result<GroupElement, GroupError> {
        match self.kind {
            GroupKind::Cyclic(n) if r < n => Ok(GroupElement(r)),
            _ => Err(GroupError::Foreign(r, self.to_string())),
        }
    }

    pub fn vector(&self, digits: &[u64]) -> Result<GroupElement, GroupError> {
        let (p, n) = self.require_vector_space()?;
        if digits.len() != n as usize || digits.iter().any(|d| *d >= p) {
            return Err(GroupError::InvalidSpec(format!(
                "digit vector {digits:?} is not in {self}"
            )));
        }
        let w = bits_for(p - 1);
        Ok(GroupElement(
            digits
                .iter()
                .enumerate()
                .fold(0, |acc, (i, d)| acc | (d << (i as u32 * w))),
        ))
    }

    pub fn digits(&self, x: GroupElement) -> Result<Vec<u64>, GroupError> {
        let (p, n) = self.require_vector_space()?;
        let w = bits_for(p - 1);
        Ok((0..n).map(|i| (x.0 >> (i * w)) & field_mask(w)).collect())
    }

    pub fn permutation(&self, word: &[u32]) -> Result<GroupElement, GroupError> {
        let GroupKind::Symmetric(n) = self.kind else {
            return Err(GroupError::InvalidSpec(format!("{self} is not symmetric")));
        };
        if word.len() != n as usize {
            return Err(GroupError::InvalidSpec(format!(
                "word {word:?} has wrong length"
            )));
        }
        let mut buf = [0u8; MAX_SYMMETRIC_DEGREE as usize];
        for (i, &w) in word.iter().enumerate() {
            buf[i] = w as u8;
        }
        let x = GroupElement(pack_perm(&buf, n));
        self.check(x)?;
        Ok(x)
    }

    pub fn permutation_word(&self, x: GroupElement) -> Option<Vec<u32>> {
        match self.kind {
            GroupKind::Symmetric(n) => Some(
                unpack_perm(x.0, n)[..n as usize]
                    .iter()
                    .map(|v| *v as u32)
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn dihedral_element(
        &self,
        rotation: u64,
        reflection: bool,
    ) -> Result<GroupElement, GroupError> {
        match self.kind {
            GroupKind::Dihedral(n) if rotation < n => Ok(GroupElement(
                rotation | ((reflection as u64) << (self.width - 1)),
            )),
            _ => Err(GroupError::InvalidSpec(format!(
                "({rotation}, {reflection}) not in {self}"
            ))),
        }
    }

    pub fn tuple(&self, parts: &[GroupElement]) -> Result<GroupElement, GroupError> {
        let GroupKind::Product(fs) = &self.kind else {
            return Err(GroupError::InvalidSpec(format!("{self} is not a product")));
        };
        if parts.len() != fs.len() {
            return Err(GroupError::InvalidSpec("wrong number of components".into()));
        }
        let mut out = 0;
        for ((f, shift), part) in Self::product_shifts(fs).zip(parts) {
            f.check(*part)?;
            out |= shift_in(part.0, shift);
        }
        Ok(GroupElement(out))
    }

    pub fn components(&self, x: GroupElement) -> Option<Vec<GroupElement>> {
        match &self.kind {
            GroupKind::Product(fs) => Some(
                Self::split(fs, x.0)
                    .map(|(_, v, _)| GroupElement(v))
                    .collect(),
            ),
            _ => None,
        }
    }
}

#[inline]
fn shift_in(v: u64, shift: u32) -> u64 {
    if shift >= 64 {
        0
    } else {
        v << shift
    }
}

fn identity_word(n: u32) -> [u8; MAX_SYMMETRIC_DEGREE as usize] {
    let mut w = [0u8; MAX_SYMMETRIC_DEGREE as usize];
    for (i, v) in w.iter_mut().enumerate().take(n as usize) {
        *v = i as u8;
    }
    w
}

#[inline]
fn perm_field(n: u32) -> u32 {
    bits_for(n as u64 - 1)
}

fn pack_perm(word: &[u8], n: u32) -> u64 {
    let w = perm_field(n);
    (0..n as usize).fold(0, |acc, i| {
        acc | shift_in(word[i] as u64, (n - 1 - i as u32) * w)
    })
}

fn unpack_perm(x: u64, n: u32) -> [u8; MAX_SYMMETRIC_DEGREE as usize] {
    let w = perm_field(n);
    let mut out = [0u8; MAX_SYMMETRIC_DEGREE as usize];
    if w == 0 {
        return out;
    }
    for (i, v) in out.iter_mut().enumerate().take(n as usize) {
        *v = ((x >> ((n - 1 - i as u32) * w)) & field_mask(w)) as u8;
    }
    out
}

fn lehmer_rank(word: &[u8]) -> u64 {
    let n = word.len();
    let mut rank = 0u64;
    let mut used = 0u32;
    for (i, &v) in word.iter().enumerate() {
        let smaller_unused = (0..v).filter(|j| used & (1 << j) == 0).count() as u64;
        rank = rank * (n - i) as u64 + smaller_unused;
        used |= 1 << v;
    }
    rank
}

fn lehmer_unrank(mut rank: u64, n: u32) -> [u8; MAX_SYMMETRIC_DEGREE as usize] {
    let n = n as usize;
    let mut digits = [0u64; MAX_SYMMETRIC_DEGREE as usize];
    for i in (0..n).rev() {
        let base = (n - i) as u64;
        digits[i] = rank % base;
        rank /= base;
    }
    let mut pool: Vec<u8> = (0..n as u8).collect();
    let mut out = [0u8; MAX_SYMMETRIC_DEGREE as usize];
    for i in 0..n {
        out[i] = pool.remove(digits[i] as usize);
    }
    out
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::Cyclic(n) => write!(f, "Z{n}"),
            GroupKind::VectorSpace { p, n } => write!(f, "F{p}^{n}"),
            GroupKind::Symmetric(n) => write!(f, "S{n}"),
            GroupKind::Dihedral(n) => write!(f, "D{n}"),
            GroupKind::Product(fs) => {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("x")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
        }
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
