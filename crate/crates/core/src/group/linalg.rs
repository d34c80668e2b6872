//! Linear algebra over `F_p` on packed digit vectors.

use super::{bits_for, field_mask, GroupElement, GroupError, GroupSpec};

#[inline]
fn w_of(p: u64) -> u32 {
    bits_for(p - 1)
}

#[inline]
pub fn digit(x: u64, i: u32, p: u64) -> u64 {
    let w = w_of(p);
    (x >> (i * w)) & field_mask(w)
}

pub(crate) fn digit_add(a: u64, b: u64, p: u64, n: u32) -> u64 {
    let w = w_of(p);
    let m = field_mask(w);
    let mut out = 0;
    for i in 0..n {
        let s = ((a >> (i * w)) & m) + ((b >> (i * w)) & m);
        out |= (if s >= p { s - p } else { s }) << (i * w);
    }
    out
}

pub(crate) fn digit_neg(a: u64, p: u64, n: u32) -> u64 {
    let w = w_of(p);
    let m = field_mask(w);
    let mut out = 0;
    for i in 0..n {
        let d = (a >> (i * w)) & m;
        out |= ((p - d) % p) << (i * w);
    }
    out
}

pub(crate) fn digit_scale(a: u64, c: u64, p: u64, n: u32) -> u64 {
    if p == 2 {
        return if c % 2 == 1 { a } else { 0 };
    }
    let w = w_of(p);
    let m = field_mask(w);
    let mut out = 0;
    for i in 0..n {
        let d = (a >> (i * w)) & m;
        out |= ((d * c) % p) << (i * w);
    }
    out
}

/// `a - c*b` digitwise.
#[inline]
fn axpy_neg(a: u64, c: u64, b: u64, p: u64, n: u32) -> u64 {
    if p == 2 {
        if c & 1 == 1 {
            a ^ b
        } else {
            a
        }
    } else {
        digit_add(a, digit_scale(b, p - c % p, p, n), p, n)
    }
}

pub fn field_inverse(d: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (d % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn top_digit(x: u64, p: u64, n: u32) -> Option<u32> {
    (0..n).rev().find(|&i| digit(x, i, p) != 0)
}

/// Row-reduced echelon basis of a subspace of `F_p^n`.
///
/// Each row's pivot is its highest nonzero digit, normalized to 1 and zero in
/// every other row. Rows are kept sorted by pivot, so
/// [`span_element`](Self::span_element) enumerates the span in canonical order.
#[derive(Clone, Debug)]
pub struct VectorBasis {
    p: u64,
    n: u32,
    rows: Vec<u64>,
    pivots: Vec<u32>,
}

impl VectorBasis {
    pub fn new(g: &GroupSpec) -> Result<Self, GroupError> {
        let (p, n) = g.require_vector_space()?;
        Ok(VectorBasis {
            p,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n as usize
    }

    pub fn rows(&self) -> impl Iterator<Item = (u32, GroupElement)> + '_ {
        self.pivots
            .iter()
            .copied()
            .zip(self.rows.iter().map(|r| GroupElement::from_bits(*r)))
    }

    pub fn reduce(&self, x: GroupElement) -> GroupElement {
        let mut v = x.bits();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = digit(v, piv, self.p);
            if c != 0 {
                v = axpy_neg(v, c, *row, self.p, self.n);
            }
        }
        GroupElement::from_bits(v)
    }

    pub fn contains(&self, x: GroupElement) -> bool {
        self.reduce(x).bits() == 0
    }

    /// Adds `x` to the spanning set; returns whether the rank grew.
    pub fn insert(&mut self, x: GroupElement) -> bool {
        let v = self.reduce(x).bits();
        let Some(q) = top_digit(v, self.p, self.n) else {
            return false;
        };
        let v = digit_scale(
            v,
            field_inverse(digit(v, q, self.p), self.p),
            self.p,
            self.n,
        );
        for row in self.rows.iter_mut() {
            let c = digit(*row, q, self.p);
            if c != 0 {
                *row = axpy_neg(*row, c, v, self.p, self.n);
            }
        }
        let pos = self.pivots.partition_point(|&pv| pv < q);
        self.pivots.insert(pos, q);
        self.rows.insert(pos, v);
        true
    }

    pub fn span_size(&self) -> u128 {
        (self.p as u128).pow(self.rank() as u32)
    }

    /// The `idx`-th element of the span in canonical order, `idx < p^rank`.
    pub fn span_element(&self, mut idx: u128) -> GroupElement {
        let mut v = 0u64;
        for row in &self.rows {
            let c = (idx % self.p as u128) as u64;
            idx /= self.p as u128;
            if c != 0 {
                v = axpy_neg(v, self.p - c, *row, self.p, self.n);
            }
        }
        GroupElement::from_bits(v)
    }
}

/// Rank of a list of vectors.
pub fn rank(g: &GroupSpec, xs: &[GroupElement]) -> Result<usize, GroupError> {
    let mut b = VectorBasis::new(g)?;
    for x in xs {
        b.insert(*x);
    }
    Ok(b.rank())
}

/// Outcome of fitting a linear map `F_p^n -> H` to sample pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearFit {
    /// Samples span `F_p^n` and determine a unique homomorphism.
    Unique(LinearMap),
    /// Samples are consistent but do not span the domain.
    Underdetermined,
    /// No homomorphism agrees with the samples.
    Inconsistent,
}

/// A homomorphism out of `F_p^n`, stored as images of the RREF basis rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    p: u64,
    n: u32,
    pivots: Vec<u32>,
    images: Vec<GroupElement>,
    codomain: GroupSpec,
}

impl LinearMap {
    /// Evaluates the map. For a full-rank basis, the coordinate on row `j` is
    /// simply the digit of `x` at that row's pivot.
    pub fn eval(&self, x: GroupElement) -> GroupElement {
        let mut acc = self.codomain.identity();
        for (&piv, img) in self.pivots.iter().zip(&self.images) {
            let c = digit(x.bits(), piv, self.p);
            if c != 0 {
                acc = self.codomain.op(acc, self.codomain.times(*img, c));
            }
        }
        acc
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }
}

/// Gaussian elimination that carries images in `h` along with the rows.
///
/// Reports [`LinearFit::Inconsistent`] when some image is not `p`-torsion, when
/// two images fail to commute, or when a dependent sample's image disagrees
/// with the one forced by earlier samples.
pub fn fit_linear(
    g: &GroupSpec,
    h: &GroupSpec,
    samples: &[(GroupElement, GroupElement)],
) -> Result<LinearFit, GroupError> {
    let (p, n) = g.require_vector_space()?;
    let e = h.identity();
    for (i, (_, yi)) in samples.iter().enumerate() {
        if h.times(*yi, p) != e {
            return Ok(LinearFit::Inconsistent);
        }
        if !h.is_abelian() {
            for (_, yj) in &samples[..i] {
                if h.op(*yi, *yj) != h.op(*yj, *yi) {
                    return Ok(LinearFit::Inconsistent);
                }
            }
        }
    }
    let mut rows: Vec<u64> = Vec::new();
    let mut pivots: Vec<u32> = Vec::new();
    let mut images: Vec<GroupElement> = Vec::new();
    for &(x, y) in samples {
        let (mut v, mut img) = (x.bits(), y);
        for ((row, &piv), rimg) in rows.iter().zip(&pivots).zip(&images) {
            let c = digit(v, piv, p);
            if c != 0 {
                v = axpy_neg(v, c, *row, p, n);
                img = h.op(img, h.inverse(h.times(*rimg, c)));
            }
        }
        let Some(q) = top_digit(v, p, n) else {
            if img != e {
                return Ok(LinearFit::Inconsistent);
            }
            continue;
        };
        let inv = field_inverse(digit(v, q, p), p);
        let v = digit_scale(v, inv, p, n);
        let img = h.times(img, inv);
        for (row, rimg) in rows.iter_mut().zip(images.iter_mut()) {
            let c = digit(*row, q, p);
            if c != 0 {
                *row = axpy_neg(*row, c, v, p, n);
                *rimg = h.op(*rimg, h.inverse(h.times(img, c)));
            }
        }
        let pos = pivots.partition_point(|&pv| pv < q);
        pivots.insert(pos, q);
        rows.insert(pos, v);
        images.insert(pos, img);
    }
    if rows.len() < n as usize {
        return Ok(LinearFit::Underdetermined);
    }
    Ok(LinearFit::Unique(LinearMap {
        p,
        n,
        pivots,
        images,
        codomain: h.clone(),
    }))
}
