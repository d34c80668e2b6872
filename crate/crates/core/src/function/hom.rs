use crate::group::linalg::{self, LinearFit};
use crate::group::{greedy_generating_sequence, GroupElement, GroupKind, GroupSpec};
use crate::{Error, Result};
use rand::Rng;
use std::ops::ControlFlow;

use super::DENSE_CAP;

/// Linear maps on domains up to this order carry a lookup table; larger
/// ones evaluate from coordinates.
const EAGER_TABLE_CAP: u128 = 1 << 12;

pub const ENUMERATION_CAP: u128 = 1_000_000;

/// A homomorphism `G -> H`, determined by the images of a generating sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    domain: GroupSpec,
    codomain: GroupSpec,
    generators: Vec<GroupElement>,
    images: Vec<GroupElement>,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// Values indexed by canonical domain index.
    Table(Vec<GroupElement>),
    /// Domain is `F_p^n`; generators are the unit vectors.
    Coordinates { p: u64 },
}

/// Result of trying to extend sampled values to a homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fit {
    Unique(Homomorphism),
    /// The samples do not generate the domain.
    Underdetermined,
    /// No homomorphism agrees with the samples.
    Inconsistent,
}

impl Homomorphism {
    pub fn domain(&self) -> &GroupSpec {
        &self.domain
    }

    pub fn codomain(&self) -> &GroupSpec {
        &self.codomain
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn zero(g: &GroupSpec, h: &GroupSpec) -> Result<Self> {
        let gens = greedy_generating_sequence(g, DENSE_CAP)?;
        let images = vec![h.identity(); gens.len()];
        Self::from_generator_images(g, h, &gens, &images)
    }

    #[inline]
    pub fn eval(&self, x: GroupElement) -> GroupElement {
        match &self.repr {
            Repr::Table(t) => t[self.domain.index_of(x) as usize],
            Repr::Coordinates { p } => {
                let h = &self.codomain;
                let mut acc = h.identity();
                if *p == 2 {
                    let mut bits = x.bits();
                    while bits != 0 {
                        let i = bits.trailing_zeros() as usize;
                        acc = h.op(acc, self.images[i]);
                        bits &= bits - 1;
                    }
                } else {
                    for (i, img) in self.images.iter().enumerate() {
                        let c = linalg::digit(x.bits(), i as u32, *p);
                        if c != 0 {
                            acc = h.op(acc, h.times(*img, c));
                        }
                    }
                }
                acc
            }
        }
    }

    /// Values in canonical domain order.
    pub fn table(&self) -> Result<Vec<GroupElement>> {
        match &self.repr {
            Repr::Table(t) => Ok(t.clone()),
            Repr::Coordinates { p } => {
                let n = self.domain.small_order(DENSE_CAP)?;
                Ok(coordinate_table(&self.codomain, *p, &self.images, n))
            }
        }
    }

    /// Builds the homomorphism sending `gens[i]` to `images[i]`, or fails if
    /// none exists or `gens` does not generate `g`.
    pub fn from_generator_images(
        g: &GroupSpec,
        h: &GroupSpec,
        gens: &[GroupElement],
        images: &[GroupElement],
    ) -> Result<Self> {
        let pairs: Vec<_> = gens.iter().copied().zip(images.iter().copied()).collect();
        match fit(g, h, &pairs)? {
            Fit::Unique(hom) => Ok(hom),
            Fit::Underdetermined => Err(Error::Domain(
                "generators do not generate the domain".into(),
            )),
            Fit::Inconsistent => Err(Error::Domain("no homomorphism has these images".into())),
        }
    }

    /// Homomorphism out of `F_p^n` with the given unit-vector images.
    ///
    /// Requires every image to be `p`-torsion and the images to commute.
    pub fn from_unit_images(
        g: &GroupSpec,
        h: &GroupSpec,
        images: Vec<GroupElement>,
    ) -> Result<Self> {
        let (p, n) = g.require_vector_space()?;
        if images.len() != n as usize {
            return Err(Error::Domain("need one image per unit vector".into()));
        }
        if !valid_unit_images(h, p, &images) {
            return Err(Error::Domain(
                "unit-vector images do not define a homomorphism".into(),
            ));
        }
        let generators = (0..n).map(|i| g.element_at(p.pow(i))).collect();
        let repr = if g.order() <= EAGER_TABLE_CAP {
            Repr::Table(coordinate_table(h, p, &images, g.order() as usize))
        } else {
            Repr::Coordinates { p }
        };
        Ok(Homomorphism {
            domain: g.clone(),
            codomain: h.clone(),
            generators,
            images,
            repr,
        })
    }

    /// Uniform random homomorphism `F_p^n -> H` for abelian `H`: unit images
    /// drawn independently from the `p`-torsion subgroup `H[p]`.
    pub fn random_linear<R: Rng + ?Sized>(
        g: &GroupSpec,
        h: &GroupSpec,
        rng: &mut R,
    ) -> Result<Self> {
        let (p, n) = g.require_vector_space()?;
        if !h.is_abelian() {
            return Err(Error::Unsupported(
                "random linear maps into non-abelian codomains".into(),
            ));
        }
        let images = match h.as_vector_space() {
            Some((q, _)) if q == p => (0..n).map(|_| h.sample_uniform(rng)).collect(),
            _ => {
                let torsion = torsion_subgroup(h, p)?;
                (0..n)
                    .map(|_| torsion[rng.gen_range(0..torsion.len())])
                    .collect()
            }
        };
        Self::from_unit_images(g, h, images)
    }

    /// Exhaustive check of `h(a+b) = h(a) + h(b)` over all pairs.
    pub fn verify_exhaustive(&self) -> Result<bool> {
        let t = self.table()?;
        let g = &self.domain;
        let els = g.elements(DENSE_CAP)?;
        Ok(els.iter().all(|a| {
            els.iter().all(|b| {
                t[g.index_of(g.op(*a, *b)) as usize]
                    == self
                        .codomain
                        .op(t[g.index_of(*a) as usize], t[g.index_of(*b) as usize])
            })
        }))
    }

    /// Spot check of the homomorphism law on random pairs.
    pub fn verify_sampled<R: Rng + ?Sized>(&self, pairs: usize, rng: &mut R) -> bool {
        let g = &self.domain;
        (0..pairs).all(|_| {
            let (a, b) = (g.sample_uniform(rng), g.sample_uniform(rng));
            self.eval(g.op(a, b)) == self.codomain.op(self.eval(a), self.eval(b))
        })
    }
}

fn valid_unit_images(h: &GroupSpec, p: u64, images: &[GroupElement]) -> bool {
    let e = h.identity();
    images.iter().enumerate().all(|(i, a)| {
        h.times(*a, p) == e
            && (h.is_abelian() || images[..i].iter().all(|b| h.op(*a, *b) == h.op(*b, *a)))
    })
}

/// `H[p] = { y : p*y = e }` in canonical order.
pub fn torsion_subgroup(h: &GroupSpec, p: u64) -> Result<Vec<GroupElement>> {
    let e = h.identity();
    Ok(h.elements(DENSE_CAP)?
        .into_iter()
        .filter(|y| h.times(*y, p) == e)
        .collect())
}

fn coordinate_table(
    h: &GroupSpec,
    p: u64,
    images: &[GroupElement],
    order: usize,
) -> Vec<GroupElement> {
    let mut t = vec![h.identity(); order];
    // index i = (i - p^j) + e_j where j is the lowest nonzero base-p digit
    for i in 1..order {
        let (mut j, mut pw, mut rest) = (0usize, 1usize, i);
        while rest % p as usize == 0 {
            rest /= p as usize;
            j += 1;
            pw *= p as usize;
        }
        t[i] = h.op(t[i - pw], images[j]);
    }
    t
}

/// Extends sampled `(x, f(x))` pairs to a homomorphism on the whole domain.
///
/// Vector-space domains use Gaussian elimination over `F_p`; other domains
/// use a breadth-first walk of the Cayley graph on the sample points, checking
/// every edge for consistency.
pub fn fit(g: &GroupSpec, h: &GroupSpec, samples: &[(GroupElement, GroupElement)]) -> Result<Fit> {
    if let GroupKind::VectorSpace { p, n } = *g.kind() {
        return Ok(match linalg::fit_linear(g, h, samples)? {
            LinearFit::Inconsistent => Fit::Inconsistent,
            LinearFit::Underdetermined => Fit::Underdetermined,
            LinearFit::Unique(map) => {
                let images = (0..n).map(|i| map.eval(g.element_at(p.pow(i)))).collect();
                Fit::Unique(Homomorphism::from_unit_images(g, h, images)?)
            }
        });
    }
    let order = g.small_order(DENSE_CAP)?;
    let mut table: Vec<Option<GroupElement>> = vec![None; order];
    table[0] = Some(h.identity());
    let mut queue = vec![g.identity()];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let fx = table[g.index_of(x) as usize].expect("visited");
        for &(s, fs) in samples {
            let y = g.op(x, s);
            let want = h.op(fx, fs);
            let slot = &mut table[g.index_of(y) as usize];
            match slot {
                Some(v) if *v != want => return Ok(Fit::Inconsistent),
                Some(_) => {}
                None => {
                    *slot = Some(want);
                    queue.push(y);
                }
            }
        }
    }
    if queue.len() < order {
        return Ok(Fit::Underdetermined);
    }
    let table: Vec<GroupElement> = table.into_iter().map(|v| v.expect("total")).collect();
    let generators = greedy_generating_sequence(g, DENSE_CAP)?;
    let images = generators
        .iter()
        .map(|x| table[g.index_of(*x) as usize])
        .collect();
    Ok(Fit::Unique(Homomorphism {
        domain: g.clone(),
        codomain: h.clone(),
        generators,
        images,
        repr: Repr::Table(table),
    }))
}

/// Visits every homomorphism `G -> H` in enumeration order: assignments to the
/// greedy generating sequence, first generator most significant, codomain
/// candidates in canonical order.
///
/// The number of candidate assignments must not exceed [`ENUMERATION_CAP`].
/// For vector-space domains the candidates are restricted to `H[p]`, which
/// contains every possible unit-vector image.
pub fn for_each_homomorphism<F>(g: &GroupSpec, h: &GroupSpec, mut visit: F) -> Result<()>
where
    F: FnMut(&Homomorphism) -> ControlFlow<()>,
{
    let gens = greedy_generating_sequence(g, DENSE_CAP)?;
    let candidates = match g.as_vector_space() {
        Some((p, _)) => torsion_subgroup(h, p)?,
        None => h.elements(DENSE_CAP)?,
    };
    let total = (candidates.len() as u128).checked_pow(gens.len() as u32);
    if total.map_or(true, |t| t > ENUMERATION_CAP) {
        return Err(Error::ResourceCap(format!(
            "enumerating HOM({g}, {h}) needs {}^{} candidates",
            candidates.len(),
            gens.len()
        )));
    }
    let d = gens.len();
    let mut digits = vec![0usize; d];
    loop {
        let images: Vec<GroupElement> = digits.iter().map(|i| candidates[*i]).collect();
        let hom = match g.as_vector_space() {
            Some((p, _)) => {
                if valid_unit_images(h, p, &images) {
                    Some(Homomorphism::from_unit_images(g, h, images)?)
                } else {
                    None
                }
            }
            None => {
                let pairs: Vec<_> = gens.iter().copied().zip(images).collect();
                match fit(g, h, &pairs)? {
                    Fit::Unique(hom) => Some(hom),
                    _ => None,
                }
            }
        };
        if let Some(hom) = hom {
            if visit(&hom).is_break() {
                return Ok(());
            }
        }
        let mut pos = d;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < candidates.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// `HOM(G, H)` in enumeration order, without duplicates.
pub fn enumerate_homomorphisms(g: &GroupSpec, h: &GroupSpec) -> Result<Vec<Homomorphism>> {
    let mut out = Vec::new();
    for_each_homomorphism(g, h, |hom| {
        out.push(hom.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}
