//! Functions between finite groups.

mod distance;
mod hom;
mod instance;
mod io;

pub use distance::{distance, distance_to_hom, empirical_distance};
pub use hom::{
    enumerate_homomorphisms, fit, for_each_homomorphism, torsion_subgroup, Fit, Homomorphism,
    ENUMERATION_CAP,
};
pub use instance::{gen_instance, InstanceKind};
pub use io::{read_binary, read_json, write_binary, write_json, JSON_DEBUG_CAP};

use crate::group::{GroupElement, GroupSpec};
use crate::rng::keyed_hash;
use crate::{Epsilon, Error, Result};
use num_rational::Ratio;

/// Largest domain stored as a dense table.
pub const DENSE_CAP: u128 = 1 << 20;

#[derive(Clone, Debug)]
pub struct FunctionTable {
    domain: GroupSpec,
    codomain: GroupSpec,
    repr: Repr,
    certified_distance: Option<Ratio<u64>>,
}

#[derive(Clone, Debug)]
enum Repr {
    Dense(Vec<GroupElement>),
    Implicit(Implicit),
}

/// `x -> h(x) + noise(x)`, where a keyed hash of `x` decides whether noise is
/// present (probability `rate`) and which non-identity element it is.
#[derive(Clone, Debug)]
struct Implicit {
    base: Homomorphism,
    key: u64,
    rate: Epsilon,
    threshold: u128,
}

impl FunctionTable {
    pub fn dense(g: &GroupSpec, h: &GroupSpec, values: Vec<GroupElement>) -> Result<Self> {
        let n = g.small_order(DENSE_CAP)?;
        if values.len() != n {
            return Err(Error::Domain(format!(
                "expected {n} values, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !h.contains(**v)) {
            return Err(Error::Domain(format!(
                "value {:#x} is not in {h}",
                bad.bits()
            )));
        }
        Ok(FunctionTable {
            domain: g.clone(),
            codomain: h.clone(),
            repr: Repr::Dense(values),
            certified_distance: None,
        })
    }

    pub fn from_fn(
        g: &GroupSpec,
        h: &GroupSpec,
        f: impl FnMut(GroupElement) -> GroupElement,
    ) -> Result<Self> {
        let values = g.elements(DENSE_CAP)?.into_iter().map(f).collect();
        Self::dense(g, h, values)
    }

    /// Dense table of a homomorphism when small, otherwise the noiseless
    /// implicit form. Certified distance 0.
    pub fn from_hom(hom: &Homomorphism) -> Result<Self> {
        let mut f = if hom.domain().order() <= DENSE_CAP {
            Self::dense(hom.domain(), hom.codomain(), hom.table()?)?
        } else {
            Self::implicit(hom.clone(), 0, Epsilon::new(0, 1).expect("zero"))?
        };
        f.certified_distance = Some(Ratio::from_integer(0));
        Ok(f)
    }

    /// Planted-noise function over a vector-space domain.
    pub fn implicit(base: Homomorphism, key: u64, rate: Epsilon) -> Result<Self> {
        base.domain().require_vector_space()?;
        if rate.numer() > 0 && base.codomain().order() < 2 {
            return Err(Error::Domain(
                "noise needs a codomain with at least two elements".into(),
            ));
        }
        let threshold = ((rate.numer() as u128) << 64) / rate.denom() as u128;
        Ok(FunctionTable {
            domain: base.domain().clone(),
            codomain: base.codomain().clone(),
            repr: Repr::Implicit(Implicit {
                base,
                key,
                rate,
                threshold,
            }),
            certified_distance: None,
        })
    }

    pub fn domain(&self) -> &GroupSpec {
        &self.domain
    }

    pub fn codomain(&self) -> &GroupSpec {
        &self.codomain
    }

    pub fn certified_distance(&self) -> Option<Ratio<u64>> {
        self.certified_distance
    }

    pub fn with_certified_distance(mut self, d: Option<Ratio<u64>>) -> Self {
        self.certified_distance = d;
        self
    }

    pub fn dense_values(&self) -> Option<&[GroupElement]> {
        match &self.repr {
            Repr::Dense(v) => Some(v),
            Repr::Implicit(_) => None,
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    /// Planted noise rate of an implicit function.
    pub fn noise_rate(&self) -> Option<Epsilon> {
        match &self.repr {
            Repr::Implicit(imp) => Some(imp.rate),
            Repr::Dense(_) => None,
        }
    }

    /// Base homomorphism of an implicit function.
    pub fn base_homomorphism(&self) -> Option<&Homomorphism> {
        match &self.repr {
            Repr::Implicit(imp) => Some(&imp.base),
            Repr::Dense(_) => None,
        }
    }

    #[inline]
    pub fn eval(&self, x: GroupElement) -> GroupElement {
        match &self.repr {
            Repr::Dense(v) => v[self.domain.index_of(x) as usize],
            Repr::Implicit(imp) => {
                let hx = imp.base.eval(x);
                if (keyed_hash(imp.key, x.bits()) as u128) >= imp.threshold {
                    return hx;
                }
                let r = keyed_hash(imp.key ^ 0x6e6f_6973_65, x.bits()) as u128;
                let noise = self
                    .codomain
                    .element_at((1 + r % (self.codomain.order() - 1)) as u64);
                self.codomain.op(hx, noise)
            }
        }
    }

    /// Dense copy of the function.
    pub fn to_dense(&self) -> Result<Self> {
        match &self.repr {
            Repr::Dense(_) => Ok(self.clone()),
            Repr::Implicit(_) => {
                let f = Self::from_fn(&self.domain, &self.codomain, |x| self.eval(x))?;
                Ok(f.with_certified_distance(self.certified_distance))
            }
        }
    }
}
