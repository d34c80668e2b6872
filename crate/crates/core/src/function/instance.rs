use super::hom::{enumerate_homomorphisms, Homomorphism};
use super::{distance_to_hom, FunctionTable};
use crate::group::GroupSpec;
use crate::{Epsilon, Error, Result};
use num_rational::Ratio;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceKind {
    RandomHom,
    /// `h + s`; `shift` in element text form, random non-identity when absent.
    ShiftedHom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<String>,
    },
    RandomFunction,
    PlantedFar {
        epsilon: Epsilon,
    },
    ImplicitPlanted {
        epsilon: Epsilon,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        key: Option<u64>,
    },
}

impl InstanceKind {
    /// Whether every generated instance is a homomorphism.
    pub fn is_homomorphism(&self) -> bool {
        match self {
            InstanceKind::RandomHom => true,
            InstanceKind::PlantedFar { epsilon }
            | InstanceKind::ImplicitPlanted { epsilon, .. } => epsilon.is_zero(),
            _ => false,
        }
    }
}

fn random_hom<R: Rng + ?Sized>(g: &GroupSpec, h: &GroupSpec, rng: &mut R) -> Result<Homomorphism> {
    if g.as_vector_space().is_some() && h.is_abelian() {
        return Homomorphism::random_linear(g, h, rng);
    }
    let homs = enumerate_homomorphisms(g, h)?;
    Ok(homs[rng.gen_range(0..homs.len())].clone())
}

/// Draws an instance of the requested kind.
pub fn gen_instance<R: Rng + ?Sized>(
    kind: &InstanceKind,
    g: &GroupSpec,
    h: &GroupSpec,
    rng: &mut R,
) -> Result<FunctionTable> {
    match kind {
        InstanceKind::RandomHom => FunctionTable::from_hom(&random_hom(g, h, rng)?),
        InstanceKind::ShiftedHom { shift } => {
            let hom = random_hom(g, h, rng)?;
            let s = match shift {
                Some(text) => h.parse_element(text)?,
                None if h.order() > 1 => h.element_at(rng.gen_range(1..h.order() as u64)),
                None => h.identity(),
            };
            let f = FunctionTable::from_fn(g, h, |x| h.op(hom.eval(x), s))?;
            if s == h.identity() {
                Ok(f.with_certified_distance(Some(Ratio::from_integer(0))))
            } else {
                Ok(f)
            }
        }
        InstanceKind::RandomFunction => FunctionTable::from_fn(g, h, |_| h.sample_uniform(rng)),
        InstanceKind::PlantedFar { epsilon } => {
            let hom = random_hom(g, h, rng)?;
            let mut values = hom.table()?;
            let n = values.len();
            let flips = epsilon.ceil_fraction_of(n as u128) as usize;
            if flips > 0 && h.order() < 2 {
                return Err(Error::Domain(
                    "cannot plant noise in a trivial codomain".into(),
                ));
            }
            for i in sample(rng, n, flips) {
                let old = h.index_of(values[i]);
                let r = rng.gen_range(1..h.order() as u64);
                values[i] = h.element_at((old + r) % h.order() as u64);
            }
            let f = FunctionTable::dense(g, h, values)?;
            let (d, _) = distance_to_hom(&f)?;
            Ok(f.with_certified_distance(Some(d)))
        }
        InstanceKind::ImplicitPlanted { epsilon, key } => {
            let hom = Homomorphism::random_linear(g, h, rng)?;
            let key = key.unwrap_or_else(|| rng.gen());
            FunctionTable::implicit(hom, key, *epsilon)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn shift_by_identity_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z3 = spec("Z3");
        let f = gen_instance(
            &InstanceKind::ShiftedHom {
                shift: Some("0".into()),
            },
            &z3,
            &z3,
            &mut rng,
        )
        .unwrap();
        assert_eq!(distance_to_hom(&f).unwrap().0, Ratio::from_integer(0));
    }

    #[test]
    fn planted_far_is_certified_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z5 = spec("Z5");
        let zero = InstanceKind::PlantedFar {
            epsilon: Epsilon::new(0, 1).unwrap(),
        };
        assert_eq!(
            gen_instance(&zero, &z5, &z5, &mut rng)
                .unwrap()
                .certified_distance(),
            Some(Ratio::from_integer(0))
        );
        for (gs, hs) in [("Z5", "Z5"), ("F2^8", "F2"), ("D4", "Z2"), ("F3^4", "F3^2")] {
            let (g, h) = (spec(gs), spec(hs));
            for _ in 0..10 {
                let eps = Epsilon::new(1, 4).unwrap();
                let f = gen_instance(&InstanceKind::PlantedFar { epsilon: eps }, &g, &h, &mut rng)
                    .unwrap();
                let d = f.certified_distance().unwrap();
                assert!(
                    d <= Ratio::new(eps.ceil_fraction_of(g.order()) as u64, g.order() as u64),
                    "{gs}"
                );
                assert!(d > Ratio::from_integer(0), "{gs}");
            }
        }
    }

    #[test]
    fn random_functions_are_mostly_far() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z5 = spec("Z5");
        let total: f64 = (0..1000)
            .map(|_| {
                let f = gen_instance(&InstanceKind::RandomFunction, &z5, &z5, &mut rng).unwrap();
                let d = distance_to_hom(&f).unwrap().0;
                *d.numer() as f64 / *d.denom() as f64
            })
            .sum();
        assert!(total / 1000.0 >= 0.5);
    }

    #[test]
    fn kinds_round_trip_through_json() {
        let k = InstanceKind::PlantedFar {
            epsilon: Epsilon::new(1, 4).unwrap(),
        };
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(s, r#"{"kind":"planted_far","epsilon":"1/4"}"#);
        assert_eq!(serde_json::from_str::<InstanceKind>(&s).unwrap(), k);
    }
}
