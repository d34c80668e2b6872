use super::hom::{for_each_homomorphism, torsion_subgroup, Homomorphism};
use super::FunctionTable;
use crate::group::{GroupElement, GroupSpec};
use crate::{Error, Result};
use num_rational::Ratio;
use rand::Rng;
use std::ops::ControlFlow;

fn dense_of(f: &FunctionTable) -> Result<&[GroupElement]> {
    f.dense_values()
        .ok_or_else(|| Error::Unsupported("exact distance needs a dense table".into()))
}

/// Exact fraction of domain points where `f` and `g` differ.
pub fn distance(f: &FunctionTable, g: &FunctionTable) -> Result<Ratio<u64>> {
    if f.domain() != g.domain() || f.codomain() != g.codomain() {
        return Err(Error::Domain("functions have different signatures".into()));
    }
    let (a, b) = (dense_of(f)?, dense_of(g)?);
    let differ = a.iter().zip(b).filter(|(x, y)| x != y).count() as u64;
    Ok(Ratio::new(differ, a.len() as u64))
}

/// Monte-Carlo estimate of `Pr_x[f(x) != h(x)]`.
pub fn empirical_distance<R: Rng + ?Sized>(
    f: &FunctionTable,
    h: &Homomorphism,
    samples: u64,
    rng: &mut R,
) -> f64 {
    let g = f.domain();
    let differ = (0..samples)
        .filter(|_| {
            let x = g.sample_uniform(rng);
            f.eval(x) != h.eval(x)
        })
        .count();
    differ as f64 / samples as f64
}

/// Distance from `f` to `HOM(G, H)` and one closest homomorphism.
///
/// Domains `F_2^n` whose codomain has at most one involution are handled by a
/// Walsh-Hadamard transform; everything else enumerates `HOM(G, H)` and keeps
/// the first minimizer.
pub fn distance_to_hom(f: &FunctionTable) -> Result<(Ratio<u64>, Homomorphism)> {
    let values = dense_of(f)?;
    let (g, h) = (f.domain(), f.codomain());
    if let Some((2, n)) = g.as_vector_space() {
        let involutions = torsion_subgroup(h, 2)?;
        if involutions.len() <= 2 {
            return hadamard_distance(g, h, n, &involutions, values);
        }
    }
    let total = values.len() as u64;
    let mut best: Option<(u64, Homomorphism)> = None;
    for_each_homomorphism(g, h, |hom| {
        let limit = best.as_ref().map_or(u64::MAX, |b| b.0);
        let mut differ = 0u64;
        for (i, v) in values.iter().enumerate() {
            if hom.eval(g.element_at(i as u64)) != *v {
                differ += 1;
                if differ >= limit {
                    return ControlFlow::Continue(());
                }
            }
        }
        best = Some((differ, hom.clone()));
        if differ == 0 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    let (differ, hom) = best.ok_or_else(|| Error::Domain("HOM(G, H) is empty".into()))?;
    Ok((Ratio::new(differ, total), hom))
}

/// Homomorphisms `F_2^n -> H` when `H[2] = {e, c}` are `x -> <a, x> c`; the
/// agreement of `f` with each is read off one transform of `[f = e] - [f = c]`.
fn hadamard_distance(
    g: &GroupSpec,
    h: &GroupSpec,
    n: u32,
    involutions: &[GroupElement],
    values: &[GroupElement],
) -> Result<(Ratio<u64>, Homomorphism)> {
    let e = h.identity();
    let total = values.len() as u64;
    if involutions.len() == 1 {
        let differ = values.iter().filter(|v| **v != e).count() as u64;
        return Ok((Ratio::new(differ, total), Homomorphism::zero(g, h)?));
    }
    let c = involutions[1];
    let mut w: Vec<i64> = values
        .iter()
        .map(|v| {
            if *v == e {
                1
            } else if *v == c {
                -1
            } else {
                0
            }
        })
        .collect();
    let in_support = w.iter().filter(|x| **x != 0).count() as i64;
    let mut len = 1;
    while len < w.len() {
        for block in w.chunks_mut(2 * len) {
            let (lo, hi) = block.split_at_mut(len);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        len *= 2;
    }
    let (best_a, best_w) =
        w.iter().enumerate().fold(
            (0usize, i64::MIN),
            |acc, (a, v)| if *v > acc.1 { (a, *v) } else { acc },
        );
    let agree = ((in_support + best_w) / 2) as u64;
    let images = (0..n)
        .map(|i| if best_a >> i & 1 == 1 { c } else { e })
        .collect();
    Ok((
        Ratio::new(total - agree, total),
        Homomorphism::from_unit_images(g, h, images)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::hom::enumerate_homomorphisms;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn distance_examples() {
        let z3 = spec("Z3");
        let id = FunctionTable::from_fn(&z3, &z3, |x| x).unwrap();
        let shifted =
            FunctionTable::from_fn(&z3, &z3, |x| z3.op(x, z3.residue(1).unwrap())).unwrap();
        assert_eq!(distance(&id, &id).unwrap(), Ratio::from_integer(0));
        assert_eq!(distance(&id, &shifted).unwrap(), Ratio::from_integer(1));
        let (d, hom) = distance_to_hom(&id).unwrap();
        assert_eq!(d, Ratio::from_integer(0));
        assert_eq!(hom.table().unwrap(), id.dense_values().unwrap());
        assert_eq!(distance_to_hom(&shifted).unwrap().0, Ratio::new(2, 3));

        let z4 = spec("Z4");
        let a = FunctionTable::from_fn(&z4, &z4, |x| x).unwrap();
        let mut v = a.dense_values().unwrap().to_vec();
        v[3] = z4.identity();
        let b = FunctionTable::dense(&z4, &z4, v).unwrap();
        assert_eq!(distance(&a, &b).unwrap(), Ratio::new(1, 4));
    }

    #[test]
    fn one_flip_from_a_linear_functional() {
        let g = spec("F2^2");
        let f2 = spec("F2");
        let lin =
            FunctionTable::from_fn(&g, &f2, |x| GroupElement::from_bits(x.bits() & 1)).unwrap();
        let mut v = lin.dense_values().unwrap().to_vec();
        v[2] = GroupElement::from_bits(v[2].bits() ^ 1);
        let f = FunctionTable::dense(&g, &f2, v).unwrap();
        assert_eq!(distance_to_hom(&f).unwrap().0, Ratio::new(1, 4));
    }

    /// The transform path agrees with plain enumeration.
    #[test]
    fn hadamard_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (gs, hs) in [
            ("F2^6", "Z6"),
            ("F2^5", "F2"),
            ("F2^4", "Z3"),
            ("F2^4", "S3"),
        ] {
            let (g, h) = (spec(gs), spec(hs));
            let homs = enumerate_homomorphisms(&g, &h).unwrap();
            for _ in 0..20 {
                let f = FunctionTable::from_fn(&g, &h, |_| h.sample_uniform(&mut rng)).unwrap();
                let brute = homs
                    .iter()
                    .map(|hom| {
                        let t = FunctionTable::from_hom(hom).unwrap();
                        distance(&f, &t).unwrap()
                    })
                    .min()
                    .unwrap();
                let (d, witness) = distance_to_hom(&f).unwrap();
                assert_eq!(d, brute, "{gs} -> {hs}");
                assert_eq!(
                    distance(&f, &FunctionTable::from_hom(&witness).unwrap()).unwrap(),
                    d
                );
            }
        }
    }
}
