use super::linalg::VectorBasis;
use super::{is_prime, GroupElement, GroupError, GroupKind, GroupSpec};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub const DEFAULT_SUBGROUP_CAP: u128 = 1_000_000;
pub const DEFAULT_PARTIAL_SUMS_CAP_LOG2: u32 = 24;

/// Sets larger than this are tracked in a hash set rather than a bitmap.
const BITMAP_LIMIT: u128 = 1 << 26;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Membership set over a materializable group.
struct ElementSet<'g> {
    g: &'g GroupSpec,
    bitmap: Vec<bool>,
    members: Vec<GroupElement>,
}

impl<'g> ElementSet<'g> {
    fn new(g: &'g GroupSpec) -> Self {
        ElementSet {
            g,
            bitmap: vec![false; g.order() as usize],
            members: Vec::new(),
        }
    }

    fn insert(&mut self, x: GroupElement) -> bool {
        let i = self.g.index_of(x) as usize;
        if self.bitmap[i] {
            return false;
        }
        self.bitmap[i] = true;
        self.members.push(x);
        true
    }

    fn contains(&self, x: GroupElement) -> bool {
        self.bitmap[self.g.index_of(x) as usize]
    }
}

fn close<'g>(g: &'g GroupSpec, gens: &[GroupElement]) -> ElementSet<'g> {
    let mut set = ElementSet::new(g);
    set.insert(g.identity());
    let mut head = 0;
    while head < set.members.len() {
        let x = set.members[head];
        head += 1;
        for s in gens {
            set.insert(g.op(x, *s));
        }
    }
    set
}

/// `<s>`, in canonical order. Closing under right multiplication by the
/// generators suffices in a finite group.
pub fn generated_subgroup(
    g: &GroupSpec,
    s: &[GroupElement],
    cap: u128,
) -> Result<Vec<GroupElement>, GroupError> {
    g.small_order(cap)?;
    let mut out = close(g, s).members;
    out.sort_unstable();
    Ok(out)
}

/// Whether `s` generates `g`. Vector spaces use rank and cyclic groups use a
/// gcd, so neither materializes the group.
pub fn generates(g: &GroupSpec, s: &[GroupElement]) -> Result<bool, GroupError> {
    match g.kind() {
        GroupKind::VectorSpace { n, .. } => Ok(super::linalg::rank(g, s)? == *n as usize),
        GroupKind::Cyclic(n) => Ok(s.iter().fold(*n, |acc, x| gcd(acc, x.bits())) == 1),
        _ => {
            g.small_order(DEFAULT_SUBGROUP_CAP)?;
            Ok(close(g, s).members.len() as u128 == g.order())
        }
    }
}

fn check_partial_cap(g: &GroupSpec, len: usize, cap_log2: u32) -> Result<(), GroupError> {
    let reach = if len >= 127 { u128::MAX } else { 1u128 << len };
    if reach.min(g.order()) > 1u128 << cap_log2 {
        return Err(GroupError::ResourceCap {
            what: format!("partial sums of {len} elements of {g}"),
            limit: 1u128 << cap_log2,
        });
    }
    Ok(())
}

/// All subset sums `sum_{i in I} s_i` (increasing index order), sorted.
///
/// The number of distinct sums is at most `min(2^|s|, |G|)`; that quantity must
/// not exceed `2^cap_log2`.
pub fn partial_sums(
    g: &GroupSpec,
    s: &[GroupElement],
    cap_log2: u32,
) -> Result<Vec<GroupElement>, GroupError> {
    check_partial_cap(g, s.len(), cap_log2)?;
    let mut out = if g.order() <= BITMAP_LIMIT {
        let mut set = ElementSet::new(g);
        set.insert(g.identity());
        for x in s {
            if set.members.len() as u128 == g.order() {
                break;
            }
            for j in 0..set.members.len() {
                let y = g.op(set.members[j], *x);
                set.insert(y);
            }
        }
        set.members
    } else {
        let mut seen: HashSet<GroupElement> = HashSet::from([g.identity()]);
        let mut members = vec![g.identity()];
        for x in s {
            for j in 0..members.len() {
                let y = g.op(members[j], *x);
                if seen.insert(y) {
                    members.push(y);
                }
            }
        }
        members
    };
    out.sort_unstable();
    Ok(out)
}

/// Whether the partial sums of `s` cover all of `g`.
///
/// Over `F_2^n` subset sums are exactly the span, so this reduces to a rank
/// test and works at any dimension.
pub fn partial_sums_cover(
    g: &GroupSpec,
    s: &[GroupElement],
    cap_log2: u32,
) -> Result<bool, GroupError> {
    if let GroupKind::VectorSpace { p: 2, n } = g.kind() {
        return Ok(super::linalg::rank(g, s)? == *n as usize);
    }
    if (s.len() as u32) < 128 && g.order() > 1u128 << s.len() {
        return Ok(false);
    }
    Ok(partial_sums(g, s, cap_log2)?.len() as u128 == g.order())
}

/// Greedy generating sequence: repeatedly append the first element, in
/// canonical order, outside the closure of the sequence so far.
///
/// For `F_p^n` this is the list of unit vectors and is computed directly.
pub fn greedy_generating_sequence(
    g: &GroupSpec,
    cap: u128,
) -> Result<Vec<GroupElement>, GroupError> {
    if let GroupKind::VectorSpace { p, n } = g.kind() {
        return Ok((0..*n).map(|i| g.element_at(p.pow(i))).collect());
    }
    g.small_order(cap)?;
    let mut gens = Vec::new();
    let mut set = close(g, &gens);
    for i in 0..g.order() as u64 {
        if set.members.len() as u128 == g.order() {
            break;
        }
        let x = g.element_at(i);
        if !set.contains(x) {
            gens.push(x);
            set = close(g, &gens);
        }
    }
    Ok(gens)
}

/// Incremental test of whether a growing sample generates the group.
pub struct GenerationTracker<'g> {
    g: &'g GroupSpec,
    state: TrackerState<'g>,
}

enum TrackerState<'g> {
    Basis(VectorBasis),
    Gcd(u64),
    Closure {
        gens: Vec<GroupElement>,
        set: ElementSet<'g>,
    },
}

impl<'g> GenerationTracker<'g> {
    pub fn new(g: &'g GroupSpec) -> Result<Self, GroupError> {
        let state = match g.kind() {
            GroupKind::VectorSpace { .. } => TrackerState::Basis(VectorBasis::new(g)?),
            GroupKind::Cyclic(n) => TrackerState::Gcd(*n),
            _ => {
                g.small_order(DEFAULT_SUBGROUP_CAP)?;
                TrackerState::Closure {
                    gens: Vec::new(),
                    set: close(g, &[]),
                }
            }
        };
        Ok(GenerationTracker { g, state })
    }

    pub fn push(&mut self, x: GroupElement) {
        match &mut self.state {
            TrackerState::Basis(b) => {
                b.insert(x);
            }
            TrackerState::Gcd(d) => *d = gcd(*d, x.bits()),
            TrackerState::Closure { gens, set } => {
                if !set.contains(x) {
                    gens.push(x);
                    *set = close(self.g, gens);
                }
            }
        }
    }

    pub fn generates(&self) -> bool {
        match &self.state {
            TrackerState::Basis(b) => b.is_full(),
            TrackerState::Gcd(d) => *d == 1,
            TrackerState::Closure { set, .. } => set.members.len() as u128 == self.g.order(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DBeta {
    pub beta: f64,
    pub samples: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorStats {
    pub group: GroupSpec,
    pub e_estimate: f64,
    pub standard_error: f64,
    pub trials: u64,
    pub d_beta_estimates: Vec<DBeta>,
}

/// Closed form for `F_p^n` (and `Z_p`): `sum_{i<n} 1 / (1 - p^(i-n))`.
pub fn expected_generation_count_vector_space(p: u64, n: u32) -> f64 {
    (0..n)
        .map(|i| 1.0 / (1.0 - (p as f64).powi(i as i32 - n as i32)))
        .sum()
}

/// Exact expected generation count where a closed form is available.
pub fn exact_e(g: &GroupSpec) -> Option<f64> {
    match g.kind() {
        GroupKind::VectorSpace { p, n } => Some(expected_generation_count_vector_space(*p, *n)),
        GroupKind::Cyclic(n) if is_prime(*n) => Some(expected_generation_count_vector_space(*n, 1)),
        _ => None,
    }
}

/// Monte-Carlo estimate of the expected number of uniform draws until the
/// drawn set generates `g`, plus the empirical `d^beta` for each requested
/// `beta`: the smallest sample count whose observed success frequency is at
/// least `1 - beta`.
pub fn estimate_e<R: Rng + ?Sized>(
    g: &GroupSpec,
    trials: u64,
    betas: &[f64],
    rng: &mut R,
) -> Result<GeneratorStats, GroupError> {
    if trials == 0 {
        return Err(GroupError::InvalidSpec(
            "estimate_e needs at least one trial".into(),
        ));
    }
    let mut stops = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let mut tracker = GenerationTracker::new(g)?;
        let mut count = 0u64;
        while !tracker.generates() {
            tracker.push(g.sample_uniform(rng));
            count += 1;
        }
        stops.push(count);
    }
    let n = trials as f64;
    let mean = stops.iter().sum::<u64>() as f64 / n;
    let var = stops
        .iter()
        .map(|s| (*s as f64 - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    stops.sort_unstable();
    let mut betas: Vec<f64> = betas.to_vec();
    betas.sort_by(f64::total_cmp);
    let d_beta_estimates = betas
        .into_iter()
        .map(|beta| {
            let needed = ((1.0 - beta) * n).ceil().max(1.0) as usize;
            DBeta {
                beta,
                samples: stops[needed.min(stops.len()) - 1],
            }
        })
        .collect();
    Ok(GeneratorStats {
        group: g.clone(),
        e_estimate: mean,
        standard_error: (var / n).sqrt(),
        trials,
        d_beta_estimates,
    })
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
    fn cyclic_subgroups() {
        let z6 = spec("Z6");
        let r = |v| z6.residue(v).unwrap();
        assert_eq!(
            generated_subgroup(&z6, &[r(2)], 100).unwrap(),
            vec![r(0), r(2), r(4)]
        );
        assert_eq!(
            generated_subgroup(&z6, &[r(2), r(3)], 100).unwrap().len(),
            6
        );
        assert!(generates(&z6, &[r(2), r(3)]).unwrap());
        assert!(!generates(&z6, &[r(2), r(4)]).unwrap());
    }

    #[test]
    fn three_cycle_generates_a3() {
        let s3 = spec("S3");
        let c = s3.permutation(&[1, 2, 0]).unwrap();
        let sub = generated_subgroup(&s3, &[c], 100).unwrap();
        let mut expect = vec![s3.identity(), c, s3.op(c, c)];
        expect.sort();
        assert_eq!(sub, expect);
    }

    #[test]
    fn transposition_and_four_cycle_generate_s4() {
        let s4 = spec("S4");
        let t = s4.permutation(&[1, 0, 2, 3]).unwrap();
        let c = s4.permutation(&[1, 2, 3, 0]).unwrap();
        assert!(generates(&s4, &[t, c]).unwrap());
        assert!(!generates(&s4, &[c]).unwrap());
    }

    #[test]
    fn greedy_sequences() {
        let s4 = spec("S4");
        let gens = greedy_generating_sequence(&s4, 1000).unwrap();
        assert!(generates(&s4, &gens).unwrap());
        for k in 1..gens.len() {
            assert!(!generates(&s4, &gens[..k]).unwrap());
        }
        let f = spec("F3^3");
        let units = greedy_generating_sequence(&f, 1000).unwrap();
        assert_eq!(f.digits(units[1]).unwrap(), vec![0, 1, 0]);
        assert_eq!(
            greedy_generating_sequence(&spec("Z6"), 100).unwrap(),
            vec![spec("Z6").residue(1).unwrap()]
        );
    }

    #[test]
    fn vector_space_generation() {
        let g = spec("F2^3");
        let e: Vec<_> = (0..3).map(|i| GroupElement::from_bits(1 << i)).collect();
        assert!(generates(&g, &e).unwrap());
        assert!(!generates(&g, &e[..2]).unwrap());
    }

    #[test]
    fn small_partial_sums() {
        let z8 = spec("Z8");
        let r = |v| z8.residue(v).unwrap();
        assert_eq!(partial_sums(&z8, &[r(1)], 24).unwrap(), vec![r(0), r(1)]);
        assert_eq!(
            partial_sums(&z8, &[r(1), r(2)], 24).unwrap(),
            (0..4).map(r).collect::<Vec<_>>()
        );
        let f = spec("F2^2");
        let s = [
            f.vector(&[1, 0]).unwrap(),
            f.vector(&[0, 1]).unwrap(),
            f.vector(&[1, 1]).unwrap(),
        ];
        assert_eq!(partial_sums(&f, &s, 24).unwrap().len(), 4);
        let z5 = spec("Z5");
        assert_eq!(
            partial_sums(&z5, &[z5.residue(2).unwrap()], 24)
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn partial_sum_cap_counts_reachable_sums() {
        let big = spec("F3^30");
        let xs = vec![big.identity(); 25];
        assert!(matches!(
            partial_sums(&big, &xs, 24),
            Err(GroupError::ResourceCap { .. })
        ));
        let z6 = spec("Z6");
        let many = vec![z6.residue(1).unwrap(); 40];
        assert_eq!(partial_sums(&z6, &many, 24).unwrap().len(), 6);
    }

    #[test]
    fn f2_cover_uses_rank() {
        let g = spec("F2^16");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<_> = (0..26).map(|_| g.sample_uniform(&mut rng)).collect();
        assert!(partial_sums_cover(&g, &xs, 24).unwrap());
        assert!(!partial_sums_cover(&g, &xs[..10], 24).unwrap());
    }

    #[test]
    fn tracker_agrees_with_generates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in ["Z12", "S4", "D5", "F3^3", "Z2xZ4"] {
            let g = spec(s);
            for _ in 0..30 {
                let mut tr = GenerationTracker::new(&g).unwrap();
                let mut xs = Vec::new();
                for _ in 0..4 {
                    let x = g.sample_uniform(&mut rng);
                    xs.push(x);
                    tr.push(x);
                    assert_eq!(tr.generates(), generates(&g, &xs).unwrap(), "{s}");
                }
            }
        }
    }

    #[test]
    fn estimated_e_for_tiny_cyclic_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (s, exact) in [("Z2", 2.0), ("Z3", 1.5)] {
            let st = estimate_e(&spec(s), 10_000, &[0.5, 0.1], &mut rng).unwrap();
            assert!(
                (st.e_estimate - exact).abs() <= 3.0 * st.standard_error,
                "{s}: {st:?}"
            );
            assert!(st.d_beta_estimates[0].samples >= st.d_beta_estimates[1].samples);
        }
        assert_eq!(exact_e(&spec("Z5")), Some(1.25));
        let s5 = estimate_e(&spec("S5"), 2000, &[], &mut rng).unwrap();
        assert!((1.0..=6.0).contains(&s5.e_estimate), "{s5:?}");
    }
}
