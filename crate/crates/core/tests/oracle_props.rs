use homtest_core::function::{gen_instance, FunctionTable, InstanceKind};
use homtest_core::oracle::{Answer, Mode, OnlineOracle, Schedule, StrategySpec, Transcript};
use homtest_core::rng::stream;
use homtest_core::{GroupElement, GroupSpec};
use proptest::prelude::*;
use rand::Rng;
use std::collections::HashSet;

const DOMAINS: [&str; 4] = ["Z31", "F2^8", "F3^4", "S4"];

fn strategies() -> impl Strategy<Value = StrategySpec> {
    prop_oneof![
        Just(StrategySpec::Null),
        Just(StrategySpec::Uniform),
        (1usize..4).prop_map(|w| StrategySpec::SumHunter { w }),
        Just(StrategySpec::SpanEraser),
    ]
}

fn schedules() -> impl Strategy<Value = Schedule> {
    prop_oneof![Just(Schedule::FixedRate), Just(Schedule::BudgetManaging)]
}

fn instance(d: usize, seed: u64) -> FunctionTable {
    let g: GroupSpec = DOMAINS[d].parse().unwrap();
    let h: GroupSpec = "Z2".parse().unwrap();
    gen_instance(
        &InstanceKind::RandomFunction,
        &g,
        &h,
        &mut stream(seed, &[0]),
    )
    .unwrap()
}

/// Queries `n` points, half of them repeats of earlier ones.
fn drive(
    f: &FunctionTable,
    spec: &StrategySpec,
    schedule: Schedule,
    t: u64,
    n: usize,
    seed: u64,
) -> (Transcript, u64, u64) {
    let g = f.domain();
    let strategy = spec.build(g).unwrap();
    let mut oracle = OnlineOracle::new(f, strategy, Mode::Erasure, schedule, t, stream(seed, &[1]));
    let mut rng = stream(seed, &[2]);
    let mut asked: Vec<GroupElement> = Vec::new();
    for _ in 0..n {
        let x = if !asked.is_empty() && rng.gen_bool(0.5) {
            asked[rng.gen_range(0..asked.len())]
        } else {
            g.sample_uniform(&mut rng)
        };
        asked.push(x);
        oracle.query(x).unwrap();
    }
    (
        oracle.transcript().clone(),
        oracle.manipulations_made(),
        oracle.queries_answered(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn budget_managing_ledger(d in 0..DOMAINS.len(), spec in strategies(), t in 0u64..5, n in 1usize..40, seed in any::<u64>()) {
        let f = instance(d, seed);
        prop_assume!(spec.applies_to(f.domain()));
        let (_, made, queries) = drive(&f, &spec, Schedule::BudgetManaging, t, n, seed);
        prop_assert_eq!(queries, n as u64);
        prop_assert!(made <= t * queries);
    }

    #[test]
    fn erasure_never_lies(d in 0..DOMAINS.len(), spec in strategies(), sched in schedules(), t in 0u64..5, n in 1usize..40, seed in any::<u64>()) {
        let f = instance(d, seed);
        prop_assume!(spec.applies_to(f.domain()));
        let (tr, _, _) = drive(&f, &spec, sched, t, n, seed);
        for (x, a) in &tr.entries {
            if let Answer::Value(v) = a {
                prop_assert_eq!(*v, f.eval(*x));
            }
        }
    }

    #[test]
    fn transcripts_are_deterministic(d in 0..DOMAINS.len(), spec in strategies(), sched in schedules(), t in 0u64..5, seed in any::<u64>()) {
        let f = instance(d, seed);
        prop_assume!(spec.applies_to(f.domain()));
        prop_assert_eq!(drive(&f, &spec, sched, t, 30, seed), drive(&f, &spec, sched, t, 30, seed));
    }

    #[test]
    fn erasures_are_permanent(d in 0..DOMAINS.len(), spec in strategies(), sched in schedules(), t in 1u64..5, seed in any::<u64>()) {
        let f = instance(d, seed);
        prop_assume!(spec.applies_to(f.domain()));
        let (tr, _, _) = drive(&f, &spec, sched, t, 40, seed);
        let mut erased = HashSet::new();
        for (x, a) in &tr.entries {
            if erased.contains(x) {
                prop_assert!(a.is_bottom());
            }
            if a.is_bottom() {
                erased.insert(*x);
            }
        }
    }
}
