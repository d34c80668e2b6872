//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time limit.

use homtest_core::analysis::{
    binomial_even_probability, chi_square_two_sample, corrector, corrector_lemmas_hold,
    flatness_probe, is_listed_homomorphism, linear_independence_bound,
    linear_independence_probability, signed_sum_histogram, standard_error, zeta_partial_sum,
    zeta_upper_bound, CorrectorMode, FlatnessConfig, ProbeVariant,
};
use homtest_core::function::{distance_to_hom, gen_instance, FunctionTable, InstanceKind};
use homtest_core::group::{Direction, Sign, SignedTuple};
use homtest_core::harness::{
    completeness_matrix, lowerbound_demo, run_experiment, AdversaryConfig, ExperimentConfig,
    InstanceConfig,
};
use homtest_core::oracle::{Mode, OnlineOracle, Schedule, StrategySpec};
use homtest_core::rng::{stream, StreamRng};
use homtest_core::testers::{
    fixed_signs_test, generated_subgroup_test, random_signs_test, resolve_e, signs_branch_applies,
    unpredictable_signs_test, Overrides, TesterName, TesterParams, TesterSpec, Verdict,
};
use homtest_core::{Epsilon, GroupElement, GroupSpec, Result};
use num_rational::Ratio;
use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

type Check = Result<(bool, String)>;

fn group(s: &str) -> GroupSpec {
    s.parse().unwrap()
}

fn eps(n: u64, d: u64) -> Epsilon {
    Epsilon::new(n, d).unwrap()
}

/// Rejection count of `tester` over `trials` honest runs on `f`.
fn rejections(
    f: &FunctionTable,
    trials: u64,
    seed: u64,
    mut tester: impl FnMut(&mut OnlineOracle, &mut StreamRng) -> Result<Verdict>,
) -> Result<u64> {
    let mut rejects = 0;
    for trial in 0..trials {
        let mut oracle = OnlineOracle::honest(f, stream(seed, &[trial, 0]));
        rejects += !tester(&mut oracle, &mut stream(seed, &[trial, 1]))?.accepted() as u64;
    }
    Ok(rejects)
}

fn completeness() -> Check {
    let cells = completeness_matrix(10_000, 1)?;
    let failed: Vec<String> = cells
        .iter()
        .filter(|c| !c.passed())
        .map(|c| {
            format!(
                "{}->{} {} {} t={}: {}/{}",
                c.domain, c.codomain, c.tester, c.strategy, c.t, c.accepted, c.trials
            )
        })
        .collect();
    let testers: HashSet<&str> = cells.iter().map(|c| c.tester.as_str()).collect();
    let pass = failed.is_empty() && testers.len() == TesterName::ALL.len();
    Ok((
        pass,
        format!(
            "{} cells x 10^4 trials, {} testers, failures {:?}",
            cells.len(),
            testers.len(),
            failed
        ),
    ))
}

/// Dense instances with a brute-force distance in (0, 1).
fn soundness_instances() -> Result<Vec<(FunctionTable, Ratio<u64>)>> {
    let pairs = [
        "Z5:Z5", "Z6:Z4", "S3:Z2", "D4:Z2", "F2^4:F2", "Z7:Z7", "F3^2:F3",
    ];
    let rates = [(1, 20), (1, 10), (1, 5), (1, 3), (1, 2)];
    let mut out = Vec::new();
    let mut i = 0u64;
    while out.len() < 20 {
        let (gs, hs) = pairs[i as usize % pairs.len()].split_once(':').unwrap();
        let kind = if i % 4 == 3 {
            InstanceKind::RandomFunction
        } else {
            let (n, d) = rates[i as usize % rates.len()];
            InstanceKind::PlantedFar { epsilon: eps(n, d) }
        };
        let f = gen_instance(&kind, &group(gs), &group(hs), &mut stream(2, &[i]))?;
        let (d, _) = distance_to_hom(&f)?;
        if *d.numer() > 0 && d < Ratio::from_integer(1) {
            out.push((f, d));
        }
        i += 1;
    }
    Ok(out)
}

fn soundness_signs() -> Check {
    let trials = 100_000u64;
    let mut worst = f64::INFINITY;
    let mut spread = (f64::INFINITY, 0.0f64);
    let mut failures = Vec::new();
    for (idx, (f, d)) in soundness_instances()?.into_iter().enumerate() {
        let ef = *d.numer() as f64 / *d.denom() as f64;
        spread = (spread.0.min(ef), spread.1.max(ef));
        for k in [2usize, 4, 8] {
            let r = rejections(&f, trials, 100 + idx as u64 * 10 + k as u64, |o, rng| {
                random_signs_test(o, 2 * k, rng)
            })?;
            let rate = r as f64 / trials as f64;
            let floor = ((2 * k) as f64 - 3.0) * ef / 3.0;
            let floor = floor.min(1.0 / 16.0);
            let margin = rate - (floor - 3.0 * standard_error(rate, trials));
            worst = worst.min(margin);
            if margin < 0.0 {
                failures.push(format!(
                    "{} -> {} eps={d} k={k}: {rate:.4} < {floor:.4}",
                    f.domain(),
                    f.codomain()
                ));
            }
        }
    }
    Ok((
        failures.is_empty(),
        format!("20 instances, eps_f in [{:.3}, {:.3}], k in {{2,4,8}}, smallest margin {worst:.4}, failures {failures:?}", spread.0, spread.1),
    ))
}

fn shifted_counterexample() -> Check {
    let g = group("Z3");
    let s = g.residue(1)?;
    let f = FunctionTable::from_fn(&g, &g, |x| g.op(g.times(x, 2), s))?;
    let (d, _) = distance_to_hom(&f)?;
    let plus = vec![Sign::Plus; 4];
    let fixed = rejections(&f, 10_000, 31, |o, rng| fixed_signs_test(o, &plus, rng))?;
    let trials = 100_000;
    let random = rejections(&f, trials, 32, |o, rng| random_signs_test(o, 8, rng))?;
    let rate = random as f64 / trials as f64;
    let ef: f64 = 2.0 / 3.0;
    let floor = (ef / 2.0).min(0.1) - 3.0 * standard_error(rate, trials);
    let pass = d == Ratio::new(2, 3) && fixed == 0 && rate >= floor;
    Ok((pass, format!("eps_f = {d}, all-plus 4-point rejections {fixed}/10000, random signs on 8 points rejects {rate:.4} (floor {floor:.4})")))
}

/// Independent count: expand every (sign, element) tuple and sum with the group operation.
fn literal_histogram(g: &GroupSpec, k: usize) -> Vec<u128> {
    let elems = g.elements(1 << 12).unwrap();
    let mut hist = vec![0u128; elems.len()];
    let mut tuples: Vec<Vec<(Sign, GroupElement)>> = vec![vec![]];
    for _ in 0..k {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                elems.iter().flat_map(move |x| {
                    [Sign::Plus, Sign::Minus].into_iter().map({
                        let t = t.clone();
                        move |s| {
                            let mut t = t.clone();
                            t.push((s, *x));
                            t
                        }
                    })
                })
            })
            .collect();
    }
    for t in tuples {
        let mut acc = g.identity();
        for (s, x) in t {
            let y = if s == Sign::Plus { x } else { g.inverse(x) };
            acc = g.op(acc, y);
        }
        hist[g.index_of(acc) as usize] += 1;
    }
    hist
}

fn signed_sum_uniformity() -> Check {
    let mut details = Vec::new();
    let mut pass = true;
    for gs in ["Z4", "S3"] {
        let g = group(gs);
        for k in [1usize, 2] {
            let expect = (2 * g.order()).pow(k as u32) / g.order();
            let hist = signed_sum_histogram(&g, k)?;
            let oracle = literal_histogram(&g, k);
            let mut direct = vec![0u128; hist.len()];
            let elems = g.elements(1 << 12)?;
            // Also through the library's signed sum, one tuple at a time.
            for code in 0..(2 * elems.len()).pow(k as u32) {
                let mut t = SignedTuple::default();
                let mut c = code;
                for _ in 0..k {
                    let s = if c % 2 == 0 { Sign::Plus } else { Sign::Minus };
                    t.push(s, elems[(c / 2) % elems.len()]);
                    c /= 2 * elems.len();
                }
                direct[g.index_of(g.signed_sum(&t, Direction::Increasing)?) as usize] += 1;
            }
            let ok = hist.iter().all(|c| *c == expect) && hist == oracle && direct == oracle;
            pass &= ok;
            details.push(format!(
                "{gs} k={k}: {expect} each{}",
                if ok { "" } else { " MISMATCH" }
            ));
        }
    }
    Ok((pass, details.join(", ")))
}

fn all_functions(g: &GroupSpec, h: &GroupSpec) -> Result<Vec<FunctionTable>> {
    let dom = g.elements(64)?.len();
    let cod = h.elements(64)?;
    let mut out = Vec::new();
    for code in 0..cod.len().pow(dom as u32) {
        let mut c = code;
        let values = (0..dom)
            .map(|_| {
                let v = cod[c % cod.len()];
                c /= cod.len();
                v
            })
            .collect();
        out.push(FunctionTable::dense(g, h, values)?);
    }
    Ok(out)
}

fn corrector_lemmas() -> Check {
    let mut rng = stream(5, &[]);
    let mut eligible = Vec::new();
    let mut smallest_non_hom = f64::INFINITY;
    for gs in ["Z2", "Z3", "Z4"] {
        for hs in ["Z2", "Z3"] {
            for f in all_functions(&group(gs), &group(hs))? {
                let r = corrector(&f, 4, CorrectorMode::Exact, &mut rng)?;
                let hom = is_listed_homomorphism(&f)?;
                if !hom {
                    smallest_non_hom = smallest_non_hom.min(r.mu_f64());
                }
                if r.mu < Ratio::new(1, 10) {
                    eligible.push((f, r, hom));
                }
            }
        }
    }
    let non_homs = eligible.iter().filter(|e| !e.2).count();
    let mut pass = eligible.len() >= 10;
    for (_, r, _) in &eligible {
        let (eta, delta, g_hom) = corrector_lemmas_hold(r);
        pass &= eta && delta && g_hom;
    }
    Ok((
        pass,
        format!(
            "{} functions with mu < 1/10 ({} non-homomorphisms; smallest non-homomorphism mu = {:.4}), all satisfy eta <= 2mu, delta <= 2mu, g in HOM",
            eligible.len(),
            non_homs,
            smallest_non_hom
        ),
    ))
}

fn flatness() -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (gs, variant, deficit_bound, mass_bound) in [
        ("F2^24", ProbeVariant::Signs, 1.0 / 16.0, 1.0 / 6.0),
        ("F3^16", ProbeVariant::Coefficients, 2.0 / 81.0, 1.0 / 24.0),
    ] {
        let cfg = FlatnessConfig {
            variant,
            m: 4,
            x_draws: 1000,
            tuple_draws: 4000,
            agreement_k: 0,
        };
        let r = flatness_probe(&group(gs), None, &cfg, &mut stream(6, &[]))?;
        let def_se = standard_error(deficit_bound, r.samples_of_x);
        let mass_se = if r.exact_conditional {
            0.0
        } else {
            standard_error(mass_bound, cfg.tuple_draws)
        };
        let ok = r.support_deficit_fraction <= deficit_bound + 3.0 * def_se
            && r.max_mass_non_deficit <= mass_bound + 3.0 * mass_se + 1e-12;
        pass &= ok;
        parts.push(format!(
            "{gs}: deficit {:.4} (bound {deficit_bound:.4}), max mass {:.4} (bound {mass_bound:.4}, exact {})",
            r.support_deficit_fraction, r.max_mass_non_deficit, r.exact_conditional
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn soundness_transfer() -> Check {
    let trials = 100_000;
    let mut parts = Vec::new();
    let mut pass = true;
    let instances = [
        ("Z5", "Z5", InstanceKind::PlantedFar { epsilon: eps(1, 5) }),
        ("F2^6", "F2", InstanceKind::RandomFunction),
    ];
    for (i, (gs, hs, kind)) in instances.into_iter().enumerate() {
        let f = gen_instance(&kind, &group(gs), &group(hs), &mut stream(7, &[i as u64]))?;
        let a = rejections(&f, trials, 70 + i as u64, |o, rng| {
            unpredictable_signs_test(o, 8, rng)
        })?;
        let b = rejections(&f, trials, 80 + i as u64, |o, rng| {
            random_signs_test(o, 4, rng)
        })?;
        let chi = chi_square_two_sample(a, trials, b, trials);
        pass &= chi.p_value > 0.01;
        parts.push(format!(
            "{gs}->{hs}: {:.4} vs {:.4}, p = {:.3}",
            a as f64 / 1e5,
            b as f64 / 1e5,
            chi.p_value
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn experiment(
    gs: &str,
    hs: &str,
    kind: InstanceKind,
    resample: bool,
    tester: TesterSpec,
    strategy: StrategySpec,
    t: u64,
    trials: u64,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        group_domain: gs.into(),
        group_codomain: hs.into(),
        instance: InstanceConfig { kind, resample },
        tester,
        adversary: AdversaryConfig {
            strategy,
            mode: Mode::Erasure,
            schedule: Schedule::BudgetManaging,
            t,
        },
        trials,
        seed,
        output: None,
    }
}

fn dispatcher() -> Check {
    let tester = TesterSpec::new(
        TesterName::DispatchGeneral,
        TesterParams {
            epsilon: Some(eps(1, 4)),
            ..TesterParams::default()
        },
    );
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, strategy) in [StrategySpec::Uniform, StrategySpec::SumHunter { w: 2 }]
        .into_iter()
        .enumerate()
    {
        let label = strategy.label();
        let hom = run_experiment(&experiment(
            "F2^16",
            "Z6",
            InstanceKind::RandomHom,
            true,
            tester.clone(),
            strategy.clone(),
            4,
            1000,
            80 + i as u64,
        ))?;
        let far = run_experiment(&experiment(
            "F2^16",
            "Z6",
            InstanceKind::PlantedFar { epsilon: eps(1, 4) },
            true,
            tester.clone(),
            strategy,
            4,
            1000,
            90 + i as u64,
        ))?;
        let branch = hom
            .algorithms
            .keys()
            .chain(far.algorithms.keys())
            .all(|a| a == "dispatch-general:gr-sample");
        let ok = branch && hom.accept_count == hom.trials && far.reject_rate() >= 2.0 / 3.0;
        pass &= ok;
        parts.push(format!(
            "{label}: branch gr-sample {branch}, homs {}/{} accepted, planted rejected {:.3}",
            hom.accept_count,
            hom.trials,
            far.reject_rate()
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn forced_online_signs() -> Check {
    let g = group("F2^64");
    let overrides = Overrides {
        force_m: Some(16),
        ..Overrides::default()
    };
    let tester = TesterSpec::new(
        TesterName::OnlineSigns,
        TesterParams {
            epsilon: Some(eps(1, 4)),
            overrides,
            ..TesterParams::default()
        },
    );
    let mut pass = signs_branch_applies(&g, 16);
    let mut parts = Vec::new();
    for (i, strategy) in [
        StrategySpec::Uniform,
        StrategySpec::SumHunter { w: 2 },
        StrategySpec::SpanEraser,
    ]
    .into_iter()
    .enumerate()
    {
        let label = strategy.label();
        let hom = run_experiment(&experiment(
            "F2^64",
            "F2",
            InstanceKind::RandomHom,
            true,
            tester.clone(),
            strategy.clone(),
            64,
            300,
            90 + i as u64,
        ))?;
        let far = run_experiment(&experiment(
            "F2^64",
            "F2",
            InstanceKind::ImplicitPlanted {
                epsilon: eps(1, 4),
                key: None,
            },
            true,
            tester.clone(),
            strategy,
            64,
            300,
            95 + i as u64,
        ))?;
        let flagged = far.regime_flags.iter().any(|f| f == "heuristic_epsilon")
            && far.regime_flags.iter().any(|f| f == "forced_parameters");
        let ok = hom.accept_count == hom.trials && far.reject_rate() >= 2.0 / 3.0 && flagged;
        pass &= ok;
        parts.push(format!(
            "{label}: homs {}/{} accepted, planted rejected {:.3}, erasures seen/trial {:.2}, flags {:?}",
            hom.accept_count,
            hom.trials,
            far.reject_rate(),
            far.mean_erasures_seen,
            far.regime_flags
        ));
    }
    Ok((pass, parts.join("; ")))
}

/// Independent closure: breadth-first products of the sample.
fn closure_is_whole(g: &GroupSpec, sample: &[GroupElement]) -> bool {
    let mut seen: HashSet<GroupElement> = HashSet::from([g.identity()]);
    let mut frontier = vec![g.identity()];
    while let Some(x) = frontier.pop() {
        for s in sample {
            let y = g.op(x, *s);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen.len() as u128 == g.order()
}

fn generated_subgroup() -> Check {
    let trials = 10_000u64;
    let quarter = eps(1, 4);
    let mut pass = true;
    let mut parts = Vec::new();
    for (gs, hs) in [("S5", "Z2"), ("Z5", "Z5")] {
        let (g, h) = (group(gs), group(hs));
        let e = resolve_e(&g)?;
        let m = e.ceil() as u64 + 9;
        let f = gen_instance(&InstanceKind::RandomHom, &g, &h, &mut stream(10, &[]))?;
        let (mut generated, mut counts_ok, mut closure_ok) = (0u64, true, true);
        for trial in 0..trials {
            let mut oracle = OnlineOracle::honest(&f, stream(11, &[trial]));
            let v =
                generated_subgroup_test(&mut oracle, quarter, e, None, &mut stream(12, &[trial]))?;
            if v.sample_generated == Some(true) {
                generated += 1;
                counts_ok &= v.queries_made == m + 12;
                let sample: Vec<GroupElement> = oracle.transcript().entries[..m as usize]
                    .iter()
                    .map(|q| q.0)
                    .collect();
                closure_ok &= closure_is_whole(&g, &sample);
            } else {
                counts_ok &= v.queries_made == 0;
            }
            counts_ok &= v.accepted();
        }
        let rate = generated as f64 / trials as f64;
        let floor = 11.0 / 12.0 - 3.0 * standard_error(11.0 / 12.0, trials);
        let ok = rate >= floor && counts_ok && closure_ok;
        pass &= ok;
        parts.push(format!("{gs}: E = {e:.3}, m = {m}, generated {rate:.4} (floor {floor:.4}), query count {m}+12 {counts_ok}"));
    }
    Ok((pass, parts.join("; ")))
}

fn lower_bound() -> Check {
    let g = group("F2^3");
    let e = |b| GroupElement::from_bits(b);
    let two = lowerbound_demo(2, 3, 4, &[e(1), e(2)], 100_000, 13)?;
    let four = lowerbound_demo(2, 3, 0, &[e(1), e(2), e(4), g.op(e(1), e(2))], 100_000, 14)?;
    let pass = two.total_variation <= 0.05 && four.total_variation >= 0.2;
    Ok((
        pass,
        format!(
            "t=4, 2 queries: TV {:.4}; t=0, 4 queries with e1+e2: TV {:.4}",
            two.total_variation, four.total_variation
        ),
    ))
}

fn appendix_formulas() -> Check {
    let mut pass = true;
    // p = j/4; probabilities as integers over 4^n.
    for n in 0..=12u32 {
        for j in 0..=4u64 {
            let mut even = 0u128;
            for outcome in 0u32..(1 << n) {
                let ones = outcome.count_ones();
                if ones % 2 == 0 {
                    even += (j as u128).pow(ones) * ((4 - j) as u128).pow(n - ones);
                }
            }
            let oracle = even as f64 / 4f64.powi(n as i32);
            pass &= binomial_even_probability(n, j as f64 / 4.0)? == oracle;
        }
    }
    let mut zeta = Vec::new();
    for x in [2.0, 2.5, 3.0, 4.0] {
        let (s, tail) = zeta_partial_sum(x, 1_000_000)?;
        let bound = zeta_upper_bound(x)?;
        pass &= s + tail <= bound;
        zeta.push(format!("x={x}: {:.6} <= {bound:.6}", s + tail));
    }
    Ok((
        pass,
        format!(
            "parity exact for n <= 12 and p in {{0,1/4,1/2,3/4,1}}; zeta {}",
            zeta.join(", ")
        ),
    ))
}

fn linear_independence() -> Check {
    // Exhaustive count of independent pairs in F_2^4.
    let mut independent = 0;
    for a in 0u64..16 {
        for b in 0u64..16 {
            independent += (a != 0 && b != 0 && a != b) as u32;
        }
    }
    let draws = 100_000;
    let est = linear_independence_probability(2, 4, draws, &mut stream(15, &[]))?;
    let exact = independent as f64 / 256.0;
    let mut pass = independent == 210 && (est - exact).abs() <= 3.0 * standard_error(exact, draws);
    let mut parts = vec![format!("F2^4: exact {independent}/256, estimate {est:.4}")];
    for (p, n) in [(2u64, 8u32), (3, 6), (5, 4)] {
        let est = linear_independence_probability(p, n, draws, &mut stream(16, &[p, n as u64]))?;
        let bound = linear_independence_bound(p, n);
        pass &= est >= bound - 3.0 * standard_error(est, draws);
        parts.push(format!("F{p}^{n}: {est:.4} >= {bound:.4}"));
    }
    Ok((pass, parts.join("; ")))
}

fn main() {
    let criteria: Vec<(u32, &str, f64, fn() -> Check)> = vec![
        (1, "completeness matrix", 300.0, completeness),
        (
            2,
            "soundness of the random signs test",
            120.0,
            soundness_signs,
        ),
        (
            3,
            "shifted-homomorphism counterexample",
            30.0,
            shifted_counterexample,
        ),
        (4, "signed sums are uniform", 10.0, signed_sum_uniformity),
        (5, "corrector lemmas", 60.0, corrector_lemmas),
        (6, "flatness of the last query", 120.0, flatness),
        (
            7,
            "soundness transfer to the unpredictable test",
            60.0,
            soundness_transfer,
        ),
        (8, "end-to-end dispatcher", 180.0, dispatcher),
        (
            9,
            "online signs test at forced scale",
            300.0,
            forced_online_signs,
        ),
        (10, "generated subgroup test", 120.0, generated_subgroup),
        (11, "lower-bound adversary", 60.0, lower_bound),
        (12, "binomial parity and zeta bound", 5.0, appendix_formulas),
        (13, "linear independence", 30.0, linear_independence),
    ];
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    let mut err = std::io::stderr();
    for (n, name, limit, run) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= limit;
        let status = if ok && in_time { "PASS" } else { "FAIL" };
        failed += (status == "FAIL") as u32;
        let late = if in_time { "" } else { " OVER TIME" };
        writeln!(
            err,
            "{status} criterion {n:>2} {name}: {detail} [{secs:.1}s / {limit:.0}s{late}]"
        )
        .unwrap();
    }
    if failed > 0 {
        writeln!(err, "{failed} criteria failed").unwrap();
        std::process::exit(1);
    }
}
