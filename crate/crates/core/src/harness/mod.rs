//! Reproducible Monte-Carlo experiments.
//!
//! Trial `i` draws everything from `stream(seed, [i, role])`, so a report is
//! a function of the config alone: worker count and trial order do not
//! matter, and adding trials leaves earlier ones untouched.

mod lowerbound;
mod zoo;

pub use crate::analysis::wilson_interval;
pub use lowerbound::{lowerbound_demo, unit_vectors_then_sum, LowerBoundReport};
pub use zoo::{completeness_matrix, zoo_pairs, zoo_strategies, zoo_tester, ZooCell, ZOO_T};

use crate::function::{
    distance_to_hom, gen_instance, torsion_subgroup, FunctionTable, InstanceKind,
};
use crate::oracle::{Mode, OnlineOracle, Schedule, StrategySpec};
use crate::rng::{stream, LABEL_ADVERSARY, LABEL_INSTANCE, LABEL_TESTER};
use crate::testers::{admissible_t, TesterName, TesterSpec, DEFAULT_RANGE_CONSTANT};
use crate::{Error, GroupSpec, Result};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// z for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Dense instances up to this order get an exact `ε_f`.
const EXACT_EPSILON_ORDER: u128 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    #[serde(flatten)]
    pub kind: InstanceKind,
    /// Draw a fresh instance per trial instead of one per experiment.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub resample: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    #[serde(flatten)]
    pub strategy: StrategySpec,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub t: u64,
}

impl Default for AdversaryConfig {
    fn default() -> Self {
        AdversaryConfig {
            strategy: StrategySpec::Null,
            mode: Mode::Erasure,
            schedule: Schedule::FixedRate,
            t: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Jsonl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group_domain: String,
    pub group_codomain: String,
    pub instance: InstanceConfig,
    pub tester: TesterSpec,
    #[serde(default)]
    pub adversary: AdversaryConfig,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn groups(&self) -> Result<(GroupSpec, GroupSpec)> {
        let parse = |s: &str| {
            s.parse::<GroupSpec>()
                .map_err(|e| Error::Config(format!("`{s}`: {e}")))
        };
        Ok((parse(&self.group_domain)?, parse(&self.group_codomain)?))
    }

    pub fn validate(&self) -> Result<(GroupSpec, GroupSpec)> {
        let (g, h) = self.groups()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !self.tester.name.applies_to(&g, &h) {
            return Err(Error::Config(format!(
                "{} is not defined for {g} -> {h}",
                self.tester.name
            )));
        }
        if !self.adversary.strategy.applies_to(&g) {
            return Err(Error::Config(format!(
                "{} needs a vector-space domain",
                self.adversary.strategy.label()
            )));
        }
        Ok((g, h))
    }
}

/// Trials sharing one exact `ε_f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub epsilon: Ratio<u64>,
    pub trials: u64,
    pub reject_count: u64,
    pub reject_rate: f64,
    pub reject_interval: (f64, f64),
    /// Guaranteed rejection probability for the signs test, when it applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub soundness_floor: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub config: ExperimentConfig,
    pub code_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub trials: u64,
    pub accept_count: u64,
    pub reject_count: u64,
    pub accept_rate: f64,
    pub accept_interval: (f64, f64),
    pub mean_queries: f64,
    pub mean_erasures_seen: f64,
    pub mean_iterations: f64,
    /// Rejections whose witness does not hold against the stored function.
    /// Always zero under erasures.
    pub unverified_rejections: u64,
    /// Algorithms actually run (dispatchers report their branch).
    pub algorithms: BTreeMap<String, u64>,
    pub regime_flags: Vec<String>,
    /// Exact `ε_f` of the fixed instance, or the noise rate of an implicit one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_epsilon: Option<Ratio<u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strata: Vec<Stratum>,
    pub wall_time: f64,
    pub config_echo: ConfigEcho,
}

impl ExperimentReport {
    pub fn reject_rate(&self) -> f64 {
        self.reject_count as f64 / self.trials as f64
    }

    /// Wilson interval on the rejection rate.
    pub fn reject_interval(&self) -> (f64, f64) {
        let (lo, hi) = self.accept_interval;
        (1.0 - hi, 1.0 - lo)
    }

    /// Appends the report as one JSON line.
    pub fn append_jsonl(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        writeln!(file, "{}", serde_json::to_string(self)?)?;
        Ok(())
    }
}

/// `min{(2k - 3) ε / 3, 1/16}` for the signs test on `2k` points.
pub fn signs_soundness_floor(points: usize, eps: f64) -> Option<f64> {
    (points >= 2 && points % 2 == 0)
        .then(|| ((points as f64 - 3.0) * eps / 3.0).clamp(0.0, 1.0 / 16.0))
}

/// Exact `ε_f` when it is certified or cheap to compute.
pub fn exact_epsilon(f: &FunctionTable) -> Result<Option<Ratio<u64>>> {
    if let Some(d) = f.certified_distance() {
        return Ok(Some(d));
    }
    if !f.is_dense() {
        return Ok(None);
    }
    let (g, h) = (f.domain(), f.codomain());
    let hadamard =
        g.as_vector_space().is_some_and(|(p, _)| p == 2) && torsion_subgroup(h, 2)?.len() <= 2;
    if g.order() <= EXACT_EPSILON_ORDER || hadamard {
        return Ok(Some(distance_to_hom(f)?.0));
    }
    Ok(None)
}

struct Outcome {
    accepted: bool,
    witness_holds: bool,
    queries: u64,
    erasures: u64,
    iterations: u64,
    forced: bool,
    algorithm: String,
    warnings: Vec<String>,
    epsilon: Option<Ratio<u64>>,
}

fn run_trial(
    cfg: &ExperimentConfig,
    tester: &TesterSpec,
    g: &GroupSpec,
    h: &GroupSpec,
    fixed: Option<&FunctionTable>,
    trial: u64,
) -> Result<Outcome> {
    let drawn;
    let (f, epsilon) = match fixed {
        Some(f) => (f, None),
        None => {
            drawn = gen_instance(
                &cfg.instance.kind,
                g,
                h,
                &mut stream(cfg.seed, &[trial, LABEL_INSTANCE]),
            )?;
            (&drawn, exact_epsilon(&drawn)?)
        }
    };
    let adv = &cfg.adversary;
    let mut oracle = OnlineOracle::new(
        f,
        adv.strategy.build(g)?,
        adv.mode,
        adv.schedule,
        adv.t,
        stream(cfg.seed, &[trial, LABEL_ADVERSARY]),
    );
    let v = tester.run(&mut oracle, &mut stream(cfg.seed, &[trial, LABEL_TESTER]))?;
    let witness_holds = match &v.reject_witness {
        Some(w) => w.violates(f)?,
        None => true,
    };
    Ok(Outcome {
        accepted: v.accepted(),
        witness_holds,
        queries: v.queries_made,
        erasures: v.erasures_seen,
        iterations: v.iterations_run,
        forced: v.forced_parameters,
        algorithm: v.algorithm,
        warnings: v.warnings,
        epsilon,
    })
}

fn regime_flags(
    cfg: &ExperimentConfig,
    g: &GroupSpec,
    f: Option<&FunctionTable>,
    outcomes: &[Outcome],
) -> Vec<String> {
    let mut flags = BTreeSet::new();
    let online = matches!(
        cfg.tester.name,
        TesterName::OnlineSigns
            | TesterName::OnlineCoeffs
            | TesterName::DispatchGeneral
            | TesterName::DispatchPrime
    );
    if let (true, Some(eps)) = (online, cfg.tester.params.epsilon) {
        let c = cfg
            .tester
            .params
            .range_constant
            .unwrap_or(DEFAULT_RANGE_CONSTANT);
        let bound = admissible_t(g, eps, c);
        if cfg.adversary.t as f64 <= bound {
            flags.insert("range_check:pass".to_string());
        } else {
            flags.insert(format!(
                "range_check:warn(t={} > {bound:.3})",
                cfg.adversary.t
            ));
        }
    }
    if outcomes.iter().any(|o| o.forced) {
        flags.insert("forced_parameters".into());
    }
    let implicit = matches!(cfg.instance.kind, InstanceKind::ImplicitPlanted { .. });
    if implicit || f.is_some_and(|f| f.noise_rate().is_some() && f.certified_distance().is_none()) {
        flags.insert("heuristic_epsilon".into());
    }
    if cfg.adversary.mode == Mode::Corruption {
        flags.insert("corruption_mode".into());
    }
    flags.into_iter().collect()
}

fn strata(
    cfg: &ExperimentConfig,
    outcomes: &[Outcome],
    fixed_eps: Option<Ratio<u64>>,
) -> Vec<Stratum> {
    let mut buckets: BTreeMap<Ratio<u64>, (u64, u64)> = BTreeMap::new();
    for o in outcomes {
        if let Some(e) = o.epsilon.or(fixed_eps) {
            let b = buckets.entry(e).or_default();
            b.0 += 1;
            b.1 += !o.accepted as u64;
        }
    }
    let points = match cfg.tester.name {
        TesterName::Signs => cfg.tester.params.k,
        _ => None,
    };
    buckets
        .into_iter()
        .map(|(epsilon, (trials, rejects))| Stratum {
            epsilon,
            trials,
            reject_count: rejects,
            reject_rate: rejects as f64 / trials as f64,
            reject_interval: wilson_interval(rejects, trials, Z95),
            soundness_floor: points.and_then(|k| {
                signs_soundness_floor(k, *epsilon.numer() as f64 / *epsilon.denom() as f64)
            }),
        })
        .collect()
}

/// Runs the experiment on the global rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (g, h) = cfg.validate()?;
    let started = Instant::now();
    let mut tester = cfg.tester.clone();
    tester.resolve(&g)?;
    let fixed = if cfg.instance.resample {
        None
    } else {
        Some(gen_instance(
            &cfg.instance.kind,
            &g,
            &h,
            &mut stream(cfg.seed, &[LABEL_INSTANCE]),
        )?)
    };
    let outcomes: Vec<Outcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, &tester, &g, &h, fixed.as_ref(), trial))
        .collect::<Result<_>>()?;

    let instance_epsilon = match &fixed {
        Some(f) => exact_epsilon(f)?.or_else(|| f.noise_rate().map(|e| e.ratio())),
        None => None,
    };
    let trials = cfg.trials;
    let accept_count = outcomes.iter().filter(|o| o.accepted).count() as u64;
    let mean =
        |field: fn(&Outcome) -> u64| outcomes.iter().map(field).sum::<u64>() as f64 / trials as f64;
    let mut algorithms = BTreeMap::new();
    for o in &outcomes {
        *algorithms.entry(o.algorithm.clone()).or_insert(0) += 1;
    }
    let mut flags = regime_flags(cfg, &g, fixed.as_ref(), &outcomes);
    let warnings: BTreeSet<&String> = outcomes.iter().flat_map(|o| &o.warnings).collect();
    flags.extend(warnings.into_iter().map(|w| format!("warning:{w}")));

    Ok(ExperimentReport {
        trials,
        accept_count,
        reject_count: trials - accept_count,
        accept_rate: accept_count as f64 / trials as f64,
        accept_interval: wilson_interval(accept_count, trials, Z95),
        mean_queries: mean(|o| o.queries),
        mean_erasures_seen: mean(|o| o.erasures),
        mean_iterations: mean(|o| o.iterations),
        unverified_rejections: outcomes.iter().filter(|o| !o.witness_holds).count() as u64,
        algorithms,
        regime_flags: flags,
        instance_epsilon,
        strata: strata(
            cfg,
            &outcomes,
            if fixed.is_some() {
                instance_epsilon
            } else {
                None
            },
        ),
        wall_time: started.elapsed().as_secs_f64(),
        config_echo: ConfigEcho {
            config: cfg.clone(),
            code_version: CODE_VERSION.to_string(),
        },
    })
}

/// Runs the experiment on a dedicated pool of `workers` threads.
pub fn run_experiment_with_workers(
    cfg: &ExperimentConfig,
    workers: usize,
) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}
