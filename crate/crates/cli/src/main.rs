//! `homtest`: run experiments, the completeness matrix and the analysis probes.
//!
//! Exit status: 0 on success, 1 when a matrix cell fails, 2 on bad input.

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use homtest_core::analysis::{
    binomial_even_probability, flatness_probe, linear_independence_bound,
    linear_independence_exact, zeta_partial_sum, zeta_upper_bound, FlatnessConfig, ProbeVariant,
};
use homtest_core::group::{estimate_e, exact_e};
use homtest_core::harness::{
    completeness_matrix, lowerbound_demo, run_experiment, run_experiment_with_workers,
    unit_vectors_then_sum, ExperimentConfig,
};
use homtest_core::rng::stream;
use homtest_core::GroupSpec;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "homtest",
    version,
    about = "Group homomorphism testing under online manipulations"
)]
struct Cli {
    /// Default seed for every subcommand.
    #[arg(long, global = true, env = "HOMTEST_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Signs,
    Coefficients,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config, or from flags.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Append the report to this JSONL file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, requires = "codomain")]
        domain: Option<String>,
        #[arg(long)]
        codomain: Option<String>,
        #[arg(long, default_value = "signs")]
        tester: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        epsilon: Option<String>,
        /// random_hom, shifted_hom, random_function, planted_far, implicit_planted
        #[arg(long, default_value = "random_hom")]
        instance: String,
        /// Noise rate for planted instances.
        #[arg(long)]
        instance_epsilon: Option<String>,
        #[arg(long)]
        resample: bool,
        /// null, uniform, sum_hunter, span_eraser
        #[arg(long, default_value = "null")]
        strategy: String,
        #[arg(long, default_value = "erasure")]
        mode: String,
        #[arg(long, default_value = "fixed_rate")]
        schedule: String,
        #[arg(long, default_value_t = 0)]
        t: u64,
    },
    /// Completeness matrix over the group zoo.
    Zoo {
        /// 200 trials per cell instead of 10^4.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Flatness of the last query of the unpredictable tests.
    ProbeFlatness {
        #[arg(long, default_value = "F2^24")]
        group: String,
        #[arg(long, value_enum, default_value = "signs")]
        variant: Variant,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        x_draws: u64,
        #[arg(long, default_value_t = 4000)]
        tuple_draws: u64,
        /// Per-draw masses as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Expected number of uniform draws until the sample generates the group.
    EstimateE {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.0833333333333333")]
        beta: Vec<f64>,
    },
    /// Answer-string distributions on random homomorphisms vs random functions
    /// of F_p^n -> F_p under the span eraser.
    LowerboundDemo {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        t: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Query points such as `(1,0,0)`; defaults to e1, e2, e1+e2.
        #[arg(long, num_args = 1..)]
        queries: Vec<String>,
    },
    /// Binomial parity, zeta and linear-independence evaluations.
    Formulas,
}

/// An error that means "the matrix ran and something failed".
#[derive(Debug)]
struct MatrixFailure(usize);

impl std::fmt::Display for MatrixFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} matrix cells failed", self.0)
    }
}

impl std::error::Error for MatrixFailure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<MatrixFailure>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn group(s: &str) -> Result<GroupSpec> {
    s.parse().map_err(|e| anyhow!("`{s}`: {e}"))
}

fn dispatch(cli: Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Run {
            config,
            out,
            trials,
            workers,
            domain,
            codomain,
            tester,
            k,
            m,
            epsilon,
            instance,
            instance_epsilon,
            resample,
            strategy,
            mode,
            schedule,
            t,
        } => {
            let mut cfg = match (config, domain, codomain) {
                (Some(path), _, _) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    ExperimentConfig::from_json(&text)?
                }
                (None, Some(domain), Some(codomain)) => {
                    let mut tester_json = json!({ "name": tester });
                    for (key, v) in [
                        ("k", k.map(|x| json!(x))),
                        ("m", m.map(|x| json!(x))),
                        ("epsilon", epsilon.map(|x| json!(x))),
                    ] {
                        if let Some(v) = v {
                            tester_json[key] = v;
                        }
                    }
                    let mut instance_json = json!({ "kind": instance, "resample": resample });
                    if let Some(e) = instance_epsilon {
                        instance_json["epsilon"] = json!(e);
                    }
                    let value = json!({
                        "group_domain": domain,
                        "group_codomain": codomain,
                        "instance": instance_json,
                        "tester": tester_json,
                        "adversary": { "name": strategy, "mode": mode, "schedule": schedule, "t": t },
                        "trials": trials.unwrap_or(1000),
                        "seed": seed,
                    });
                    ExperimentConfig::from_json(&value.to_string())?
                }
                _ => return Err(anyhow!("run needs --config or --domain and --codomain")),
            };
            if let Some(n) = trials {
                cfg.trials = n;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let report = match workers {
                Some(w) => run_experiment_with_workers(&cfg, w)?,
                None => run_experiment(&cfg)?,
            };
            println!("{}", serde_json::to_string(&report)?);
            if let Some(path) = out.or_else(|| cfg.output.as_ref().map(|o| o.path.clone())) {
                report.append_jsonl(&path)?;
            }
            Ok(())
        }
        Command::Zoo { quick, trials } => {
            let trials = trials.unwrap_or(if quick { 200 } else { 10_000 });
            let cells = completeness_matrix(trials, seed)?;
            let failed = cells.iter().filter(|c| !c.passed()).count();
            for c in &cells {
                println!(
                    "{}\t{} -> {}\t{}\t{}\tt={}\t{}/{}\t{:.2}s",
                    if c.passed() { "ok" } else { "FAIL" },
                    c.domain,
                    c.codomain,
                    c.tester,
                    c.strategy,
                    c.t,
                    c.accepted,
                    c.trials,
                    c.wall_time
                );
            }
            println!("{} cells, {} failed", cells.len(), failed);
            if failed > 0 {
                return Err(MatrixFailure(failed).into());
            }
            Ok(())
        }
        Command::ProbeFlatness {
            group: gs,
            variant,
            m,
            x_draws,
            tuple_draws,
            csv,
        } => {
            let g = group(&gs)?;
            let cfg = FlatnessConfig {
                variant: match variant {
                    Variant::Signs => ProbeVariant::Signs,
                    Variant::Coefficients => ProbeVariant::Coefficients,
                },
                m,
                x_draws,
                tuple_draws,
                agreement_k: 0,
            };
            let report = flatness_probe(&g, None, &cfg, &mut stream(seed, &[]))?;
            if let Some(path) = csv {
                let file = std::fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                report.write_csv(file)?;
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
        Command::EstimateE {
            group: gs,
            trials,
            beta,
        } => {
            let g = group(&gs)?;
            let stats = estimate_e(&g, trials, &beta, &mut stream(seed, &[]))?;
            let value = json!({ "group": gs, "exact": exact_e(&g), "estimate": stats });
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(())
        }
        Command::LowerboundDemo {
            p,
            n,
            t,
            trials,
            queries,
        } => {
            let g = GroupSpec::vector_space(p, n)?;
            let points = if queries.is_empty() {
                unit_vectors_then_sum(&g, 2.min(n as usize))?
            } else {
                queries
                    .iter()
                    .map(|q| g.parse_element(q.trim()))
                    .collect::<Result<_, _>>()?
            };
            let r = lowerbound_demo(p, n, t, &points, trials, seed)?;
            println!(
                "domain {}  t {}  queries [{}]  trials {}",
                r.domain,
                r.t,
                r.queries.join(", "),
                r.trials
            );
            println!(
                "distinct answer strings: D+ {}  D- {}",
                r.plus.counts.len(),
                r.minus.counts.len()
            );
            println!("total variation distance: {:.5}", r.total_variation);
            Ok(())
        }
        Command::Formulas => {
            let ps = [0.0, 0.25, 0.5, 0.75, 1.0];
            let mut parity = Vec::new();
            for n in 0..=12u32 {
                for p in ps {
                    parity
                        .push(json!({ "n": n, "p": p, "even": binomial_even_probability(n, p)? }));
                }
            }
            let mut zeta = Vec::new();
            for x in [2.0, 2.5, 3.0, 4.0] {
                let (sum, tail) = zeta_partial_sum(x, 100_000)?;
                zeta.push(json!({ "x": x, "partial_sum": sum, "tail_bound": tail, "upper_bound": zeta_upper_bound(x)? }));
            }
            let mut independence = Vec::new();
            for (p, n) in [(2u64, 4u32), (2, 8), (3, 6), (5, 4)] {
                independence.push(json!({
                    "p": p,
                    "n": n,
                    "exact": linear_independence_exact(p, n, n.div_ceil(2)),
                    "bound": linear_independence_bound(p, n),
                }));
            }
            let value = json!({ "binomial_parity": parity, "zeta": zeta, "linear_independence": independence });
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(())
        }
    }
}
