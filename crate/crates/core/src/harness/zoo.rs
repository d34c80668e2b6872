//! The completeness matrix: every tester on homomorphisms of every zoo pair
//! under every erasure strategy.

use super::{run_experiment, AdversaryConfig, ExperimentConfig, InstanceConfig};
use crate::function::InstanceKind;
use crate::oracle::{Mode, Schedule, StrategySpec};
use crate::testers::{Overrides, TesterName, TesterParams, TesterSpec};
use crate::{Epsilon, GroupSpec, Result};
use serde::Serialize;

pub const ZOO_T: [u64; 3] = [0, 1, 4];

/// Domain/codomain pairs of the matrix. The last pair only exists so the
/// zero test has something to run on.
pub fn zoo_pairs() -> Vec<(&'static str, &'static str)> {
    vec![
        ("Z5", "Z5"),
        ("Z6", "Z4"),
        ("F2^8", "F2"),
        ("F3^4", "F3^2"),
        ("S4", "Z2"),
        ("D4", "Z2"),
        ("F2^16", "Z6"),
        ("Z2", "Z3"),
    ]
}

pub fn zoo_strategies(g: &GroupSpec) -> Vec<StrategySpec> {
    [
        StrategySpec::Null,
        StrategySpec::Uniform,
        StrategySpec::SumHunter { w: 2 },
        StrategySpec::SpanEraser,
    ]
    .into_iter()
    .filter(|s| s.applies_to(g))
    .collect()
}

/// Desk-scale parameters: `k = 4`, `m = 8`, `ε = 1/4`, online wrappers forced to `m = 8`.
pub fn zoo_tester(name: TesterName) -> TesterSpec {
    let quarter = Epsilon::new(1, 4).expect("constant");
    let mut p = TesterParams::default();
    match name {
        TesterName::Signs | TesterName::FixedSigns | TesterName::Coeffs => p.k = Some(4),
        TesterName::UnpredictableSigns | TesterName::UnpredictableCoeffs => p.m = Some(8),
        TesterName::OnlineSigns
        | TesterName::OnlineCoeffs
        | TesterName::DispatchGeneral
        | TesterName::DispatchPrime => {
            p.epsilon = Some(quarter);
            p.overrides = Overrides {
                force_m: Some(8),
                ..Overrides::default()
            };
        }
        TesterName::GrSample | TesterName::GeneratedSubgroup | TesterName::Zero => {
            p.epsilon = Some(quarter)
        }
    }
    TesterSpec::new(name, p)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZooCell {
    pub domain: String,
    pub codomain: String,
    pub tester: String,
    pub strategy: String,
    pub t: u64,
    pub trials: u64,
    pub accepted: u64,
    pub wall_time: f64,
}

impl ZooCell {
    pub fn passed(&self) -> bool {
        self.accepted == self.trials
    }
}

/// Runs every applicable cell with `trials` trials each.
pub fn completeness_matrix(trials: u64, seed: u64) -> Result<Vec<ZooCell>> {
    let pairs = zoo_pairs();
    let last = pairs.len() - 1;
    let mut cells = Vec::new();
    for (i, (gs, hs)) in pairs.into_iter().enumerate() {
        let g: GroupSpec = gs.parse()?;
        let h: GroupSpec = hs.parse()?;
        for name in TesterName::ALL {
            let wanted = if i == last {
                name == TesterName::Zero
            } else {
                name != TesterName::Zero
            };
            if !wanted || !name.applies_to(&g, &h) {
                continue;
            }
            for strategy in zoo_strategies(&g) {
                for t in ZOO_T {
                    let cfg = ExperimentConfig {
                        group_domain: gs.into(),
                        group_codomain: hs.into(),
                        instance: InstanceConfig {
                            kind: InstanceKind::RandomHom,
                            resample: false,
                        },
                        tester: zoo_tester(name),
                        adversary: AdversaryConfig {
                            strategy: strategy.clone(),
                            mode: Mode::Erasure,
                            schedule: Schedule::BudgetManaging,
                            t,
                        },
                        trials,
                        seed,
                        output: None,
                    };
                    let r = run_experiment(&cfg)?;
                    cells.push(ZooCell {
                        domain: gs.into(),
                        codomain: hs.into(),
                        tester: name.as_str().into(),
                        strategy: strategy.label(),
                        t,
                        trials,
                        accepted: r.accept_count,
                        wall_time: r.wall_time,
                    });
                }
            }
        }
    }
    Ok(cells)
}
