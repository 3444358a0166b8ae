//! Grid search for step sizes that are not fixed by a plan: ProxSGD's
//! `(η₀, η′)` and a manual `η` for ProxSVRG/ProxSAGA at the plan's batch
//! size and epoch length.
//!
//! Each candidate is scored by the median final objective over the
//! configured seeds; runs that diverge are dropped.

use log::info;

use crate::config::{ExperimentConfig, PlanMode, SolverId};
use crate::error::{BenchError, Result};
use crate::experiment::{load_problem, median, resolve, run_traces, Instance, Setup};

/// Step sizes tried, in units of `1/L`: powers of two from `2⁻¹⁰` to `2`.
pub const STEP_GRID: [f64; 12] = [
    1.0 / 1024.0,
    1.0 / 512.0,
    1.0 / 256.0,
    1.0 / 128.0,
    1.0 / 64.0,
    1.0 / 32.0,
    1.0 / 16.0,
    1.0 / 8.0,
    0.25,
    0.5,
    1.0,
    2.0,
];
/// ProxSGD decay rates tried.
pub const DECAY_GRID: [f64; 3] = [0.0, 0.1, 1.0];

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    /// Config settings that reproduce this candidate.
    pub settings: Vec<(String, String)>,
    /// Median final objective, `None` if any seed diverged.
    pub score: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneOutcome {
    pub solver: SolverId,
    pub best: Candidate,
    pub candidates: Vec<Candidate>,
}

impl TuneOutcome {
    /// The winning settings as config-file lines.
    pub fn config_lines(&self) -> String {
        self.best.settings.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn grid(solver: SolverId, cfg: &ExperimentConfig, inst: &Instance) -> Result<Vec<Vec<(String, String)>>> {
    let l = inst.lipschitz();
    match solver {
        SolverId::ProxSgd => Ok(STEP_GRID
            .iter()
            .flat_map(|&eta0| {
                DECAY_GRID.iter().map(move |&decay| {
                    vec![
                        ("sgd-eta0".to_string(), format!("{eta0}")),
                        ("sgd-decay".to_string(), format!("{decay}")),
                    ]
                })
            })
            .collect()),
        SolverId::ProxSvrg | SolverId::ProxSaga => {
            let (batch, epoch_len) = match resolve(cfg, solver, inst)? {
                Setup::Svrg { plan, .. } | Setup::Saga { plan, .. } => (plan.batch, plan.epoch_len),
                _ => unreachable!("resolve keeps the solver kind"),
            };
            Ok(STEP_GRID
                .iter()
                .map(|&rho| {
                    let mut s = vec![
                        ("plan".to_string(), PlanMode::Manual.name().to_string()),
                        ("eta".to_string(), format!("{:e}", rho / l)),
                        ("batch".to_string(), batch.to_string()),
                    ];
                    if let Some(m) = epoch_len {
                        s.push(("epoch-len".to_string(), m.to_string()));
                    }
                    s
                })
                .collect())
        }
        other => Err(BenchError::config(format!("{other} has no tunable step size"))),
    }
}

fn score(cfg: &ExperimentConfig, inst: &Instance) -> Result<Option<f64>> {
    match run_traces(cfg, inst, None) {
        Ok(traces) => {
            let finals: Vec<f64> = traces.iter().filter_map(|t| t.last()).map(|r| r.objective).collect();
            Ok(median(&finals))
        }
        Err(BenchError::Diverged { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Tries every grid point for the single configured solver.
pub fn tune(cfg: &ExperimentConfig) -> Result<TuneOutcome> {
    cfg.validate()?;
    let [solver] = cfg.solvers[..] else {
        return Err(BenchError::config("tuning needs exactly one solver"));
    };
    let inst = load_problem(cfg)?;
    let mut candidates = Vec::new();
    for settings in grid(solver, cfg, &inst)? {
        let mut trial = cfg.clone();
        trial.plan = None;
        trial.batch = None;
        trial.epoch_len = None;
        for (k, v) in &settings {
            trial.set(k, v)?;
        }
        let score = score(&trial, &inst)?;
        info!("{solver} {settings:?}: {score:?}");
        candidates.push(Candidate { settings, score });
    }
    let best = candidates
        .iter()
        .filter(|c| c.score.is_some())
        .min_by(|a, b| a.score.unwrap().total_cmp(&b.score.unwrap()))
        .cloned()
        .ok_or(BenchError::Empty("every tuning candidate diverged"))?;
    Ok(TuneOutcome {
        solver,
        best,
        candidates,
    })
}
