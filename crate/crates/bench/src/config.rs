//! Experiment configuration: a flat `key = value` file whose keys are the
//! long CLI flag names, so any file setting can be overridden on the
//! command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{BenchError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverId {
    ProxGd,
    ProxSgd,
    ProxSvrg,
    ProxSaga,
    PlSvrg,
    PlSaga,
}

impl SolverId {
    pub const ALL: [SolverId; 6] = [
        SolverId::ProxGd,
        SolverId::ProxSgd,
        SolverId::ProxSvrg,
        SolverId::ProxSaga,
        SolverId::PlSvrg,
        SolverId::PlSaga,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverId::ProxGd => "proxgd",
            SolverId::ProxSgd => "proxsgd",
            SolverId::ProxSvrg => "proxsvrg",
            SolverId::ProxSaga => "proxsaga",
            SolverId::PlSvrg => "pl-svrg",
            SolverId::PlSaga => "pl-saga",
        }
    }

    fn is_svrg(self) -> bool {
        matches!(self, SolverId::ProxSvrg | SolverId::PlSvrg)
    }

    fn is_restarted(self) -> bool {
        matches!(self, SolverId::PlSvrg | SolverId::PlSaga)
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        SolverId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| BenchError::config(format!("unknown solver {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanMode {
    /// One sample per step, the smallest step of the family.
    Single,
    /// `b = ⌈n^{2/3}⌉` with an `n`-independent step.
    Minibatch,
    General,
    Manual,
    /// Restarted solvers on a PL problem.
    Pl,
}

impl PlanMode {
    pub fn name(self) -> &'static str {
        match self {
            PlanMode::Single => "single",
            PlanMode::Minibatch => "minibatch",
            PlanMode::General => "general",
            PlanMode::Manual => "manual",
            PlanMode::Pl => "pl",
        }
    }

    fn fits(self, solver: SolverId) -> bool {
        match self {
            PlanMode::Single | PlanMode::Minibatch | PlanMode::General | PlanMode::Manual => matches!(solver, SolverId::ProxSvrg | SolverId::ProxSaga),
            PlanMode::Pl => solver.is_restarted(),
        }
    }
}

impl FromStr for PlanMode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        [
            PlanMode::Single,
            PlanMode::Minibatch,
            PlanMode::General,
            PlanMode::Manual,
            PlanMode::Pl,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| BenchError::config(format!("unknown plan {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    /// NN-PCA on the rows of a LIBSVM file.
    Libsvm { path: PathBuf },
    /// NN-PCA on Gaussian rows.
    Synthetic { n: usize, d: usize, seed: u64 },
    /// ℓ1-regularized least squares.
    PlQuadratic { n: usize, d: usize, lambda: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Option<ProblemSpec>,
    /// Feature dimension override for LIBSVM data.
    pub dim: Option<usize>,
    /// Scale NN-PCA rows to unit norm.
    pub normalize: bool,
    pub solvers: Vec<SolverId>,
    /// `None` picks each solver's default (minibatch for ProxSVRG/ProxSAGA, pl for the restarted ones).
    pub plan: Option<PlanMode>,
    pub eta: Option<f64>,
    pub batch: Option<usize>,
    pub epoch_len: Option<usize>,
    /// Step factor for general restarted plans.
    pub rho: Option<f64>,
    pub stages: Option<u32>,
    /// ProxSGD initial step in units of `1/L`.
    pub sgd_eta0: f64,
    pub sgd_decay: f64,
    pub sgd_batch: usize,
    pub seeds: Vec<u64>,
    pub passes: f64,
    pub warm_start: bool,
    pub stride: f64,
    pub trace: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: None,
            dim: None,
            normalize: true,
            solvers: vec![SolverId::ProxSvrg],
            plan: None,
            eta: None,
            batch: None,
            epoch_len: None,
            rho: None,
            stages: None,
            sgd_eta0: 0.5,
            sgd_decay: 1.0,
            sgd_batch: 1,
            seeds: vec![1],
            passes: 20.0,
            warm_start: false,
            stride: 1.0,
            trace: None,
            svg: None,
        }
    }
}

/// Splits a config file into `(line, key, value)` triples.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| BenchError::config(format!("line {}: expected key = value", idx + 1)))?;
        out.push((idx + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| BenchError::config(format!("{key}: cannot parse {value:?}")))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(BenchError::config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

/// `1..10` (inclusive), `7`, or `1,4,9`.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    if let Some((lo, hi)) = value.split_once("..") {
        let (lo, hi): (u64, u64) = (number("seeds", lo.trim())?, number("seeds", hi.trim())?);
        if hi < lo {
            return Err(BenchError::config(format!("seeds: empty range {value:?}")));
        }
        return Ok((lo..=hi).collect());
    }
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| number("seeds", s.trim()))
        .collect()
}

/// `n=512,d=20` style parameter lists.
fn params(key: &str, value: &str, allowed: &[&str]) -> Result<Vec<(String, String)>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|part| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| BenchError::config(format!("{key}: expected name=value, got {part:?}")))?;
            let k = k.trim();
            if !allowed.contains(&k) {
                return Err(BenchError::config(format!("{key}: unknown parameter {k:?}")));
            }
            Ok((k.to_string(), v.trim().to_string()))
        })
        .collect()
}

fn required<T: FromStr>(key: &str, ps: &[(String, String)], name: &str) -> Result<T> {
    let v = ps
        .iter()
        .find(|(k, _)| k == name)
        .ok_or_else(|| BenchError::config(format!("{key}: missing {name}")))?;
    number(key, &v.1)
}

fn optional<T: FromStr>(key: &str, ps: &[(String, String)], name: &str, default: T) -> Result<T> {
    match ps.iter().find(|(k, _)| k == name) {
        Some((_, v)) => number(key, v),
        None => Ok(default),
    }
}

impl ExperimentConfig {
    /// Reads a config file's settings over the defaults.
    pub fn from_file_text(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (line, key, value) in parse_pairs(text)? {
            cfg.set(&key, &value).map_err(|e| match e {
                BenchError::Config(msg) => BenchError::config(format!("line {line}: {msg}")),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "data" => self.problem = Some(ProblemSpec::Libsvm { path: value.into() }),
            "synthetic" => {
                let ps = params(key, value, &["n", "d", "seed"])?;
                self.problem = Some(ProblemSpec::Synthetic {
                    n: required(key, &ps, "n")?,
                    d: required(key, &ps, "d")?,
                    seed: optional(key, &ps, "seed", 0)?,
                });
            }
            "pl" => {
                let ps = params(key, value, &["n", "d", "lambda", "seed"])?;
                self.problem = Some(ProblemSpec::PlQuadratic {
                    n: required(key, &ps, "n")?,
                    d: required(key, &ps, "d")?,
                    lambda: required(key, &ps, "lambda")?,
                    seed: optional(key, &ps, "seed", 0)?,
                });
            }
            "dim" => self.dim = Some(number(key, value)?),
            "normalize" => self.normalize = boolean(key, value)?,
            "solver" => {
                self.solvers = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_>>()?;
            }
            "plan" => self.plan = Some(value.parse()?),
            "eta" => self.eta = Some(number(key, value)?),
            "batch" => self.batch = Some(number(key, value)?),
            "epoch-len" => self.epoch_len = Some(number(key, value)?),
            "rho" => self.rho = Some(number(key, value)?),
            "stages" => self.stages = Some(number(key, value)?),
            "sgd-eta0" => self.sgd_eta0 = number(key, value)?,
            "sgd-decay" => self.sgd_decay = number(key, value)?,
            "sgd-batch" => self.sgd_batch = number(key, value)?,
            "seeds" => self.seeds = parse_seeds(value)?,
            "passes" => self.passes = number(key, value)?,
            "warm-start" => self.warm_start = boolean(key, value)?,
            "stride" => self.stride = number(key, value)?,
            "trace" => self.trace = Some(value.into()),
            "svg" => self.svg = Some(value.into()),
            _ => return Err(BenchError::config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn plan_for(&self, solver: SolverId) -> Option<PlanMode> {
        match (self.plan, solver) {
            (Some(p), _) => Some(p),
            (None, SolverId::ProxSvrg) => Some(PlanMode::Minibatch),
            (None, SolverId::ProxSaga) => Some(PlanMode::Minibatch),
            (None, SolverId::PlSvrg | SolverId::PlSaga) => Some(PlanMode::Pl),
            (None, _) => None,
        }
    }

    /// Checks everything that does not need the data.
    pub fn validate(&self) -> Result<()> {
        if self.problem.is_none() {
            return Err(BenchError::config("no problem given (use data, synthetic or pl)"));
        }
        if !(self.passes.is_finite() && self.passes > 0.0) {
            return Err(BenchError::config(format!("passes must be positive, got {}", self.passes)));
        }
        if !(self.stride.is_finite() && self.stride > 0.0) {
            return Err(BenchError::config(format!("stride must be positive, got {}", self.stride)));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::config("seed list is empty"));
        }
        if self.solvers.is_empty() {
            return Err(BenchError::config("solver list is empty"));
        }
        if !(self.sgd_eta0.is_finite() && self.sgd_eta0 > 0.0) {
            return Err(BenchError::config("sgd-eta0 must be positive"));
        }
        if !(self.sgd_decay.is_finite() && self.sgd_decay >= 0.0) {
            return Err(BenchError::config("sgd-decay must be nonnegative"));
        }
        if self.sgd_batch == 0 {
            return Err(BenchError::config("sgd-batch must be at least 1"));
        }
        for (i, s) in self.solvers.iter().enumerate() {
            if self.solvers[..i].contains(s) {
                return Err(BenchError::config(format!("solver {s} listed twice")));
            }
            self.validate_solver(*s)?;
        }
        Ok(())
    }

    fn validate_solver(&self, s: SolverId) -> Result<()> {
        let plan = self.plan_for(s);
        if let Some(p) = self.plan {
            if !p.fits(s) {
                return Err(BenchError::config(format!("plan {} does not apply to {s}", p.name())));
            }
        }
        let manual = plan == Some(PlanMode::Manual);
        if self.epoch_len.is_some() && !(manual && s == SolverId::ProxSvrg) {
            return Err(BenchError::config(format!(
                "epoch-len only applies to manual ProxSVRG plans, not {s}"
            )));
        }
        if self.batch.is_some() && !matches!(plan, Some(PlanMode::General | PlanMode::Manual)) {
            return Err(BenchError::config(format!("batch needs a general or manual plan for {s}")));
        }
        if self.eta.is_some() && !(manual || s == SolverId::ProxGd) {
            return Err(BenchError::config(format!("eta needs a manual plan for {s}")));
        }
        if plan == Some(PlanMode::General) && self.batch.is_none() {
            return Err(BenchError::config("general plans need batch"));
        }
        if manual && (self.eta.is_none() || self.batch.is_none()) {
            return Err(BenchError::config("manual plans need eta and batch"));
        }
        if manual && s.is_svrg() && self.epoch_len.is_none() {
            return Err(BenchError::config("manual ProxSVRG plans need epoch-len"));
        }
        if (self.rho.is_some() || self.stages.is_some()) && !s.is_restarted() {
            return Err(BenchError::config(format!("rho and stages only apply to restarted solvers, not {s}")));
        }
        if s.is_restarted() && !matches!(self.problem, Some(ProblemSpec::PlQuadratic { .. })) {
            return Err(BenchError::config(format!("{s} needs the PL testbed (pl = ...)")));
        }
        Ok(())
    }
}
