//! Multi-seed runs of a configuration and their per-solver median curves.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use log::{info, warn};
use proxvr::data::{normalize_rows, parse_libsvm};
use proxvr::metrics::proxgd_baseline;
use proxvr::problem::{
    grid_optimum_2d, make_pl_quadratic, make_synthetic_nnpca, NnPca, NnPcaProblem, PlQuadraticProblem,
};
use proxvr::solvers::{
    ceil_guarded, plan_manual, plan_pl, plan_saga, plan_svrg, pl_saga, pl_svrg, prox_gd, prox_saga, prox_saga_from,
    prox_sgd, prox_svrg, warm_start, PlRule, RunOptions, SagaMode, SgdSchedule, SvrgMode,
};
use proxvr::{CompositeProblem, Counting, DenseVector, ProxOperator, RngStream, RunTrace, SmoothPart, StepPlan};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, PlanMode, ProblemSpec, SolverId};
use crate::error::{BenchError, Result};

/// Random starts and iterations for the ProxGD suboptimality baseline.
const BASELINE_STARTS: usize = 5;
const BASELINE_ITERATIONS: u64 = 10_000;

pub enum Instance {
    NnPca(NnPcaProblem),
    PlQuadratic(PlQuadraticProblem),
}

macro_rules! with_problem {
    ($inst:expr, $p:ident => $body:expr) => {
        match $inst {
            Instance::NnPca($p) => $body,
            Instance::PlQuadratic($p) => $body,
        }
    };
}

impl Instance {
    pub fn n(&self) -> usize {
        with_problem!(self, p => p.n())
    }

    pub fn dim(&self) -> usize {
        with_problem!(self, p => p.dim())
    }

    pub fn lipschitz(&self) -> f64 {
        with_problem!(self, p => p.lipschitz())
    }

    fn pl_modulus(&self) -> Option<f64> {
        match self {
            Instance::NnPca(_) => None,
            Instance::PlQuadratic(p) => Some(p.smooth().pl_modulus()),
        }
    }
}

fn read_dataset(path: &Path, cfg: &ExperimentConfig) -> Result<NnPcaProblem> {
    let data_err = |source| BenchError::Data {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut ds = parse_libsvm(BufReader::new(file)).map_err(|e| match e {
        proxvr::Error::Io(io) => BenchError::io(path, io),
        other => data_err(other),
    })?;
    if let Some(d) = cfg.dim {
        ds = ds.with_dim(d).map_err(data_err)?;
    }
    if cfg.normalize {
        ds = normalize_rows(&ds).map_err(data_err)?;
    }
    let smooth = NnPca::from_dataset(&ds).map_err(data_err)?;
    Ok(CompositeProblem::new(smooth, ProxOperator::ball_nonneg(1.0)?)?)
}

pub fn load_problem(cfg: &ExperimentConfig) -> Result<Instance> {
    match cfg.problem.as_ref().ok_or_else(|| BenchError::config("no problem given"))? {
        ProblemSpec::Libsvm { path } => Ok(Instance::NnPca(read_dataset(path, cfg)?)),
        &ProblemSpec::Synthetic { n, d, seed } => Ok(Instance::NnPca(make_synthetic_nnpca(
            &mut RngStream::new(seed),
            n,
            d,
            cfg.normalize,
        )?)),
        &ProblemSpec::PlQuadratic { n, d, lambda, seed } => Ok(Instance::PlQuadratic(make_pl_quadratic(
            &mut RngStream::new(seed),
            n,
            d,
            lambda,
        )?)),
    }
}

/// Common start for every run: `prox_h(𝟙/√d)`. The origin is a stationary
/// point of NN-PCA, so it would be a useless start there.
pub fn start_point<S: SmoothPart>(p: &CompositeProblem<S>) -> Result<DenseVector> {
    let d = p.dim();
    let ones = DenseVector::new(vec![1.0 / (d as f64).sqrt(); d])?;
    Ok(p.prox(&ones, 1.0, Counting::Measurement)?)
}

fn compute_baseline(inst: &Instance) -> Result<f64> {
    let value = match inst {
        Instance::NnPca(p) if p.dim() == 2 => grid_optimum_2d(p)?.1,
        Instance::NnPca(p) => proxgd_baseline(p, 0, BASELINE_STARTS, BASELINE_ITERATIONS)?.1,
        Instance::PlQuadratic(p) => proxgd_baseline(p, 0, 1, BASELINE_ITERATIONS)?.1,
    };
    Ok(value)
}

fn cache_path(data: &Path) -> PathBuf {
    let mut name = data.as_os_str().to_owned();
    name.push(".fhat");
    PathBuf::from(name)
}

fn cache_key(inst: &Instance, cfg: &ExperimentConfig) -> String {
    format!("n={} dim={} normalize={}", inst.n(), inst.dim(), cfg.normalize)
}

/// Reads `<data>.fhat` if it was written for the same preprocessing.
fn cached_baseline(path: &Path, key: &str) -> Option<f64> {
    let text = std::fs::read_to_string(path).ok()?;
    let (stored_key, value) = text.trim().rsplit_once(" fhat=")?;
    (stored_key == key).then(|| value.parse().ok()).flatten()
}

/// Suboptimality baseline `F̂`: the exact grid optimum for two-dimensional
/// NN-PCA, otherwise the best of several long ProxGD runs. LIBSVM baselines
/// are cached beside the data file.
pub fn baseline(inst: &Instance, cfg: &ExperimentConfig) -> Result<f64> {
    let Some(ProblemSpec::Libsvm { path }) = &cfg.problem else {
        return compute_baseline(inst);
    };
    let cache = cache_path(path);
    let key = cache_key(inst, cfg);
    if let Some(v) = cached_baseline(&cache, &key) {
        info!("using cached baseline {v:e} from {}", cache.display());
        return Ok(v);
    }
    let v = compute_baseline(inst)?;
    if let Err(e) = std::fs::write(&cache, format!("{key} fhat={v:e}\n")) {
        warn!("could not cache baseline at {}: {e}", cache.display());
    }
    Ok(v)
}

/// A solver with every parameter fixed.
#[derive(Clone, Debug, PartialEq)]
pub enum Setup {
    Gd { eta: f64, iterations: u64 },
    Sgd { schedule: SgdSchedule, batch: usize, iterations: u64 },
    Svrg { plan: StepPlan, epochs: u64, warm: bool },
    Saga { plan: StepPlan, iterations: u64, warm: bool },
    PlSvrg { plan: StepPlan, stages: u32 },
    PlSaga { plan: StepPlan, stages: u32 },
}

fn checked_plan(cfg: &ExperimentConfig, n: usize, l: f64, svrg: bool) -> Result<StepPlan> {
    let plan = match (cfg.plan.unwrap_or(PlanMode::Minibatch), svrg) {
        (PlanMode::Single, true) => plan_svrg(n, 1, l, SvrgMode::Single)?,
        (PlanMode::Minibatch, true) => plan_svrg(n, 1, l, SvrgMode::Minibatch)?,
        (PlanMode::General, true) => plan_svrg(n, cfg.batch.unwrap_or(1), l, SvrgMode::General)?,
        (PlanMode::Single, false) => plan_saga(n, 1, l, SagaMode::Single)?,
        (PlanMode::Minibatch, false) => plan_saga(n, 1, l, SagaMode::Minibatch)?,
        (PlanMode::General, false) => plan_saga(n, cfg.batch.unwrap_or(1), l, SagaMode::General)?,
        (PlanMode::Manual, _) => {
            let eta = cfg.eta.ok_or_else(|| BenchError::config("manual plans need eta"))?;
            let batch = cfg.batch.ok_or_else(|| BenchError::config("manual plans need batch"))?;
            let epoch_len = if svrg { cfg.epoch_len } else { None };
            let (plan, warnings) = plan_manual(n, l, eta, batch, epoch_len)?;
            for w in warnings {
                warn!("manual plan: {w}");
            }
            plan
        }
        (mode, _) => {
            return Err(BenchError::config(format!("plan {} does not fit this solver", mode.name())));
        }
    };
    Ok(plan)
}

fn count(x: f64) -> u64 {
    if x <= 0.0 {
        0
    } else {
        ceil_guarded(x)
    }
}

/// Turns the config into concrete parameters for `solver`. The pass budget
/// covers warm-up and table-building work.
pub fn resolve(cfg: &ExperimentConfig, solver: SolverId, inst: &Instance) -> Result<Setup> {
    let (n, l) = (inst.n(), inst.lipschitz());
    let nf = n as f64;
    let budget = cfg.passes * nf;
    let setup = match solver {
        SolverId::ProxGd => Setup::Gd {
            eta: cfg.eta.unwrap_or(1.0 / l),
            iterations: count(cfg.passes),
        },
        SolverId::ProxSgd => Setup::Sgd {
            schedule: SgdSchedule {
                eta0: cfg.sgd_eta0 / l,
                decay: cfg.sgd_decay,
            },
            batch: cfg.sgd_batch,
            iterations: count(budget / cfg.sgd_batch as f64),
        },
        SolverId::ProxSvrg => {
            let plan = checked_plan(cfg, n, l, true)?;
            let m = plan.epoch_len.unwrap_or(1) as f64;
            let spent = if cfg.warm_start { nf } else { 0.0 };
            Setup::Svrg {
                epochs: count((budget - spent) / (nf + 2.0 * m * plan.batch as f64)),
                plan,
                warm: cfg.warm_start,
            }
        }
        SolverId::ProxSaga => {
            let plan = checked_plan(cfg, n, l, false)?;
            Setup::Saga {
                iterations: count((budget - nf) / (2.0 * plan.batch as f64)),
                plan,
                warm: cfg.warm_start,
            }
        }
        SolverId::PlSvrg | SolverId::PlSaga => {
            let mu = inst
                .pl_modulus()
                .ok_or_else(|| BenchError::config(format!("{solver} needs the PL testbed")))?;
            let rule = cfg.rho.map_or(PlRule::Default, |rho| PlRule::General { rho });
            let svrg = solver == SolverId::PlSvrg;
            let plan = plan_pl(n, l, mu, rule, svrg)?;
            let t = plan.iterations.unwrap_or(1);
            let stage_cost = match plan.epoch_len {
                Some(m) => t.div_ceil(m as u64) as f64 * (nf + 2.0 * (m * plan.batch) as f64),
                None => nf + 2.0 * (plan.batch as u64 * t) as f64,
            };
            let stages = match cfg.stages {
                Some(k) => k,
                None => u32::try_from(count(budget / stage_cost).max(1))
                    .map_err(|_| BenchError::config("pass budget needs too many stages"))?,
            };
            if svrg {
                Setup::PlSvrg { plan, stages }
            } else {
                Setup::PlSaga { plan, stages }
            }
        }
    };
    Ok(setup)
}

/// One seeded run on a private copy of the problem.
pub fn run_seed<S: SmoothPart + Clone>(
    shared: &CompositeProblem<S>,
    setup: &Setup,
    stride: f64,
    seed: u64,
    f_hat: Option<f64>,
) -> Result<RunTrace> {
    let p = shared.fresh_copy();
    let mut rng = RngStream::new(seed);
    let x0 = start_point(&p)?;
    let opts = RunOptions {
        stride: Some(stride),
        f_star: f_hat,
        origin: Some(p.counters()),
        ..Default::default()
    };
    let diverged = |e: proxvr::Error| match e {
        e @ proxvr::Error::Diverged { .. } => BenchError::Diverged { seed, source: e },
        other => BenchError::Solver(other),
    };
    let out = match setup {
        Setup::Gd { eta, iterations } => prox_gd(&p, &x0, *eta, *iterations, &opts),
        Setup::Sgd {
            schedule,
            batch,
            iterations,
        } => prox_sgd(&p, &x0, *schedule, *batch, *iterations, &mut rng, &opts),
        Setup::Svrg { plan, epochs, warm } => {
            let start = if *warm {
                warm_start(&p, &x0, plan.eta, &mut rng).map_err(diverged)?.x
            } else {
                x0
            };
            prox_svrg(&p, &start, plan, *epochs, &mut rng, &opts).map(|mut out| {
                if *warm {
                    out.trace.meta.plan.push_str(" warm");
                }
                out
            })
        }
        Setup::Saga { plan, iterations, warm } => {
            if *warm {
                let w = warm_start(&p, &x0, plan.eta, &mut rng).map_err(diverged)?;
                prox_saga_from(&p, &w.x, w.table, plan, *iterations, &mut rng, &opts)
            } else {
                prox_saga(&p, &x0, plan, *iterations, &mut rng, &opts)
            }
        }
        Setup::PlSvrg { plan, stages } => pl_svrg(&p, &x0, plan, *stages, &mut rng, &opts),
        Setup::PlSaga { plan, stages } => pl_saga(&p, &x0, plan, *stages, &mut rng, &opts),
    }
    .map_err(diverged)?;
    Ok(out.trace)
}

/// Runs every configured solver over every seed, seeds in parallel. Traces
/// come back grouped by solver, seeds in configuration order.
pub fn run_traces(cfg: &ExperimentConfig, inst: &Instance, f_hat: Option<f64>) -> Result<Vec<RunTrace>> {
    let mut traces = Vec::with_capacity(cfg.solvers.len() * cfg.seeds.len());
    for &solver in &cfg.solvers {
        let setup = resolve(cfg, solver, inst)?;
        info!("{solver}: {setup:?}");
        let runs: Vec<RunTrace> = with_problem!(inst, p => cfg
            .seeds
            .par_iter()
            .map(|&seed| run_seed(p, &setup, cfg.stride, seed, f_hat))
            .collect::<Result<_>>()?);
        traces.extend(runs);
    }
    Ok(traces)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub passes: f64,
    pub subopt: f64,
}

/// Median curve of one solver.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub solver: String,
    pub points: Vec<CurvePoint>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub curves: Vec<Curve>,
}

impl Summary {
    pub fn curve(&self, solver: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.solver == solver)
    }
}

/// Median with the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

fn solver_order(traces: &[RunTrace]) -> Vec<&str> {
    let mut names: Vec<&str> = Vec::new();
    for t in traces {
        if !names.contains(&t.meta.solver.as_str()) {
            names.push(&t.meta.solver);
        }
    }
    names
}

/// Per-solver medians across seeds, checkpoint by checkpoint, over the
/// checkpoints every seed reached. Checkpoints without a suboptimality are
/// skipped.
pub fn summarize(traces: &[RunTrace]) -> Summary {
    let curves = solver_order(traces)
        .into_iter()
        .map(|solver| {
            let group: Vec<&RunTrace> = traces.iter().filter(|t| t.meta.solver == solver).collect();
            let len = group.iter().map(|t| t.len()).min().unwrap_or(0);
            let points = (0..len)
                .filter_map(|k| {
                    let passes: Vec<f64> = group.iter().map(|t| t.records()[k].passes).collect();
                    let subopt: Option<Vec<f64>> = group.iter().map(|t| t.records()[k].subopt).collect();
                    Some(CurvePoint {
                        passes: median(&passes)?,
                        subopt: median(&subopt?)?,
                    })
                })
                .collect();
            Curve {
                solver: solver.to_string(),
                points,
            }
        })
        .collect();
    Summary { curves }
}

/// Median over seeds of the last checkpoint's suboptimality.
pub fn final_median_subopt(traces: &[RunTrace], solver: &str) -> Option<f64> {
    let finals: Option<Vec<f64>> = traces
        .iter()
        .filter(|t| t.meta.solver == solver)
        .map(|t| t.last().and_then(|r| r.subopt))
        .collect();
    median(&finals?)
}

pub struct ExperimentResult {
    pub traces: Vec<RunTrace>,
    pub summary: Summary,
    pub f_hat: f64,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let inst = load_problem(cfg)?;
    let f_hat = baseline(&inst, cfg)?;
    info!("baseline F = {f_hat:e}");
    let traces = run_traces(cfg, &inst, Some(f_hat))?;
    let summary = summarize(&traces);
    Ok(ExperimentResult { traces, summary, f_hat })
}
