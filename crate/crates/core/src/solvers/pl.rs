//! Restarted ProxSVRG / ProxSAGA for problems satisfying the proximal PL
//! inequality: each stage restarts the inner solver from the previous
//! stage's random output.

use super::saga::{run_iterations, saga_params, GradientTable};
use super::svrg::{run_epochs, svrg_params};
use super::{check_start, Recorder, Reservoir, RunOptions, SolverOutput, StepPlan};
use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::problem::{CompositeProblem, SmoothPart};
use crate::rng::BatchSampler;

fn stage_iterations(plan: &StepPlan) -> Result<u64> {
    plan.iterations
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::invalid("restarted solvers need a positive per-stage iteration count"))
}

/// `stages` rounds of ProxSVRG, each `⌈T/m⌉` epochs, chained through `x_a`.
///
/// Both outputs are the final stage's `x_a`; `stages = 0` returns `x⁰`.
pub fn pl_svrg<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x0: &DenseVector,
    plan: &StepPlan,
    stages: u32,
    sampler: &mut impl BatchSampler,
    opts: &RunOptions,
) -> Result<SolverOutput> {
    let (m, _) = svrg_params(plan)?;
    let t = stage_iterations(plan)?;
    check_start(p, x0)?;
    let epochs = t.div_ceil(m as u64);
    let mut rec = Recorder::new(p, opts, "pl-svrg", sampler.seed(), plan.eta)?;
    rec.set_plan(format!("{plan} K={stages}"));
    let mut x = x0.to_vec();
    rec.begin(&x)?;
    let mut hashes = Vec::new();
    for _ in 0..stages {
        let mut reservoir = Reservoir::new(opts.track_hashes);
        let start = x.clone();
        run_epochs(p, &mut x, plan, epochs, sampler, &mut rec, &mut reservoir)?;
        let (x_a, h) = reservoir.take(&start);
        hashes = h;
        x = x_a;
    }
    rec.finish(&x, x.clone(), hashes)
}

/// `stages` rounds of ProxSAGA with `T` iterations each. Every stage builds a
/// fresh table at its starting point.
pub fn pl_saga<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x0: &DenseVector,
    plan: &StepPlan,
    stages: u32,
    sampler: &mut impl BatchSampler,
    opts: &RunOptions,
) -> Result<SolverOutput> {
    saga_params(plan)?;
    let t = stage_iterations(plan)?;
    check_start(p, x0)?;
    let mut rec = Recorder::new(p, opts, "pl-saga", sampler.seed(), plan.eta)?;
    rec.set_plan(format!("{plan} K={stages}"));
    let mut x = x0.to_vec();
    rec.begin(&x)?;
    let mut hashes = Vec::new();
    for _ in 0..stages {
        let mut reservoir = Reservoir::new(opts.track_hashes);
        let start = x.clone();
        let mut table = GradientTable::build(p, &x);
        run_iterations(p, &mut x, &mut table, plan, t, sampler, &mut rec, &mut reservoir)?;
        let (x_a, h) = reservoir.take(&start);
        hashes = h;
        x = x_a;
    }
    rec.finish(&x, x.clone(), hashes)
}
