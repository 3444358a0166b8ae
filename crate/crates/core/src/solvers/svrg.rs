use super::{check_eta, check_start, Recorder, Reservoir, RunOptions, SolverOutput, StepPlan};
use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::problem::{CompositeProblem, Counting, SmoothPart};
use crate::rng::BatchSampler;

pub(crate) fn svrg_params(plan: &StepPlan) -> Result<(usize, usize)> {
    check_eta(plan.eta)?;
    let m = plan
        .epoch_len
        .filter(|&m| m > 0)
        .ok_or_else(|| Error::invalid("ProxSVRG needs a positive epoch length"))?;
    if plan.batch == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    Ok((m, plan.batch))
}

/// Runs `epochs` epochs from `x`, leaving the last iterate in `x` and
/// offering every inner iterate `x_0 … x_{m−1}` to `reservoir`.
pub(crate) fn run_epochs<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x: &mut Vec<f64>,
    plan: &StepPlan,
    epochs: u64,
    sampler: &mut impl BatchSampler,
    rec: &mut Recorder<'_, S>,
    reservoir: &mut Reservoir,
) -> Result<()> {
    let (m, b) = svrg_params(plan)?;
    let n = p.n();
    let d = x.len();
    let mut snapshot = vec![0.0; d];
    let mut g = vec![0.0; d];
    let mut v = vec![0.0; d];
    let mut next = vec![0.0; d];
    let mut idx = Vec::with_capacity(b);
    for _ in 0..epochs {
        snapshot.copy_from_slice(x);
        p.full_gradient_into(&snapshot, &mut g, Counting::Charged);
        for _ in 0..m {
            reservoir.offer(x, sampler);
            sampler.draw(n, b, &mut idx)?;
            v.copy_from_slice(&g);
            let scale = 1.0 / idx.len() as f64;
            for &i in &idx {
                p.accumulate_gradient(i, x, scale, &mut v, Counting::Charged);
                p.accumulate_gradient(i, &snapshot, -scale, &mut v, Counting::Charged);
            }
            p.forward_backward_into(x, &v, plan.eta, &mut next, Counting::Charged);
            std::mem::swap(x, &mut next);
            rec.step(x)?;
        }
    }
    Ok(())
}

/// Proximal SVRG.
///
/// Each epoch takes a full gradient at the snapshot (`n` IFO), then runs `m`
/// inner steps with the variance-reduced direction
/// `(1/b) Σ_{i∈I} (∇f_i(x) − ∇f_i(x̃)) + ∇f(x̃)` (`2b` IFO, one PO call each).
/// The next snapshot is the epoch's last iterate. `x_a` is drawn uniformly
/// from all `S·m` inner iterates; with `S = 0` it is `x⁰`.
pub fn prox_svrg<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x0: &DenseVector,
    plan: &StepPlan,
    epochs: u64,
    sampler: &mut impl BatchSampler,
    opts: &RunOptions,
) -> Result<SolverOutput> {
    svrg_params(plan)?;
    check_start(p, x0)?;
    let mut rec = Recorder::new(p, opts, "proxsvrg", sampler.seed(), plan.eta)?;
    rec.set_plan(plan.to_string());
    let mut x = x0.to_vec();
    rec.begin(&x)?;
    let mut reservoir = Reservoir::new(opts.track_hashes);
    run_epochs(p, &mut x, plan, epochs, sampler, &mut rec, &mut reservoir)?;
    let (x_a, hashes) = reservoir.take(x0);
    rec.finish(&x, x_a, hashes)
}
