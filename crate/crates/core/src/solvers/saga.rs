use super::{check_eta, check_start, Recorder, Reservoir, RunOptions, SolverOutput, StepPlan};
use crate::error::{Error, Result};
use crate::linalg::{all_finite, DenseVector};
use crate::problem::{CompositeProblem, Counting, SmoothPart};
use crate::rng::BatchSampler;

/// Stored component gradients `∇f_i(α_i)` and their running mean.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientTable {
    grads: Vec<f64>,
    mean: Vec<f64>,
    n: usize,
    dim: usize,
}

impl GradientTable {
    /// Every row evaluated at `x`; costs `n` IFO calls.
    pub fn build<S: SmoothPart>(p: &CompositeProblem<S>, x: &[f64]) -> Self {
        let (n, dim) = (p.n(), p.dim());
        let mut grads = vec![0.0; n * dim];
        for (i, row) in grads.chunks_exact_mut(dim).enumerate() {
            p.accumulate_gradient(i, x, 1.0, row, Counting::Charged);
        }
        Self::with_mean(grads, n, dim)
    }

    /// A table from explicit rows (row-major `n × dim`).
    pub fn from_rows(grads: Vec<f64>, n: usize, dim: usize) -> Result<Self> {
        if n == 0 || dim == 0 || grads.len() != n * dim {
            return Err(Error::invalid(format!(
                "gradient table needs {n} x {dim} entries, got {}",
                grads.len()
            )));
        }
        if !all_finite(&grads) {
            return Err(Error::invalid("gradient table has non-finite entries"));
        }
        Ok(Self::with_mean(grads, n, dim))
    }

    fn with_mean(grads: Vec<f64>, n: usize, dim: usize) -> Self {
        let mut t = GradientTable {
            grads,
            mean: vec![0.0; dim],
            n,
            dim,
        };
        t.recompute_mean();
        t
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.grads[i * self.dim..(i + 1) * self.dim]
    }

    /// `(1/n) Σ_i ∇f_i(α_i)`, maintained incrementally.
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Overwrites row `i` and moves the mean by `(new − old)/n`.
    pub(crate) fn replace(&mut self, i: usize, new: &[f64]) {
        let inv_n = 1.0 / self.n as f64;
        let row = &mut self.grads[i * self.dim..(i + 1) * self.dim];
        for ((r, m), g) in row.iter_mut().zip(&mut self.mean).zip(new) {
            *m += (g - *r) * inv_n;
            *r = *g;
        }
    }

    /// Resets the mean from the rows; returns the largest correction.
    pub(crate) fn recompute_mean(&mut self) -> f64 {
        let mut fresh = vec![0.0; self.dim];
        for row in self.grads.chunks_exact(self.dim) {
            for (f, g) in fresh.iter_mut().zip(row) {
                *f += g;
            }
        }
        let inv_n = 1.0 / self.n as f64;
        let mut drift = 0.0f64;
        for (m, f) in self.mean.iter_mut().zip(fresh) {
            let f = f * inv_n;
            drift = drift.max((*m - f).abs());
            *m = f;
        }
        drift
    }
}

/// The result of the ProxSGD warm-up: a start point and a gradient table
/// filled from the gradients the warm-up evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct WarmStart {
    pub x: DenseVector,
    /// Row `i` holds the latest `∇f_i` seen during warm-up, zero if `i` was
    /// never drawn.
    pub table: GradientTable,
}

/// `n` ProxSGD steps with `b = 1` and constant step `eta` from `x0`.
///
/// Costs `n` IFO and `n` PO calls.
pub fn warm_start<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x0: &DenseVector,
    eta: f64,
    sampler: &mut impl BatchSampler,
) -> Result<WarmStart> {
    check_eta(eta)?;
    check_start(p, x0)?;
    let (n, d) = (p.n(), p.dim());
    let mut grads = vec![0.0; n * d];
    let mut x = x0.to_vec();
    let mut next = vec![0.0; d];
    let mut idx = Vec::with_capacity(1);
    for t in 0..n {
        sampler.draw(n, 1, &mut idx)?;
        let i = idx[0];
        let row = &mut grads[i * d..(i + 1) * d];
        row.iter_mut().for_each(|v| *v = 0.0);
        p.accumulate_gradient(i, &x, 1.0, row, Counting::Charged);
        p.forward_backward_into(&x, &grads[i * d..(i + 1) * d], eta, &mut next, Counting::Charged);
        std::mem::swap(&mut x, &mut next);
        if !all_finite(&x) {
            return Err(Error::Diverged {
                iteration: t + 1,
                objective: f64::NAN,
            });
        }
    }
    Ok(WarmStart {
        x: DenseVector::from_vec_unchecked(x),
        table: GradientTable::from_rows(grads, n, d)?,
    })
}

pub(crate) fn saga_params(plan: &StepPlan) -> Result<usize> {
    check_eta(plan.eta)?;
    if plan.epoch_len.is_some() {
        return Err(Error::invalid("ProxSAGA plans have no epoch length"));
    }
    if plan.batch == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    Ok(plan.batch)
}

/// `iterations` steps from `x` with the given table.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_iterations<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x: &mut Vec<f64>,
    table: &mut GradientTable,
    plan: &StepPlan,
    iterations: u64,
    sampler: &mut impl BatchSampler,
    rec: &mut Recorder<'_, S>,
    reservoir: &mut Reservoir,
) -> Result<()> {
    let b = saga_params(plan)?;
    let n = p.n();
    let d = x.len();
    let mut v = vec![0.0; d];
    let mut fresh = vec![0.0; d];
    let mut next = vec![0.0; d];
    let mut set_i = Vec::with_capacity(b);
    let mut set_j = Vec::with_capacity(b);
    for t in 0..iterations {
        reservoir.offer(x, sampler);
        sampler.draw(n, b, &mut set_i)?;
        sampler.draw(n, b, &mut set_j)?;
        v.copy_from_slice(table.mean());
        let scale = 1.0 / set_i.len() as f64;
        for &i in &set_i {
            p.accumulate_gradient(i, x, scale, &mut v, Counting::Charged);
            for (vk, gk) in v.iter_mut().zip(table.row(i)) {
                *vk -= scale * gk;
            }
        }
        // α_j ← x^t: a repeated j just writes the same gradient again.
        for &j in &set_j {
            fresh.iter_mut().for_each(|c| *c = 0.0);
            p.accumulate_gradient(j, x, 1.0, &mut fresh, Counting::Charged);
            table.replace(j, &fresh);
        }
        p.forward_backward_into(x, &v, plan.eta, &mut next, Counting::Charged);
        std::mem::swap(x, &mut next);
        if (t + 1) % n as u64 == 0 {
            let drift = table.recompute_mean();
            debug_assert!(
                drift <= 1e-10 * table.mean().iter().fold(1.0f64, |a, m| a.max(m.abs())),
                "incremental gradient mean drifted by {drift}"
            );
        }
        rec.step(x)?;
    }
    Ok(())
}

/// Proximal SAGA.
///
/// Builds the table at `x⁰` (`n` IFO), then each step draws independent
/// index sets `I` and `J` of size `b` with replacement, moves along
/// `(1/b) Σ_{i∈I} (∇f_i(x) − ∇f_i(α_i)) + (1/n) Σ_i ∇f_i(α_i)` and sets
/// `α_j = x` for `j ∈ J`. Each step costs `2b` IFO and one PO call. `x_a` is
/// drawn uniformly from `x⁰ … x^{T−1}`.
pub fn prox_saga<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x0: &DenseVector,
    plan: &StepPlan,
    iterations: u64,
    sampler: &mut impl BatchSampler,
    opts: &RunOptions,
) -> Result<SolverOutput> {
    saga_params(plan)?;
    check_start(p, x0)?;
    let mut rec = Recorder::new(p, opts, "proxsaga", sampler.seed(), plan.eta)?;
    rec.set_plan(plan.to_string());
    let x = x0.to_vec();
    rec.begin(&x)?;
    let mut table = GradientTable::build(p, &x);
    finish_saga(p, x, &mut table, plan, iterations, sampler, opts, rec)
}

/// Proximal SAGA from a caller-supplied table, e.g. one seeded by
/// [`warm_start`]. No initial table build is charged.
pub fn prox_saga_from<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x0: &DenseVector,
    mut table: GradientTable,
    plan: &StepPlan,
    iterations: u64,
    sampler: &mut impl BatchSampler,
    opts: &RunOptions,
) -> Result<SolverOutput> {
    saga_params(plan)?;
    check_start(p, x0)?;
    if table.n != p.n() || table.dim != p.dim() {
        return Err(Error::invalid("gradient table does not match the problem"));
    }
    let mut rec = Recorder::new(p, opts, "proxsaga", sampler.seed(), plan.eta)?;
    rec.set_plan(format!("{plan} warm"));
    let x = x0.to_vec();
    rec.begin(&x)?;
    finish_saga(p, x, &mut table, plan, iterations, sampler, opts, rec)
}

#[allow(clippy::too_many_arguments)]
fn finish_saga<S: SmoothPart>(
    p: &CompositeProblem<S>,
    mut x: Vec<f64>,
    table: &mut GradientTable,
    plan: &StepPlan,
    iterations: u64,
    sampler: &mut impl BatchSampler,
    opts: &RunOptions,
    mut rec: Recorder<'_, S>,
) -> Result<SolverOutput> {
    let x0 = x.clone();
    let mut reservoir = Reservoir::new(opts.track_hashes);
    run_iterations(p, &mut x, table, plan, iterations, sampler, &mut rec, &mut reservoir)?;
    let (x_a, hashes) = reservoir.take(&x0);
    rec.finish(&x, x_a, hashes)
}
