use super::{check_eta, check_start, Recorder, RunOptions, SolverOutput};
use crate::error::{Error, Result};
use crate::linalg::{all_finite, DenseVector};
use crate::problem::{CompositeProblem, Counting, SmoothPart};
use crate::rng::BatchSampler;

/// Objective growth over `F(x⁰)` that aborts a ProxSGD run.
const DIVERGENCE_MARGIN: f64 = 1e6;

/// `η_t = η₀ / (1 + η′⌊t/n⌋)`; `η′ = 0` is a constant step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SgdSchedule {
    pub eta0: f64,
    pub decay: f64,
}

impl SgdSchedule {
    pub fn constant(eta: f64) -> Self {
        SgdSchedule { eta0: eta, decay: 0.0 }
    }

    pub fn step(&self, t: u64, n: usize) -> f64 {
        self.eta0 / (1.0 + self.decay * (t / n as u64) as f64)
    }

    fn validate(&self) -> Result<()> {
        check_eta(self.eta0)?;
        if !(self.decay.is_finite() && self.decay >= 0.0) {
            return Err(Error::invalid(format!("step decay must be nonnegative, got {}", self.decay)));
        }
        Ok(())
    }
}

/// Minibatch proximal SGD with the t-inverse schedule.
///
/// Step `t` draws `b` indices with replacement and moves to
/// `prox_{η_t h}(x − (η_t/b) Σ ∇f_i(x))`, costing `b` IFO and one PO call.
/// The output is the last iterate. The run aborts with
/// [`Error::Diverged`] if an iterate stops being finite or, checked once per
/// pass, `F` climbs more than `10⁶` above `F(x⁰)`.
pub fn prox_sgd<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x0: &DenseVector,
    schedule: SgdSchedule,
    batch: usize,
    iterations: u64,
    sampler: &mut impl BatchSampler,
    opts: &RunOptions,
) -> Result<SolverOutput> {
    schedule.validate()?;
    check_start(p, x0)?;
    if batch == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    let n = p.n();
    let mut rec = Recorder::new(p, opts, "proxsgd", sampler.seed(), schedule.eta0)?;
    rec.set_plan(format!("eta0={:e} decay={:e} b={batch}", schedule.eta0, schedule.decay));
    let mut x = x0.to_vec();
    rec.begin(&x)?;
    let limit = p.objective_slice(&x, Counting::Measurement).to_f64() + DIVERGENCE_MARGIN;
    let mut idx = Vec::with_capacity(batch);
    let mut v = vec![0.0; x.len()];
    let mut next = vec![0.0; x.len()];
    for t in 0..iterations {
        let eta = schedule.step(t, n);
        sampler.draw(n, batch, &mut idx)?;
        v.iter_mut().for_each(|c| *c = 0.0);
        let scale = 1.0 / idx.len() as f64;
        for &i in &idx {
            p.accumulate_gradient(i, &x, scale, &mut v, Counting::Charged);
        }
        p.forward_backward_into(&x, &v, eta, &mut next, Counting::Charged);
        std::mem::swap(&mut x, &mut next);
        let diverged = if !all_finite(&x) {
            Some(f64::NAN)
        } else if (t + 1) % n as u64 == 0 {
            let f = p.objective_slice(&x, Counting::Measurement).to_f64();
            (f > limit).then_some(f)
        } else {
            None
        };
        if let Some(objective) = diverged {
            return Err(Error::Diverged {
                iteration: (t + 1) as usize,
                objective,
            });
        }
        rec.step(&x)?;
    }
    let x_a = x.clone();
    rec.finish(&x, x_a, Vec::new())
}
