use super::{check_eta, check_start, Recorder, RunOptions, SolverOutput};
use crate::error::Result;
use crate::linalg::DenseVector;
use crate::problem::{CompositeProblem, Counting, SmoothPart};

/// `iterations` proximal gradient steps on `x` in place.
pub(crate) fn gd_iterate<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x: &mut Vec<f64>,
    eta: f64,
    iterations: u64,
    counting: Counting,
) {
    let mut grad = vec![0.0; x.len()];
    let mut next = vec![0.0; x.len()];
    for _ in 0..iterations {
        p.full_gradient_into(x, &mut grad, counting);
        p.forward_backward_into(x, &grad, eta, &mut next, counting);
        std::mem::swap(x, &mut next);
    }
}

/// Proximal gradient descent: `x ← prox_{ηh}(x − η∇f(x))`.
///
/// Costs `n` IFO and one PO call per iteration. Both outputs are the last
/// iterate.
pub fn prox_gd<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x0: &DenseVector,
    eta: f64,
    iterations: u64,
    opts: &RunOptions,
) -> Result<SolverOutput> {
    check_eta(eta)?;
    check_start(p, x0)?;
    let mut rec = Recorder::new(p, opts, "proxgd", 0, eta)?;
    rec.set_plan(format!("eta={eta:e}"));
    let mut x = x0.to_vec();
    rec.begin(&x)?;
    let mut grad = vec![0.0; x.len()];
    let mut next = vec![0.0; x.len()];
    for _ in 0..iterations {
        p.full_gradient_into(&x, &mut grad, Counting::Charged);
        p.forward_backward_into(&x, &grad, eta, &mut next, Counting::Charged);
        std::mem::swap(&mut x, &mut next);
        rec.step(&x)?;
    }
    let x_a = x.clone();
    rec.finish(&x, x_a, Vec::new())
}
