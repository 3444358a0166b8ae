//! Stationarity and PL certificates, the suboptimality baseline, and run
//! traces.

mod trace;

pub use trace::{traces_from_csv, traces_to_csv, RunTrace, TraceMeta, TraceRecord, CSV_HEADER};

use crate::error::{Error, Result};
use crate::linalg::{dot_slices, sq_norm, DenseVector};
use crate::problem::{CompositeProblem, Counting, SmoothPart};
use crate::prox::ProxOperator;
use crate::rng::RngStream;
use crate::solvers::gd::gd_iterate;

/// `G_η(x) = (x − prox_{ηh}(x − η∇f(x))) / η`.
///
/// Charged mode costs `n` IFO and one PO call.
pub fn gradient_mapping<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x: &DenseVector,
    eta: f64,
    counting: Counting,
) -> Result<DenseVector> {
    check_positive("eta", eta)?;
    p.check_point(x)?;
    Ok(DenseVector::from_vec_unchecked(gradient_mapping_slice(p, x, eta, counting)))
}

pub(crate) fn gradient_mapping_slice<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x: &[f64],
    eta: f64,
    counting: Counting,
) -> Vec<f64> {
    let mut grad = vec![0.0; x.len()];
    p.full_gradient_into(x, &mut grad, counting);
    let mut y = vec![0.0; x.len()];
    p.forward_backward_into(x, &grad, eta, &mut y, counting);
    x.iter().zip(&y).map(|(a, b)| (a - b) / eta).collect()
}

/// `‖G_η(x)‖²`.
pub fn gradient_mapping_norm_sq<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x: &DenseVector,
    eta: f64,
    counting: Counting,
) -> Result<f64> {
    Ok(gradient_mapping(p, x, eta, counting)?.norm2_sq())
}

/// Whether an averaged `‖G_η‖²` estimate certifies ε-accuracy.
pub fn is_eps_accurate(gmap_sq_estimate: f64, eps: f64) -> bool {
    gmap_sq_estimate <= eps
}

/// `D_h(x, μ)`: minus `2μ` times the minimum over `y` of
/// `⟨∇f(x), y − x⟩ + (μ/2)‖y − x‖² + h(y) − h(x)`.
///
/// The minimizer is `prox_{h/μ}(x − ∇f(x)/μ)`. Rounding can push the result
/// a hair below zero; it is clamped.
pub fn compute_dh<S: SmoothPart>(p: &CompositeProblem<S>, x: &DenseVector, mu: f64, counting: Counting) -> Result<f64> {
    check_positive("mu", mu)?;
    p.check_point(x)?;
    let hx = p
        .h()
        .h_value(x)
        .finite()
        .ok_or_else(|| Error::invalid("D_h needs x inside the domain of h"))?;
    let mut grad = vec![0.0; x.dim()];
    p.full_gradient_into(x, &mut grad, counting);
    let mut y = vec![0.0; x.dim()];
    p.forward_backward_into(x, &grad, 1.0 / mu, &mut y, counting);
    let diff: Vec<f64> = y.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
    let hy = p.h().h_value_slice(&y).to_f64();
    let inner = dot_slices(&grad, &diff) + 0.5 * mu * sq_norm(&diff) + hy - hx;
    Ok((-2.0 * mu * inner).max(0.0))
}

/// Best objective found by ProxGD (step `1/L`) from several random starts.
///
/// Starts are Gaussian points pushed through the prox so they lie in
/// `dom h`. Evaluations run in measurement mode.
pub fn proxgd_baseline<S: SmoothPart>(
    p: &CompositeProblem<S>,
    seed: u64,
    starts: usize,
    iterations: u64,
) -> Result<(DenseVector, f64)> {
    if starts == 0 {
        return Err(Error::invalid("baseline needs at least one start"));
    }
    let eta = 1.0 / p.lipschitz();
    let mut rng = RngStream::new(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..starts {
        let mut x: Vec<f64> = (0..p.dim()).map(|_| rng.standard_normal()).collect();
        p.prox_in_place(&mut x, eta, Counting::Measurement);
        gd_iterate(p, &mut x, eta, iterations, Counting::Measurement);
        let value = p.objective_slice(&x, Counting::Measurement).to_f64();
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((x, value));
        }
    }
    let (x, value) = best.expect("at least one start");
    if !value.is_finite() {
        return Err(Error::Internal(format!("baseline produced a non-finite objective {value}")));
    }
    Ok((DenseVector::from_vec_unchecked(x), value))
}

/// A starting point inside `dom h` with zero objective contribution from `h`
/// where possible: the origin, projected when `h` is an indicator that
/// excludes it.
pub fn default_start(h: &ProxOperator, dim: usize) -> DenseVector {
    let mut x = vec![0.0; dim];
    h.prox_in_place(&mut x, 1.0);
    DenseVector::from_vec_unchecked(x)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}
