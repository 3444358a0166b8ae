//! Exact first and second moments of the variance-reduced directions, by
//! enumeration over the component index. Used to check unbiasedness and the
//! variance bounds without Monte Carlo error. All evaluations are in
//! measurement mode.
//!
//! With `b` indices drawn independently, the direction is an average of `b`
//! i.i.d. single-index directions, so its variance is the single-index value
//! divided by `b`.

use crate::error::{Error, Result};
use crate::linalg::{sq_norm, DenseVector};
use crate::problem::{CompositeProblem, Counting, SmoothPart};

fn component_gradients<S: SmoothPart>(p: &CompositeProblem<S>, x: &[f64]) -> Vec<Vec<f64>> {
    (0..p.n())
        .map(|i| {
            let mut g = vec![0.0; x.len()];
            p.accumulate_gradient(i, x, 1.0, &mut g, Counting::Measurement);
            g
        })
        .collect()
}

fn mean(rows: &[Vec<f64>]) -> Vec<f64> {
    let mut m = vec![0.0; rows[0].len()];
    for r in rows {
        for (a, b) in m.iter_mut().zip(r) {
            *a += b;
        }
    }
    let inv = 1.0 / rows.len() as f64;
    m.iter_mut().for_each(|a| *a *= inv);
    m
}

/// Single-index directions `∇f_i(x) − c_i + c̄` for `i = 0..n`.
fn directions(grads: &[Vec<f64>], anchors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let anchor_mean = mean(anchors);
    grads
        .iter()
        .zip(anchors)
        .map(|(g, c)| g.iter().zip(c).zip(&anchor_mean).map(|((g, c), m)| g - c + m).collect())
        .collect()
}

/// Exact `E‖v − ∇f(x)‖²` and `E v` for a batch of size `b`.
fn moments(grads: &[Vec<f64>], anchors: &[Vec<f64>], b: usize) -> (f64, Vec<f64>) {
    let dirs = directions(grads, anchors);
    let expected = mean(&dirs);
    let full = mean(grads);
    let var = dirs
        .iter()
        .map(|v| v.iter().zip(&full).map(|(a, f)| (a - f) * (a - f)).sum::<f64>())
        .sum::<f64>()
        / dirs.len() as f64;
    (var / b as f64, expected)
}

fn check(p_dim: usize, x: &[f64], b: usize) -> Result<()> {
    if x.len() != p_dim {
        return Err(Error::invalid("point has the wrong dimension"));
    }
    if b == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    Ok(())
}

/// Exact moments of the SVRG direction at `x` with snapshot `snapshot`:
/// `(E‖v − ∇f(x)‖², E v)`.
pub fn svrg_moments<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x: &DenseVector,
    snapshot: &DenseVector,
    b: usize,
) -> Result<(f64, DenseVector)> {
    check(p.dim(), x, b)?;
    check(p.dim(), snapshot, b)?;
    let (var, e) = moments(&component_gradients(p, x), &component_gradients(p, snapshot), b);
    Ok((var, DenseVector::from_vec_unchecked(e)))
}

/// `(L²/b)‖x − x̃‖²`, the bound on the SVRG direction's variance.
pub fn svrg_variance_bound<S: SmoothPart>(p: &CompositeProblem<S>, x: &DenseVector, snapshot: &DenseVector, b: usize) -> f64 {
    let l = p.lipschitz();
    l * l / b as f64 * x.dist2_sq(snapshot).unwrap_or(f64::INFINITY)
}

/// Exact moments of the SAGA direction at `x` when component `i`'s stored
/// gradient was taken at `alphas[i]`.
pub fn saga_moments<S: SmoothPart>(
    p: &CompositeProblem<S>,
    x: &DenseVector,
    alphas: &[DenseVector],
    b: usize,
) -> Result<(f64, DenseVector)> {
    check(p.dim(), x, b)?;
    if alphas.len() != p.n() {
        return Err(Error::invalid("need one stored point per component"));
    }
    let anchors: Vec<Vec<f64>> = alphas
        .iter()
        .enumerate()
        .map(|(i, a)| {
            check(p.dim(), a, b)?;
            let mut g = vec![0.0; a.dim()];
            p.accumulate_gradient(i, a, 1.0, &mut g, Counting::Measurement);
            Ok(g)
        })
        .collect::<Result<_>>()?;
    let (var, e) = moments(&component_gradients(p, x), &anchors, b);
    Ok((var, DenseVector::from_vec_unchecked(e)))
}

/// `(L²/(nb)) Σ_i ‖x − α_i‖²`, the bound on the SAGA direction's variance.
pub fn saga_variance_bound<S: SmoothPart>(p: &CompositeProblem<S>, x: &DenseVector, alphas: &[DenseVector], b: usize) -> f64 {
    let l = p.lipschitz();
    let total: f64 = alphas
        .iter()
        .map(|a| sq_norm(&a.iter().zip(x.iter()).map(|(u, v)| u - v).collect::<Vec<_>>()))
        .sum();
    l * l / (p.n() * b) as f64 * total
}
