use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{CompositeProblem, SmoothPart};
use crate::error::{Error, Result};
use crate::prox::ProxOperator;
use crate::rng::RngStream;

/// Least-squares components `f_i(x) = ½(a_iᵀx − b_i)²`.
///
/// With full-column-rank rows, `f` is strongly convex with modulus
/// `μ = λ_min((1/n) Σ a_i a_iᵀ)`, so `f + λ‖x‖₁` satisfies the proximal PL
/// inequality with that `μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquares {
    rows: Arc<Vec<f64>>,
    targets: Arc<Vec<f64>>,
    n: usize,
    dim: usize,
    lipschitz: f64,
    pl_modulus: f64,
}

pub type PlQuadraticProblem = CompositeProblem<LeastSquares>;

impl LeastSquares {
    /// `rows` is row-major `n × dim`.
    pub fn new(rows: Vec<f64>, targets: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || targets.is_empty() || rows.len() != targets.len() * dim {
            return Err(Error::invalid(format!(
                "expected {} x {dim} rows, got {} values",
                targets.len(),
                rows.len()
            )));
        }
        if rows.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::invalid("least-squares data must be finite"));
        }
        let n = targets.len();
        let lipschitz = rows
            .chunks_exact(dim)
            .map(|a| a.iter().map(|v| v * v).sum::<f64>())
            .fold(0.0, f64::max);
        let gram = DMatrix::from_row_slice(n, dim, &rows).tr_mul(&DMatrix::from_row_slice(n, dim, &rows)) / n as f64;
        let pl_modulus = SymmetricEigen::new(gram).eigenvalues.min();
        Ok(LeastSquares {
            rows: Arc::new(rows),
            targets: Arc::new(targets),
            n,
            dim,
            lipschitz,
            pl_modulus,
        })
    }

    /// Smallest eigenvalue of `(1/n) Σ a_i a_iᵀ`.
    pub fn pl_modulus(&self) -> f64 {
        self.pl_modulus
    }

    /// `κ = L / μ`.
    pub fn condition_number(&self) -> f64 {
        self.lipschitz / self.pl_modulus
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub fn target(&self, i: usize) -> f64 {
        self.targets[i]
    }

    fn residual(&self, i: usize, x: &[f64]) -> f64 {
        self.row(i).iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - self.targets[i]
    }
}

impl SmoothPart for LeastSquares {
    fn num_components(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn component_value(&self, i: usize, x: &[f64]) -> f64 {
        let r = self.residual(i, x);
        0.5 * r * r
    }

    fn add_component_gradient(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) {
        let c = scale * self.residual(i, x);
        for (o, a) in out.iter_mut().zip(self.row(i)) {
            *o += c * a;
        }
    }
}

/// Random PL testbed: Gaussian rows, a sparse planted solution, small noise,
/// and `h = λ‖x‖₁`.
pub fn make_pl_quadratic(rng: &mut RngStream, n: usize, d: usize, lambda: f64) -> Result<PlQuadraticProblem> {
    if n < d || d == 0 {
        return Err(Error::invalid(format!("need n >= d >= 1 for a full-rank design (n={n}, d={d})")));
    }
    let planted: Vec<f64> = (0..d)
        .map(|j| if j % 2 == 0 { rng.standard_normal() } else { 0.0 })
        .collect();
    let mut rows = Vec::with_capacity(n * d);
    let mut targets = Vec::with_capacity(n);
    for _ in 0..n {
        let a: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
        let b = a.iter().zip(&planted).map(|(x, y)| x * y).sum::<f64>() + 0.1 * rng.standard_normal();
        rows.extend(a);
        targets.push(b);
    }
    let ls = LeastSquares::new(rows, targets, d)?;
    let mu = ls.pl_modulus();
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::invalid("random design is rank deficient"));
    }
    CompositeProblem::new(ls, ProxOperator::l1(lambda)?)
}
