use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use super::{CompositeProblem, Counting, SmoothPart};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{DenseVector, SparseVector};
use crate::prox::ProxOperator;
use crate::rng::RngStream;

/// Non-negative PCA components `f_i(x) = −(z_iᵀx)²`, `∇f_i(x) = −2(z_iᵀx) z_i`.
///
/// Each `f_i` is `2‖z_i‖²`-smooth; the uniform constant is the maximum over
/// rows. Rows are shared, so cloning is cheap.
#[derive(Clone, Debug, PartialEq)]
pub struct NnPca {
    rows: Arc<Vec<SparseVector>>,
    dim: usize,
    lipschitz: f64,
}

pub type NnPcaProblem = CompositeProblem<NnPca>;

impl NnPca {
    pub fn new(rows: Vec<SparseVector>) -> Result<Self> {
        let dim = rows
            .first()
            .map(|r| r.dim())
            .ok_or_else(|| Error::invalid("NN-PCA needs at least one sample"))?;
        if let Some(pos) = rows.iter().position(|r| r.dim() != dim) {
            return Err(Error::invalid(format!("row {pos} has dimension {} instead of {dim}", rows[pos].dim())));
        }
        let max_sq = rows.iter().map(|r| r.norm2_sq()).fold(0.0, f64::max);
        if max_sq == 0.0 {
            return Err(Error::invalid("all NN-PCA samples are zero"));
        }
        Ok(NnPca {
            rows: Arc::new(rows),
            dim,
            lipschitz: 2.0 * max_sq,
        })
    }

    pub fn from_dataset(ds: &Dataset) -> Result<Self> {
        NnPca::new(ds.rows().to_vec())
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    /// `(1/n) Σ z_i z_iᵀ` as a dense row-major `d × d` matrix.
    pub fn second_moment(&self) -> Vec<f64> {
        let d = self.dim;
        let mut m = vec![0.0; d * d];
        let inv_n = 1.0 / self.rows.len() as f64;
        for row in self.rows.iter() {
            for (&i, &vi) in row.indices().iter().zip(row.values()) {
                for (&j, &vj) in row.indices().iter().zip(row.values()) {
                    m[i as usize * d + j as usize] += inv_n * vi * vj;
                }
            }
        }
        m
    }
}

impl SmoothPart for NnPca {
    fn num_components(&self) -> usize {
        self.rows.len()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn component_value(&self, i: usize, x: &[f64]) -> f64 {
        let s = self.rows[i].dot_slice(x);
        -s * s
    }

    fn add_component_gradient(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) {
        let row = &self.rows[i];
        let s = row.dot_slice(x);
        row.axpy_into(-2.0 * s * scale, out);
    }
}

/// Random NN-PCA instance with `h` the indicator of `{‖x‖ ≤ 1, x ≥ 0}`.
///
/// Each coordinate `j` gets a mean `m_j ~ U[0, 1)`; rows are
/// `z_ij = m_j + N(0, 1)`, scaled to unit norm when `normalize` is set.
pub fn make_synthetic_nnpca(rng: &mut RngStream, n: usize, d: usize, normalize: bool) -> Result<NnPcaProblem> {
    if n == 0 || d == 0 {
        return Err(Error::invalid(format!("need n, d >= 1 (got n={n}, d={d})")));
    }
    let means: Vec<f64> = (0..d).map(|_| rng.uniform()).collect();
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut z: Vec<f64> = means.iter().map(|m| m + rng.standard_normal()).collect();
        if normalize {
            let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            z.iter_mut().for_each(|v| *v /= norm);
        }
        rows.push(SparseVector::from_dense(&z)?);
    }
    CompositeProblem::new(NnPca::new(rows)?, ProxOperator::ball_nonneg(1.0)?)
}

const BOUNDARY_ANGLES: usize = 10_001;
const INTERIOR_RADII: usize = 100;
const INTERIOR_ANGLES: usize = 101;

/// Global minimizer of a two-dimensional NN-PCA problem.
///
/// Sweeps the quarter-circle boundary and a polar interior grid, then refines
/// the best boundary angle by bisection on `dF/dθ`. The value returned is
/// `F` at the refined point, evaluated without charging the counters.
pub fn grid_optimum_2d(p: &NnPcaProblem) -> Result<(DenseVector, f64)> {
    if p.dim() != 2 {
        return Err(Error::Unsupported(format!("grid optimum needs d = 2, got d = {}", p.dim())));
    }
    let radius = match p.h() {
        ProxOperator::BallNonneg { radius } => *radius,
        other => return Err(Error::Unsupported(format!("grid optimum needs ball_nonneg, got {}", other.name()))),
    };
    let m = p.smooth().second_moment();
    let quad = |x: [f64; 2]| -(m[0] * x[0] * x[0] + (m[1] + m[2]) * x[0] * x[1] + m[3] * x[1] * x[1]);
    let at = |r: f64, theta: f64| [r * theta.cos(), r * theta.sin()];
    // dF/dθ at radius r: −r² (u'ᵀ(M + Mᵀ)u), u' = (−sin θ, cos θ).
    let slope = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let mu = [m[0] * c + m[1] * s, m[2] * c + m[3] * s];
        let mtu = [m[0] * c + m[2] * s, m[1] * c + m[3] * s];
        -radius * radius * ((-s) * (mu[0] + mtu[0]) + c * (mu[1] + mtu[1]))
    };

    let step = FRAC_PI_2 / (BOUNDARY_ANGLES - 1) as f64;
    let mut best_k = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..BOUNDARY_ANGLES {
        let v = quad(at(radius, k as f64 * step));
        if v < best_val {
            best_val = v;
            best_k = k;
        }
    }
    let mut best_point = at(radius, best_k as f64 * step);
    let mut on_boundary = true;
    for ri in 0..INTERIOR_RADII {
        let r = radius * ri as f64 / INTERIOR_RADII as f64;
        for ai in 0..INTERIOR_ANGLES {
            let point = at(r, FRAC_PI_2 * ai as f64 / (INTERIOR_ANGLES - 1) as f64);
            let v = quad(point);
            if v < best_val {
                best_val = v;
                best_point = point;
                on_boundary = false;
            }
        }
    }

    if on_boundary {
        let theta_k = best_k as f64 * step;
        let lo = (theta_k - step).max(0.0);
        let hi = (theta_k + step).min(FRAC_PI_2);
        let mut candidates = vec![lo, theta_k, hi];
        if slope(lo) < 0.0 && slope(hi) > 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if slope(mid) < 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            candidates.push(0.5 * (a + b));
        }
        let theta = candidates
            .into_iter()
            .min_by(|a, b| quad(at(radius, *a)).total_cmp(&quad(at(radius, *b))))
            .expect("nonempty");
        best_point = at(radius, theta);
    }

    // Rounding in cos/sin can leave the point a hair outside the set.
    let mut x = best_point.to_vec();
    p.h().prox_in_place(&mut x, 1.0);
    let x = DenseVector::new(x)?;
    let value = p.objective(&x, Counting::Measurement)?.to_f64();
    Ok((x, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(rows: &[&[f64]]) -> NnPcaProblem {
        let rows = rows.iter().map(|r| SparseVector::from_dense(r).unwrap()).collect();
        CompositeProblem::new(NnPca::new(rows).unwrap(), ProxOperator::ball_nonneg(1.0).unwrap()).unwrap()
    }

    #[test]
    fn grid_single_axis_samples() {
        let (x, f) = grid_optimum_2d(&problem(&[&[1.0, 0.0]])).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && x[1].abs() < 1e-12);
        assert!((f + 1.0).abs() < 1e-12);
        let (x, f) = grid_optimum_2d(&problem(&[&[0.0, 1.0]])).unwrap();
        assert!(x[0].abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert!((f + 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_two_orthogonal_samples() {
        // M = I/2, so every boundary point gives F = −1/2, including the
        // symmetric stationary point (√2/2, √2/2).
        let p = problem(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let (_, f) = grid_optimum_2d(&p).unwrap();
        assert!((f + 0.5).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let sym = DenseVector::new(vec![h, h]).unwrap();
        assert!((p.objective(&sym, Counting::Measurement).unwrap().to_f64() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_matches_fine_angle_sweep() {
        // f(ρu) = −ρ² uᵀMu, so the optimum sits on the unit arc.
        let p = problem(&[&[0.6, 0.8], &[0.8, -0.6]]);
        let (x, f) = grid_optimum_2d(&p).unwrap();
        assert!((x.norm() - 1.0).abs() < 1e-12);
        // Angle sweep at fine resolution as an independent check.
        let mut best = f64::INFINITY;
        for k in 0..=200_000 {
            let t = FRAC_PI_2 * k as f64 / 200_000.0;
            let v = DenseVector::new(vec![t.cos(), t.sin()]).unwrap();
            best = best.min(p.objective(&v, Counting::Measurement).unwrap().to_f64());
        }
        assert!(f <= best + 1e-12 && best - f < 1e-9, "{f} vs {best}");
    }

    #[test]
    fn grid_rejects_wrong_dimension() {
        let p = make_synthetic_nnpca(&mut RngStream::new(1), 4, 3, true).unwrap();
        assert!(matches!(grid_optimum_2d(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn synthetic_rows_normalized_and_deterministic() {
        let p = make_synthetic_nnpca(&mut RngStream::new(10), 50, 7, true).unwrap();
        for row in p.smooth().rows() {
            assert!((row.norm2_sq().sqrt() - 1.0).abs() < 1e-12);
        }
        assert!((p.lipschitz() - 2.0).abs() < 1e-12);
        let q = make_synthetic_nnpca(&mut RngStream::new(10), 50, 7, true).unwrap();
        for (a, b) in p.smooth().rows().iter().zip(q.smooth().rows()) {
            let bits_a: Vec<u64> = a.values().iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u64> = b.values().iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
            assert_eq!(a.indices(), b.indices());
        }
    }

    #[test]
    fn reported_lipschitz_dominates_sampled_ratios() {
        let mut rng = RngStream::new(12);
        let p = make_synthetic_nnpca(&mut rng, 30, 5, false).unwrap();
        let l = p.lipschitz();
        let mut worst: f64 = 0.0;
        for k in 0..1000 {
            let i = k % p.n();
            let x: Vec<f64> = (0..5).map(|_| rng.standard_normal()).collect();
            let y: Vec<f64> = (0..5).map(|_| rng.standard_normal()).collect();
            let mut gx = vec![0.0; 5];
            let mut gy = vec![0.0; 5];
            p.smooth().add_component_gradient(i, &x, 1.0, &mut gx);
            p.smooth().add_component_gradient(i, &y, 1.0, &mut gy);
            let num: f64 = gx.iter().zip(&gy).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let den: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(num / den);
        }
        assert!(worst <= l * (1.0 + 1e-12), "{worst} > {l}");
    }
}
