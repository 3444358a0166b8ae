//! Closed-form proximal operators
//!
//! `prox_{ηh}(x) = argmin_y h(y) + ‖y − x‖² / (2η)`
//!
//! for the regularizers and constraint sets used by the solvers. Indicator
//! functions evaluate to [`ExtReal::PosInf`] outside their set; projections
//! build exactly feasible points by clipping rather than relying on the
//! feasibility tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::linalg::{dist_sq, sq_norm, DenseVector};

/// Constraint residual accepted by [`ProxOperator::h_value`].
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A real number or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// `f64` view, mapping `PosInf` to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::Finite(rhs)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

/// The nonsmooth convex term `h`.
#[derive(Clone, Debug, PartialEq)]
pub enum ProxOperator {
    /// `h ≡ 0`.
    Zero,
    /// `h(x) = λ‖x‖₁`.
    L1 { lambda: f64 },
    /// Indicator of `{x : lo ≤ x ≤ hi}`; bounds may be infinite.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Indicator of the probability simplex `{x ≥ 0, Σx = 1}`.
    Simplex,
    /// Indicator of `{x : ‖x‖ ≤ radius, x ≥ 0}`.
    BallNonneg { radius: f64 },
}

impl ProxOperator {
    pub fn l1(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(format!("l1 weight must be >= 0, got {lambda}")));
        }
        Ok(ProxOperator::L1 { lambda })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::invalid("box bounds have different lengths"));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if l.is_nan() || h.is_nan() || l > h || *l == f64::INFINITY || *h == f64::NEG_INFINITY
            {
                return Err(Error::invalid(format!("empty box on coordinate {i}: [{l}, {h}]")));
            }
        }
        Ok(ProxOperator::Box { lo, hi })
    }

    pub fn ball_nonneg(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("radius must be positive, got {radius}")));
        }
        Ok(ProxOperator::BallNonneg { radius })
    }

    pub fn is_indicator(&self) -> bool {
        matches!(
            self,
            ProxOperator::Box { .. } | ProxOperator::Simplex | ProxOperator::BallNonneg { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProxOperator::Zero => "zero",
            ProxOperator::L1 { .. } => "l1",
            ProxOperator::Box { .. } => "box",
            ProxOperator::Simplex => "simplex",
            ProxOperator::BallNonneg { .. } => "ball_nonneg",
        }
    }

    /// `prox_{ηh}(x)`.
    pub fn prox(&self, x: &DenseVector, eta: f64) -> Result<DenseVector> {
        self.check_eta(eta)?;
        self.check_dim(x.dim())?;
        let mut out = x.as_slice().to_vec();
        self.prox_in_place(&mut out, eta);
        Ok(DenseVector::from_vec_unchecked(out))
    }

    /// Same as [`prox`](Self::prox) on a raw slice; inputs are assumed valid.
    pub(crate) fn prox_in_place(&self, x: &mut [f64], eta: f64) {
        match self {
            ProxOperator::Zero => {}
            ProxOperator::L1 { lambda } => {
                let t = lambda * eta;
                for v in x.iter_mut() {
                    *v = soft_threshold(*v, t);
                }
            }
            ProxOperator::Box { lo, hi } => {
                for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
                    *v = v.clamp(*l, *h);
                }
            }
            ProxOperator::Simplex => project_simplex(x),
            ProxOperator::BallNonneg { radius } => project_ball_nonneg(x, *radius),
        }
    }

    /// `h(x)`, with indicator constraints checked to [`FEASIBILITY_TOL`].
    pub fn h_value(&self, x: &DenseVector) -> ExtReal {
        self.h_value_slice(x)
    }

    pub(crate) fn h_value_slice(&self, x: &[f64]) -> ExtReal {
        let feasible = |ok: bool| {
            if ok {
                ExtReal::Finite(0.0)
            } else {
                ExtReal::PosInf
            }
        };
        match self {
            ProxOperator::Zero => ExtReal::Finite(0.0),
            ProxOperator::L1 { lambda } => {
                ExtReal::Finite(lambda * x.iter().map(|v| v.abs()).sum::<f64>())
            }
            ProxOperator::Box { lo, hi } => feasible(
                x.len() == lo.len()
                    && x.iter().zip(lo).zip(hi).all(|((v, l), h)| {
                        *v >= l - FEASIBILITY_TOL && *v <= h + FEASIBILITY_TOL
                    }),
            ),
            ProxOperator::Simplex => feasible(
                x.iter().all(|v| *v >= -FEASIBILITY_TOL)
                    && (x.iter().sum::<f64>() - 1.0).abs() <= FEASIBILITY_TOL,
            ),
            ProxOperator::BallNonneg { radius } => feasible(
                x.iter().all(|v| *v >= -FEASIBILITY_TOL)
                    && sq_norm(x).sqrt() <= radius + FEASIBILITY_TOL,
            ),
        }
    }

    /// Checks the three-point inequality of the prox at `x` against `z`:
    ///
    /// `h(y) + ‖y−x‖²/2η ≤ h(z) + ‖z−x‖²/2η − ‖y−z‖²/2η`, `y = prox_{ηh}(x)`,
    ///
    /// up to `tol` (scaled by the magnitude of the right-hand side).
    /// Infeasible `z` satisfy it trivially.
    pub fn prox_three_point_check(
        &self,
        x: &DenseVector,
        z: &DenseVector,
        eta: f64,
        tol: f64,
    ) -> Result<bool> {
        if z.dim() != x.dim() {
            return Err(Error::invalid("z and x differ in dimension"));
        }
        let y = self.prox(x, eta)?;
        let hz = match self.h_value(z).finite() {
            Some(v) => v,
            None => return Ok(true),
        };
        let hy = self.h_value(&y).to_f64();
        let inv = 1.0 / (2.0 * eta);
        let lhs = hy + inv * dist_sq(&y, x);
        let rhs = hz + inv * dist_sq(z, x) - inv * dist_sq(&y, z);
        Ok(lhs <= rhs + tol * rhs.abs().max(1.0))
    }

    fn check_eta(&self, eta: f64) -> Result<()> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::invalid(format!("step size must be positive, got {eta}")));
        }
        Ok(())
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if let ProxOperator::Box { lo, .. } = self {
            if lo.len() != dim {
                return Err(Error::invalid(format!(
                    "box has {} coordinates, point has {dim}",
                    lo.len()
                )));
            }
        }
        Ok(())
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Euclidean projection onto `{x ≥ 0, Σx = 1}` by sorting and thresholding.
fn project_simplex(x: &mut [f64]) {
    if x.is_empty() {
        return;
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Projection onto `{‖x‖ ≤ r, x ≥ 0}`: clip negatives, then rescale onto the
/// sphere when the clipped point lies outside it.
fn project_ball_nonneg(x: &mut [f64], radius: f64) {
    for v in x.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let norm = sq_norm(x).sqrt();
    if norm > radius {
        let s = radius / norm;
        for v in x.iter_mut() {
            *v *= s;
        }
    }
}
