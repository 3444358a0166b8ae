//! Composite finite-sum problems `F(x) = (1/n) Σ f_i(x) + h(x)` with oracle
//! accounting.
//!
//! Every evaluation of one component `(f_i(x), ∇f_i(x))` is one IFO call and
//! every proximal step is one PO call. Evaluations made only to report
//! progress pass [`Counting::Measurement`] and leave the counters alone.

mod nnpca;
mod quadratic;

use std::ops::Sub;
use std::sync::atomic::{AtomicU64, Ordering};

pub use nnpca::{grid_optimum_2d, make_synthetic_nnpca, NnPca, NnPcaProblem};
pub use quadratic::{make_pl_quadratic, LeastSquares, PlQuadraticProblem};

use crate::error::{Error, Result};
use crate::linalg::{all_finite, axpy, DenseVector};
use crate::prox::{ExtReal, ProxOperator};

/// The smooth finite sum `f = (1/n) Σ f_i`.
pub trait SmoothPart: Send + Sync {
    /// Number of components `n`.
    fn num_components(&self) -> usize;

    fn dim(&self) -> usize;

    /// Uniform smoothness constant: every `∇f_i` is `L`-Lipschitz.
    fn lipschitz(&self) -> f64;

    /// `f_i(x)`.
    fn component_value(&self, i: usize, x: &[f64]) -> f64;

    /// `out += scale * ∇f_i(x)`.
    fn add_component_gradient(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]);
}

/// Whether an evaluation is charged to the oracle counters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Counting {
    Charged,
    /// Diagnostic evaluation; counters are untouched.
    Measurement,
}

/// Tallies of IFO and PO calls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleCounters {
    pub ifo_calls: u64,
    pub po_calls: u64,
}

impl Sub for OracleCounters {
    type Output = OracleCounters;

    fn sub(self, rhs: OracleCounters) -> OracleCounters {
        OracleCounters {
            ifo_calls: self.ifo_calls - rhs.ifo_calls,
            po_calls: self.po_calls - rhs.po_calls,
        }
    }
}

/// `f` together with `h`, and the counters charged by the oracles.
///
/// Counters are atomics, so a problem may be shared by reference across
/// threads; solvers themselves are single-threaded.
#[derive(Debug)]
pub struct CompositeProblem<S> {
    smooth: S,
    h: ProxOperator,
    ifo_calls: AtomicU64,
    po_calls: AtomicU64,
}

impl<S: SmoothPart> CompositeProblem<S> {
    pub fn new(smooth: S, h: ProxOperator) -> Result<Self> {
        if smooth.num_components() == 0 {
            return Err(Error::invalid("problem needs at least one component"));
        }
        if smooth.dim() == 0 {
            return Err(Error::invalid("problem dimension must be positive"));
        }
        let l = smooth.lipschitz();
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::invalid(format!("smoothness constant must be positive, got {l}")));
        }
        if let ProxOperator::Box { lo, .. } = &h {
            if lo.len() != smooth.dim() {
                return Err(Error::invalid("box bounds do not match the problem dimension"));
            }
        }
        Ok(CompositeProblem {
            smooth,
            h,
            ifo_calls: AtomicU64::new(0),
            po_calls: AtomicU64::new(0),
        })
    }

    pub fn n(&self) -> usize {
        self.smooth.num_components()
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }

    pub fn lipschitz(&self) -> f64 {
        self.smooth.lipschitz()
    }

    pub fn h(&self) -> &ProxOperator {
        &self.h
    }

    pub fn smooth(&self) -> &S {
        &self.smooth
    }

    pub fn counters(&self) -> OracleCounters {
        OracleCounters {
            ifo_calls: self.ifo_calls.load(Ordering::Relaxed),
            po_calls: self.po_calls.load(Ordering::Relaxed),
        }
    }

    /// Same data and `h`, counters starting from zero.
    pub fn fresh_copy(&self) -> Self
    where
        S: Clone,
    {
        CompositeProblem {
            smooth: self.smooth.clone(),
            h: self.h.clone(),
            ifo_calls: AtomicU64::new(0),
            po_calls: AtomicU64::new(0),
        }
    }

    fn charge_ifo(&self, calls: u64, counting: Counting) {
        if counting == Counting::Charged {
            self.ifo_calls.fetch_add(calls, Ordering::Relaxed);
        }
    }

    fn charge_po(&self, counting: Counting) {
        if counting == Counting::Charged {
            self.po_calls.fetch_add(1, Ordering::Relaxed);
        }
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "point has dimension {}, problem has {}",
                x.len(),
                self.dim()
            )));
        }
        if !all_finite(x) {
            return Err(Error::invalid("point has non-finite entries"));
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::invalid(format!("component {i} out of range (n = {})", self.n())));
        }
        Ok(())
    }

    /// One IFO call: `(f_i(x), ∇f_i(x))`.
    pub fn ifo(&self, i: usize, x: &DenseVector) -> Result<(f64, DenseVector)> {
        self.ifo_with(i, x, Counting::Charged)
    }

    pub fn ifo_with(&self, i: usize, x: &DenseVector, counting: Counting) -> Result<(f64, DenseVector)> {
        self.check_index(i)?;
        self.check_point(x)?;
        let mut grad = vec![0.0; self.dim()];
        self.smooth.add_component_gradient(i, x, 1.0, &mut grad);
        let value = self.smooth.component_value(i, x);
        self.charge_ifo(1, counting);
        Ok((value, DenseVector::from_vec_unchecked(grad)))
    }

    /// `out += scale * ∇f_i(x)`; one IFO call when charged.
    pub(crate) fn accumulate_gradient(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64], counting: Counting) {
        self.smooth.add_component_gradient(i, x, scale, out);
        self.charge_ifo(1, counting);
    }

    /// `∇f(x) = (1/n) Σ ∇f_i(x)`, costing `n` IFO calls.
    pub fn full_gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        self.full_gradient_with(x, Counting::Charged)
    }

    pub fn full_gradient_with(&self, x: &DenseVector, counting: Counting) -> Result<DenseVector> {
        self.check_point(x)?;
        let mut out = vec![0.0; self.dim()];
        self.full_gradient_into(x, &mut out, counting);
        Ok(DenseVector::from_vec_unchecked(out))
    }

    /// Overwrites `out` with `∇f(x)`.
    pub(crate) fn full_gradient_into(&self, x: &[f64], out: &mut [f64], counting: Counting) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let inv_n = 1.0 / self.n() as f64;
        for i in 0..self.n() {
            self.smooth.add_component_gradient(i, x, inv_n, out);
        }
        self.charge_ifo(self.n() as u64, counting);
    }

    /// `f(x) = (1/n) Σ f_i(x)`, costing `n` IFO calls when charged.
    pub fn f_value(&self, x: &DenseVector, counting: Counting) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.f_value_slice(x, counting))
    }

    pub(crate) fn f_value_slice(&self, x: &[f64], counting: Counting) -> f64 {
        let sum: f64 = (0..self.n()).map(|i| self.smooth.component_value(i, x)).sum();
        self.charge_ifo(self.n() as u64, counting);
        sum / self.n() as f64
    }

    /// `F(x) = f(x) + h(x)`.
    pub fn objective(&self, x: &DenseVector, counting: Counting) -> Result<ExtReal> {
        self.check_point(x)?;
        Ok(self.objective_slice(x, counting))
    }

    pub(crate) fn objective_slice(&self, x: &[f64], counting: Counting) -> ExtReal {
        ExtReal::Finite(self.f_value_slice(x, counting)) + self.h.h_value_slice(x)
    }

    /// `prox_{ηh}(x)`, one PO call when charged.
    pub fn prox(&self, x: &DenseVector, eta: f64, counting: Counting) -> Result<DenseVector> {
        let y = self.h.prox(x, eta)?;
        self.charge_po(counting);
        Ok(y)
    }

    pub(crate) fn prox_in_place(&self, x: &mut [f64], eta: f64, counting: Counting) {
        self.h.prox_in_place(x, eta);
        self.charge_po(counting);
    }

    /// One forward-backward step `prox_{ηh}(x − η d)` written into `out`.
    pub(crate) fn forward_backward_into(&self, x: &[f64], direction: &[f64], eta: f64, out: &mut [f64], counting: Counting) {
        out.copy_from_slice(x);
        axpy(-eta, direction, out);
        self.prox_in_place(out, eta, counting);
    }
}
