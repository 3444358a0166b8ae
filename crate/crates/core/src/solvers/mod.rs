//! ProxGD, ProxSGD, ProxSVRG, ProxSAGA, their PL restart wrappers, and the
//! step-size planner.
//!
//! Every solver takes a [`BatchSampler`] for its randomness, charges the
//! problem's oracle counters exactly as the algorithm does, and records
//! checkpoints in measurement mode so reporting never shows up in the
//! counts.

pub(crate) mod gd;
mod pl;
mod plan;
mod saga;
mod sgd;
mod svrg;
pub mod variance;

pub use gd::prox_gd;
pub use pl::{pl_saga, pl_svrg};
pub use plan::{
    ceil_cube_root_sq, ceil_guarded, floor_cube_root, plan_manual, plan_pl, plan_saga, plan_svrg, saga_residual,
    svrg_residual, PlRule, PlanKind, SagaMode, StepPlan, SvrgMode,
};
pub use saga::{prox_saga, prox_saga_from, warm_start, GradientTable, WarmStart};
pub use sgd::{prox_sgd, SgdSchedule};
pub use svrg::prox_svrg;

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::metrics::{gradient_mapping_slice, RunTrace, TraceMeta, TraceRecord};
use crate::problem::{CompositeProblem, Counting, OracleCounters, SmoothPart};
use crate::rng::BatchSampler;

/// Reporting knobs shared by every solver.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Effective passes between checkpoints. `None` records only the start
    /// and the end.
    pub stride: Option<f64>,
    /// Baseline objective for the suboptimality column.
    pub f_star: Option<f64>,
    /// Step size for the reported `‖G_η‖²`; defaults to the solver's own.
    pub gmap_eta: Option<f64>,
    /// Counter values that count as zero passes. Defaults to the counters
    /// when the solver starts; set it earlier to bill warm-up work.
    pub origin: Option<OracleCounters>,
    /// Log a hash of every candidate for the random output.
    pub track_hashes: bool,
    /// Keep every iterate produced by a step.
    pub track_path: bool,
}

impl RunOptions {
    pub fn with_stride(stride: f64) -> Self {
        RunOptions {
            stride: Some(stride),
            ..Default::default()
        }
    }
}

/// Result of one solver call.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverOutput {
    /// The uniformly drawn iterate the algorithm returns.
    pub x_a: DenseVector,
    pub x_last: DenseVector,
    pub trace: RunTrace,
    /// Oracle calls charged during this call.
    pub counters: OracleCounters,
    /// Hashes of the candidates for `x_a`, when requested.
    pub iterate_hashes: Vec<u64>,
    pub x_a_hash: u64,
    /// Iterates after each step, when requested.
    pub path: Vec<DenseVector>,
}

/// FNV-1a over the bit patterns of the coordinates.
pub fn iterate_hash(x: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in x {
        for byte in v.to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Uniform choice from a stream of iterates with `O(d)` memory.
pub(crate) struct Reservoir {
    chosen: Vec<f64>,
    seen: u64,
    hashes: Option<Vec<u64>>,
}

impl Reservoir {
    pub(crate) fn new(track_hashes: bool) -> Self {
        Reservoir {
            chosen: Vec::new(),
            seen: 0,
            hashes: track_hashes.then(Vec::new),
        }
    }

    pub(crate) fn offer(&mut self, x: &[f64], sampler: &mut impl BatchSampler) {
        self.seen += 1;
        if let Some(h) = self.hashes.as_mut() {
            h.push(iterate_hash(x));
        }
        if self.seen == 1 || sampler.below(self.seen) == 0 {
            self.chosen.clear();
            self.chosen.extend_from_slice(x);
        }
    }

    /// The chosen iterate, or `fallback` when nothing was offered.
    pub(crate) fn take(self, fallback: &[f64]) -> (Vec<f64>, Vec<u64>) {
        let x = if self.seen == 0 { fallback.to_vec() } else { self.chosen };
        (x, self.hashes.unwrap_or_default())
    }
}

/// Checkpoint bookkeeping for one run.
pub(crate) struct Recorder<'a, S> {
    p: &'a CompositeProblem<S>,
    origin: OracleCounters,
    start: OracleCounters,
    stride: Option<f64>,
    next: f64,
    f_star: Option<f64>,
    eta: f64,
    trace: RunTrace,
    path: Option<Vec<DenseVector>>,
}

impl<'a, S: SmoothPart> Recorder<'a, S> {
    pub(crate) fn new(p: &'a CompositeProblem<S>, opts: &RunOptions, solver: &str, seed: u64, eta: f64) -> Result<Self> {
        if let Some(s) = opts.stride {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::invalid(format!("checkpoint stride must be positive, got {s}")));
            }
        }
        let gmap_eta = opts.gmap_eta.unwrap_or(eta);
        if !(gmap_eta.is_finite() && gmap_eta > 0.0) {
            return Err(Error::invalid(format!("reporting step size must be positive, got {gmap_eta}")));
        }
        let start = p.counters();
        let mut meta = TraceMeta::new(solver, seed);
        meta.eta = Some(gmap_eta);
        Ok(Recorder {
            p,
            origin: opts.origin.unwrap_or(start),
            start,
            stride: opts.stride,
            next: 0.0,
            f_star: opts.f_star,
            eta: gmap_eta,
            trace: RunTrace::new(meta),
            path: opts.track_path.then(Vec::new),
        })
    }

    fn passes(&self) -> f64 {
        (self.p.counters().ifo_calls - self.origin.ifo_calls) as f64 / self.p.n() as f64
    }

    fn checkpoint(&mut self, x: &[f64]) -> Result<()> {
        let passes = self.passes();
        let objective = self.p.objective_slice(x, Counting::Measurement).to_f64();
        let g = gradient_mapping_slice(self.p, x, self.eta, Counting::Measurement);
        let c = self.p.counters() - self.origin;
        self.trace.record(TraceRecord {
            passes,
            ifo: c.ifo_calls,
            po: c.po_calls,
            objective,
            subopt: self.f_star.map(|f| objective - f),
            gmap_sq: g.iter().map(|v| v * v).sum(),
        })?;
        if let Some(s) = self.stride {
            self.next = ((passes / s).floor() + 1.0) * s;
        }
        Ok(())
    }

    pub(crate) fn begin(&mut self, x: &[f64]) -> Result<()> {
        self.checkpoint(x)
    }

    /// Called after every step with the new iterate.
    pub(crate) fn step(&mut self, x: &[f64]) -> Result<()> {
        if let Some(path) = self.path.as_mut() {
            path.push(DenseVector::from_vec_unchecked(x.to_vec()));
        }
        if self.stride.is_some() && self.passes() >= self.next {
            self.checkpoint(x)?;
        }
        Ok(())
    }

    pub(crate) fn finish(mut self, x_last: &[f64], x_a: Vec<f64>, hashes: Vec<u64>) -> Result<SolverOutput> {
        let passes = self.passes();
        if self.trace.last().is_none_or(|r| passes > r.passes) {
            self.checkpoint(x_last)?;
        }
        Ok(SolverOutput {
            x_a_hash: iterate_hash(&x_a),
            x_a: DenseVector::from_vec_unchecked(x_a),
            x_last: DenseVector::from_vec_unchecked(x_last.to_vec()),
            trace: self.trace,
            counters: self.p.counters() - self.start,
            iterate_hashes: hashes,
            path: self.path.unwrap_or_default(),
        })
    }

    pub(crate) fn set_plan(&mut self, plan: String) {
        self.trace.meta.plan = plan;
    }
}

/// Validates a starting point: right dimension, finite, inside `dom h`.
pub(crate) fn check_start<S: SmoothPart>(p: &CompositeProblem<S>, x0: &DenseVector) -> Result<()> {
    p.check_point(x0)?;
    if !p.h().h_value(x0).is_finite() {
        return Err(Error::invalid("starting point is outside the domain of h"));
    }
    Ok(())
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("step size must be positive and finite, got {eta}")))
    }
}
