//! Proximal variance-reduced stochastic methods for composite finite-sum problems
//!
//! ```text
//!     min_x  F(x) = (1/n) Σ_i f_i(x) + h(x)
//! ```
//!
//! where every `f_i` is L-smooth (possibly nonconvex) and `h` is convex with a
//! cheap proximal map. The crate provides
//!
//! * [`prox`]: closed-form proximal operators (ℓ1, box, simplex, the
//!   nonnegative part of a ball) with extended-real `h` values,
//! * [`problem`]: the composite problem with exact IFO/PO call accounting,
//!   plus the NN-PCA and ℓ1-regularized least-squares families,
//! * [`solvers`]: ProxGD, ProxSGD, ProxSVRG, ProxSAGA, the restarted PL
//!   variants and a step-size planner that enforces the convergence
//!   conditions of each method,
//! * [`metrics`]: gradient mapping, the proximal PL quantity `D_h`, and run
//!   traces with a CSV codec,
//! * [`data`]: LIBSVM text ingestion.
//!
//! All arithmetic is `f64`. Randomness comes from [`rng::RngStream`]
//! (ChaCha8 seeded from a `u64`), so a seed fully determines a run.

pub mod data;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod problem;
pub mod prox;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use linalg::{dot, norm2_sq, DenseVector, SparseVector};
pub use metrics::{RunTrace, TraceRecord};
pub use problem::{CompositeProblem, Counting, OracleCounters, SmoothPart};
pub use prox::{ExtReal, ProxOperator};
pub use rng::{BatchSampler, FullBatch, RngStream};
pub use solvers::{SolverOutput, StepPlan};
