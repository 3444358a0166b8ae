//! Seeded randomness and minibatch sampling.
//!
//! [`RngStream`] is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Both the block function and the seed
//! expansion are specified independently of the host, so a seed yields the
//! same draws on every platform. Integer draws go through `u64` ranges so the
//! result does not depend on the width of `usize`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// An independent stream derived from this one's seed and `stream`.
    pub fn derive(&self, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(stream);
        RngStream {
            seed: self.seed,
            inner,
        }
    }

    /// Uniform integer in `[0, bound)`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.inner.random_range(0..bound)
    }

    /// Uniform real in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// `b` indices drawn uniformly and independently from `[0, n)`.
    pub fn sample_with_replacement(&mut self, n: usize, b: usize) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(b);
        self.draw_into(n, b, &mut out)?;
        Ok(out)
    }

    fn draw_into(&mut self, n: usize, b: usize, out: &mut Vec<usize>) -> Result<()> {
        if n == 0 || b == 0 {
            return Err(Error::invalid(format!(
                "sampling needs n >= 1 and b >= 1 (got n={n}, b={b})"
            )));
        }
        out.clear();
        out.extend((0..b).map(|_| self.below(n as u64) as usize));
        Ok(())
    }
}

/// Free-function form of [`RngStream::sample_with_replacement`].
pub fn sample_with_replacement(rng: &mut RngStream, n: usize, b: usize) -> Result<Vec<usize>> {
    rng.sample_with_replacement(n, b)
}

/// Source of minibatches and of the auxiliary coin flips a solver needs.
pub trait BatchSampler {
    /// Fills `out` with a minibatch of size `b` from `[0, n)`.
    fn draw(&mut self, n: usize, b: usize, out: &mut Vec<usize>) -> Result<()>;

    /// Uniform integer in `[0, bound)`, used for output selection.
    fn below(&mut self, bound: u64) -> u64;

    fn seed(&self) -> u64;
}

impl BatchSampler for RngStream {
    fn draw(&mut self, n: usize, b: usize, out: &mut Vec<usize>) -> Result<()> {
        self.draw_into(n, b, out)
    }

    fn below(&mut self, bound: u64) -> u64 {
        RngStream::below(self, bound)
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

/// Test double that always returns every index `0..n` once, ignoring `b`.
///
/// With it, variance-reduced and stochastic steps collapse to full-gradient
/// steps, which is how the solvers are checked against ProxGD.
#[derive(Clone, Debug)]
pub struct FullBatch {
    rng: RngStream,
}

impl FullBatch {
    pub fn new(seed: u64) -> Self {
        FullBatch {
            rng: RngStream::new(seed),
        }
    }
}

impl BatchSampler for FullBatch {
    fn draw(&mut self, n: usize, _b: usize, out: &mut Vec<usize>) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("sampling needs n >= 1"));
        }
        out.clear();
        out.extend(0..n);
        Ok(())
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.rng.below(bound)
    }

    fn seed(&self) -> u64 {
        self.rng.seed()
    }
}
