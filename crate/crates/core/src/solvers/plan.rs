//! Step-size, batch and epoch-length planning.
//!
//! ProxSVRG plans keep `4ρ²m²/b + ρ ≤ 1` and ProxSAGA plans keep
//! `16n²ρ²/b³ + ρ ≤ 1`, both with `ρ < 1/2` and `η = ρ/L`. Rounding `n^{2/3}`
//! and `n^{1/3}` to integers can break these for some `n`, so every plan is
//! re-checked after rounding and `ρ` is shrunk by bisection when needed.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `ρ` a general SVRG plan may use.
const SVRG_RHO_CAP: f64 = 0.49;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanKind {
    /// SVRG, `b = 1`, `η = 1/(3Ln)`, `m = n`.
    SvrgSingle,
    /// SVRG, `b = ⌈n^{2/3}⌉`, `η = 1/(3L)`, `m = ⌊n^{1/3}⌋`.
    SvrgMinibatch,
    /// SAGA, `b = 1`, `η = 1/(5Ln)`.
    SagaSingle,
    /// SAGA, `b = ⌈n^{2/3}⌉`, `η = 1/(5L)`.
    SagaMinibatch,
    GeneralSvrg,
    GeneralSaga,
    Manual,
    /// Restarted SVRG/SAGA, `η = 1/(5L)`, `T = ⌈30κ⌉` per stage.
    PlDefault,
    /// Restarted SVRG/SAGA with a chosen `ρ ≤ 1/5`, `T = ⌈6L/(ρμ)⌉`.
    PlGeneral,
}

impl PlanKind {
    pub fn name(self) -> &'static str {
        match self {
            PlanKind::SvrgSingle => "svrg-single",
            PlanKind::SvrgMinibatch => "svrg-minibatch",
            PlanKind::SagaSingle => "saga-single",
            PlanKind::SagaMinibatch => "saga-minibatch",
            PlanKind::GeneralSvrg => "general-svrg",
            PlanKind::GeneralSaga => "general-saga",
            PlanKind::Manual => "manual",
            PlanKind::PlDefault => "pl",
            PlanKind::PlGeneral => "pl-general",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SvrgMode {
    /// `b = 1`, `η = 1/(3Ln)`, `m = n`.
    Single,
    /// `b = ⌈n^{2/3}⌉`, `η = 1/(3L)`, `m = ⌊n^{1/3}⌋`.
    Minibatch,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SagaMode {
    /// `b = 1`, `η = 1/(5Ln)`.
    Single,
    /// `b = ⌈n^{2/3}⌉`, `η = 1/(5L)`.
    Minibatch,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlRule {
    Default,
    General { rho: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepPlan {
    pub eta: f64,
    /// `η·L`.
    pub rho: f64,
    /// Inner steps per epoch; SVRG only.
    pub epoch_len: Option<usize>,
    pub batch: usize,
    /// Inner iterations per stage, when the plan fixes them.
    pub iterations: Option<u64>,
    pub kind: PlanKind,
}

impl fmt::Display for StepPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} eta={:e} b={}", self.kind.name(), self.eta, self.batch)?;
        if let Some(m) = self.epoch_len {
            write!(f, " m={m}")?;
        }
        if let Some(t) = self.iterations {
            write!(f, " T={t}")?;
        }
        Ok(())
    }
}

/// `4ρ²m²/b + ρ − 1`; nonpositive when the SVRG condition holds.
pub fn svrg_residual(rho: f64, m: usize, b: usize) -> f64 {
    let (m, b) = (m as f64, b as f64);
    4.0 * rho * rho * m * m / b + rho - 1.0
}

/// `16n²ρ²/b³ + ρ − 1`; nonpositive when the SAGA condition holds.
pub fn saga_residual(rho: f64, n: usize, b: usize) -> f64 {
    let (n, b) = (n as f64, b as f64);
    16.0 * n * n * rho * rho / (b * b * b) + rho - 1.0
}

/// Largest `k` with `k³ ≤ n`.
pub fn floor_cube_root(n: u64) -> u64 {
    let mut k = (n as f64).cbrt().round() as u64;
    while (k as u128).pow(3) > n as u128 {
        k -= 1;
    }
    while ((k + 1) as u128).pow(3) <= n as u128 {
        k += 1;
    }
    k
}

/// Smallest `k` with `k³ ≥ n²`, i.e. `⌈n^{2/3}⌉`.
pub fn ceil_cube_root_sq(n: u64) -> u64 {
    let target = (n as u128).pow(2);
    let mut k = (n as f64).powf(2.0 / 3.0).round() as u64;
    while k > 0 && ((k - 1) as u128).pow(3) >= target {
        k -= 1;
    }
    while (k as u128).pow(3) < target {
        k += 1;
    }
    k
}

/// `⌈x⌉`, except that values within float noise of an integer round to it,
/// so `30·(L/μ)` with `L/μ = 10` gives 300 even if the quotient is a hair
/// above 10.
pub fn ceil_guarded(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

fn isqrt(b: usize) -> usize {
    let mut k = (b as f64).sqrt() as usize;
    while k * k > b {
        k -= 1;
    }
    while (k + 1) * (k + 1) <= b {
        k += 1;
    }
    k
}

/// Shrinks `rho` until `residual(rho) ≤ 0`.
fn shrink_to_feasible(rho: f64, residual: impl Fn(f64) -> f64) -> f64 {
    if residual(rho) <= 0.0 {
        return rho;
    }
    let (mut lo, mut hi) = (0.0, rho);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn check_common(n: usize, l: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("planning needs n >= 1"));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::invalid(format!("smoothness constant must be positive, got {l}")));
    }
    Ok(())
}

fn check_batch(n: usize, b: usize) -> Result<()> {
    if b == 0 || b > n {
        return Err(Error::invalid(format!("batch size must lie in 1..={n}, got {b}")));
    }
    Ok(())
}

/// ProxSVRG parameters. `b` is only read in [`SvrgMode::General`].
pub fn plan_svrg(n: usize, b: usize, l: f64, mode: SvrgMode) -> Result<StepPlan> {
    check_common(n, l)?;
    let (rho, m, b, kind) = match mode {
        SvrgMode::Single => (1.0 / (3.0 * n as f64), n, 1, PlanKind::SvrgSingle),
        SvrgMode::Minibatch => (
            1.0 / 3.0,
            (floor_cube_root(n as u64) as usize).max(1),
            ceil_cube_root_sq(n as u64) as usize,
            PlanKind::SvrgMinibatch,
        ),
        SvrgMode::General => {
            check_batch(n, b)?;
            let m = isqrt(b);
            let a = 4.0 * (m * m) as f64 / b as f64;
            let root = (-1.0 + (1.0 + 4.0 * a).sqrt()) / (2.0 * a);
            (root.min(SVRG_RHO_CAP), m, b, PlanKind::GeneralSvrg)
        }
    };
    let rho = shrink_to_feasible(rho, |r| svrg_residual(r, m, b));
    Ok(StepPlan {
        eta: rho / l,
        rho,
        epoch_len: Some(m),
        batch: b,
        iterations: None,
        kind,
    })
}

/// ProxSAGA parameters. `b` is only read in [`SagaMode::General`].
pub fn plan_saga(n: usize, b: usize, l: f64, mode: SagaMode) -> Result<StepPlan> {
    check_common(n, l)?;
    let (rho, b, kind) = match mode {
        SagaMode::Single => (1.0 / (5.0 * n as f64), 1, PlanKind::SagaSingle),
        SagaMode::Minibatch => (0.2, ceil_cube_root_sq(n as u64) as usize, PlanKind::SagaMinibatch),
        SagaMode::General => {
            check_batch(n, b)?;
            let rho = (0.2f64).min((b as f64).powf(1.5) / (5.0 * n as f64));
            (rho, b, PlanKind::GeneralSaga)
        }
    };
    let rho = shrink_to_feasible(rho, |r| saga_residual(r, n, b));
    Ok(StepPlan {
        eta: rho / l,
        rho,
        epoch_len: None,
        batch: b,
        iterations: None,
        kind,
    })
}

/// Per-stage parameters for the restarted solvers on a `μ`-PL problem.
///
/// `b = ⌈n^{2/3}⌉`, and `m = ⌊n^{1/3}⌋` for SVRG. With [`PlRule::Default`],
/// `η = 1/(5L)` and `T = ⌈30κ⌉`; with [`PlRule::General`], `η = ρ/L` and
/// `T = ⌈6L/(ρμ)⌉`, where `ρ ≤ 1/5` must satisfy the solver's condition.
pub fn plan_pl(n: usize, l: f64, mu: f64, rule: PlRule, svrg: bool) -> Result<StepPlan> {
    check_common(n, l)?;
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::invalid(format!("PL modulus must be positive, got {mu}")));
    }
    let b = ceil_cube_root_sq(n as u64) as usize;
    let m = (floor_cube_root(n as u64) as usize).max(1);
    let (rho, iterations, kind) = match rule {
        PlRule::Default => (0.2, ceil_guarded(30.0 * l / mu), PlanKind::PlDefault),
        PlRule::General { rho } => {
            if !(rho > 0.0 && rho <= 0.2) {
                return Err(Error::invalid(format!("PL plans need 0 < rho <= 1/5, got {rho}")));
            }
            (rho, ceil_guarded(6.0 * l / (rho * mu)), PlanKind::PlGeneral)
        }
    };
    let residual = if svrg { svrg_residual(rho, m, b) } else { saga_residual(rho, n, b) };
    if residual > 0.0 {
        return Err(Error::invalid(format!("rho = {rho} violates the step-size condition")));
    }
    Ok(StepPlan {
        eta: rho / l,
        rho,
        epoch_len: svrg.then_some(m),
        batch: b,
        iterations: Some(iterations.max(1)),
        kind,
    })
}

/// A user-chosen plan. SVRG plans carry an epoch length; SAGA plans do not.
///
/// Returns warnings, not errors, when the plan breaks the step-size
/// condition.
pub fn plan_manual(
    n: usize,
    l: f64,
    eta: f64,
    batch: usize,
    epoch_len: Option<usize>,
) -> Result<(StepPlan, Vec<String>)> {
    check_common(n, l)?;
    check_batch(n, batch)?;
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::invalid(format!("step size must be positive, got {eta}")));
    }
    if epoch_len == Some(0) {
        return Err(Error::invalid("epoch length must be at least 1"));
    }
    let rho = eta * l;
    let mut warnings = Vec::new();
    if rho >= 0.5 {
        warnings.push(format!("eta*L = {rho} is not below 1/2"));
    }
    let residual = match epoch_len {
        Some(m) => svrg_residual(rho, m, batch),
        None => saga_residual(rho, n, batch),
    };
    if residual > 0.0 {
        warnings.push(format!(
            "plan violates the step-size condition (residual {residual:.3e})"
        ));
    }
    let plan = StepPlan {
        eta,
        rho,
        epoch_len,
        batch,
        iterations: None,
        kind: PlanKind::Manual,
    };
    Ok((plan, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn svrg_minibatch_at_512() {
        let p = plan_svrg(512, 1, 2.0, SvrgMode::Minibatch).unwrap();
        assert_eq!((p.batch, p.epoch_len), (64, Some(8)));
        assert_eq!(p.eta, 1.0 / 6.0);
        assert!((svrg_residual(p.rho, 8, 64) + 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn svrg_single_at_10() {
        let p = plan_svrg(10, 1, 1.0, SvrgMode::Single).unwrap();
        assert_eq!((p.batch, p.epoch_len), (1, Some(10)));
        assert!((p.eta - 1.0 / 30.0).abs() < 1e-17);
        assert!(svrg_residual(p.rho, 10, 1) <= 0.0);
    }

    #[test]
    fn general_svrg_unit_batch_root() {
        // Bisection on 4ρ² + ρ − 1 = 0.
        let (mut lo, mut hi) = (0.0f64, 0.5f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 4.0 * mid * mid + mid - 1.0 <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = plan_svrg(100, 1, 1.0, SvrgMode::General).unwrap();
        assert_eq!(p.epoch_len, Some(1));
        assert!((p.rho - lo).abs() < 1e-12);
        assert!((p.rho - 0.390_388_203_202_208_4).abs() < 1e-12);
    }

    #[test]
    fn general_svrg_caps_rho() {
        // b = 3, m = 1: the root is about 0.569.
        let p = plan_svrg(10, 3, 1.0, SvrgMode::General).unwrap();
        assert_eq!(p.rho, SVRG_RHO_CAP);
    }

    #[test]
    fn saga_minibatch_at_512() {
        let p = plan_saga(512, 1, 2.0, SagaMode::Minibatch).unwrap();
        assert_eq!(p.batch, 64);
        assert_eq!(p.eta, 0.1);
        assert!((saga_residual(0.2, 512, 64) - (16.0 / 25.0 + 0.2 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn general_saga_small() {
        let p = plan_saga(10, 1, 1.0, SagaMode::General).unwrap();
        assert!((p.rho - 0.02).abs() < 1e-17);
        let p = plan_saga(10, 1, 1.0, SagaMode::Single).unwrap();
        assert!((p.eta - 0.02).abs() < 1e-17);
    }

    #[test]
    fn rejects_bad_batches() {
        assert!(plan_svrg(10, 11, 1.0, SvrgMode::General).is_err());
        assert!(plan_saga(10, 0, 1.0, SagaMode::General).is_err());
        assert!(plan_svrg(0, 1, 1.0, SvrgMode::Single).is_err());
        assert!(plan_saga(5, 1, 0.0, SagaMode::Single).is_err());
    }

    #[test]
    fn pl_defaults() {
        let p = plan_pl(1000, 10.0, 1.0, PlRule::Default, true).unwrap();
        assert_eq!(p.iterations, Some(300));
        assert_eq!((p.batch, p.epoch_len), (100, Some(10)));
        assert_eq!(p.eta, 0.02);
        // κ computed with a little float noise still rounds to 300.
        let kappa = 0.1 * 3.0 / 0.03;
        assert_eq!(plan_pl(8, kappa, 1.0, PlRule::Default, false).unwrap().iterations, Some(300));
        let g = plan_pl(1000, 10.0, 1.0, PlRule::General { rho: 0.2 }, true).unwrap();
        assert_eq!(g.iterations, Some(300));
        assert!(plan_pl(1000, 10.0, 1.0, PlRule::General { rho: 0.3 }, true).is_err());
        assert!(plan_pl(1000, 10.0, 0.0, PlRule::Default, true).is_err());
    }

    #[test]
    fn manual_plans_warn() {
        let (_, w) = plan_manual(100, 1.0, 0.1, 4, Some(2)).unwrap();
        assert!(w.is_empty());
        let (_, w) = plan_manual(100, 1.0, 0.9, 1, Some(50)).unwrap();
        assert_eq!(w.len(), 2);
        let (_, w) = plan_manual(100, 1.0, 0.3, 1, None).unwrap();
        assert_eq!(w.len(), 1);
        assert!(plan_manual(100, 1.0, -0.1, 1, None).is_err());
    }

    #[test]
    fn integer_roots_small() {
        let cube: Vec<u64> = (1..=9).map(floor_cube_root).collect();
        assert_eq!(cube, [1, 1, 1, 1, 1, 1, 1, 2, 2]);
        assert_eq!(ceil_cube_root_sq(512), 64);
        assert_eq!(ceil_cube_root_sq(1000), 100);
        assert_eq!(ceil_cube_root_sq(2), 2);
        assert_eq!(ceil_cube_root_sq(1), 1);
    }

    proptest! {
        #[test]
        fn every_plan_satisfies_its_condition(n in 1usize..5000, bfrac in 0.0..1.0f64, l in 0.01..100.0f64) {
            let b = ((n as f64 * bfrac) as usize).clamp(1, n);
            for mode in [SvrgMode::Single, SvrgMode::Minibatch, SvrgMode::General] {
                let p = plan_svrg(n, b, l, mode).unwrap();
                prop_assert!(p.rho < 0.5 && p.rho > 0.0);
                prop_assert!(p.batch <= n);
                prop_assert!(svrg_residual(p.rho, p.epoch_len.unwrap(), p.batch) <= 0.0);
            }
            for mode in [SagaMode::Single, SagaMode::Minibatch, SagaMode::General] {
                let p = plan_saga(n, b, l, mode).unwrap();
                prop_assert!(p.rho < 0.5 && p.rho > 0.0);
                prop_assert!(saga_residual(p.rho, n, p.batch) <= 0.0);
            }
        }

        #[test]
        fn integer_roots_are_exact(n in 1u64..10_000_000) {
            let k = floor_cube_root(n);
            prop_assert!(k.pow(3) <= n && (k + 1).pow(3) > n);
            let c = ceil_cube_root_sq(n) as u128;
            let n2 = (n as u128).pow(2);
            prop_assert!(c.pow(3) >= n2 && (c - 1).pow(3) < n2);
        }
    }
}
