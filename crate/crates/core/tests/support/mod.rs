//! Independent oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls the library's prox code: minimizers are found by
//! grid search plus derivative bisection (separable operators) or by
//! enumerating every face of the feasible set (simplex, nonnegative ball
//! part), with a grid sweep as a cross-check.
#![allow(dead_code)]

use proxvr::linalg::DenseVector;
use proxvr::prox::ProxOperator;
use proxvr::rng::RngStream;

pub fn dv(v: &[f64]) -> DenseVector {
    DenseVector::new(v.to_vec()).unwrap()
}

/// `h(y) + ‖y − x‖²/(2η)`, with `+∞` outside `dom h`.
pub fn prox_objective(op: &ProxOperator, x: &[f64], y: &[f64], eta: f64) -> f64 {
    let h = op.h_value(&dv(y)).to_f64();
    let d: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    h + d / (2.0 * eta)
}

/// Minimizes a convex 1-D function on `[lo, hi]` given its right derivative:
/// a grid locates the basin, bisection on the derivative sign refines it.
fn minimize_1d(f: impl Fn(f64) -> f64, right_deriv: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const GRID: usize = 2000;
    let step = (hi - lo) / GRID as f64;
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..=GRID {
        let v = f(lo + step * k as f64);
        if v < best_val {
            best_val = v;
            best = k;
        }
    }
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = (lo + step * (best + 1) as f64).min(hi);
    if right_deriv(a) >= 0.0 {
        return a;
    }
    if right_deriv(b) < 0.0 {
        return b;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if right_deriv(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Brute-force `argmin_y h(y) + ‖y − x‖²/(2η)` for `d ≤ 3`.
pub fn brute_force_prox(op: &ProxOperator, x: &[f64], eta: f64) -> Vec<f64> {
    match op {
        ProxOperator::Zero => separable(x, |j| (x[j] - 10.0 - x[j].abs(), x[j] + 10.0 + x[j].abs()), |_, _| 0.0, |_, _| 0.0, eta),
        ProxOperator::L1 { lambda } => {
            let lam = *lambda;
            separable(
                x,
                |j| {
                    let r = x[j].abs() + lam * eta + 1.0;
                    (-r, r)
                },
                move |_, y| lam * y.abs(),
                move |_, y| if y >= 0.0 { lam } else { -lam },
                eta,
            )
        }
        ProxOperator::Box { lo, hi } => separable(x, |j| (lo[j], hi[j]), |_, _| 0.0, |_, _| 0.0, eta),
        ProxOperator::Simplex => by_faces(op, x, simplex_face_candidates(x)),
        ProxOperator::BallNonneg { radius } => by_faces(op, x, ball_face_candidates(x, *radius)),
    }
}

fn separable(
    x: &[f64],
    bounds: impl Fn(usize) -> (f64, f64),
    g: impl Fn(usize, f64) -> f64,
    g_right: impl Fn(usize, f64) -> f64,
    eta: f64,
) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let (lo, hi) = bounds(j);
            minimize_1d(
                |y| g(j, y) + (y - x[j]) * (y - x[j]) / (2.0 * eta),
                |y| g_right(j, y) + (y - x[j]) / eta,
                lo,
                hi,
            )
        })
        .collect()
}

fn supports(d: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << d)).map(move |mask| (0..d).filter(|j| mask & (1 << j) != 0).collect())
}

/// On the face with support `S`, the nearest point of `{Σ y_S = 1}` is
/// `x_S − (Σ x_S − 1)/|S|`.
fn simplex_face_candidates(x: &[f64]) -> Vec<Vec<f64>> {
    supports(x.len())
        .map(|s| {
            let shift = (s.iter().map(|&j| x[j]).sum::<f64>() - 1.0) / s.len() as f64;
            let mut y = vec![0.0; x.len()];
            for &j in &s {
                y[j] = x[j] - shift;
            }
            y
        })
        .collect()
}

/// Faces of `{y ≥ 0, ‖y‖ ≤ r}`: the origin, and for each support `S` the
/// interior point `x_S` and the sphere point `r·x_S/‖x_S‖`.
fn ball_face_candidates(x: &[f64], r: f64) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; x.len()]];
    for s in supports(x.len()) {
        let mut y = vec![0.0; x.len()];
        for &j in &s {
            y[j] = x[j];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        out.push(y.clone());
        if norm > 0.0 {
            out.push(y.iter().map(|v| v * r / norm).collect());
        }
    }
    out
}

fn feasible(op: &ProxOperator, y: &[f64]) -> bool {
    match op {
        ProxOperator::Simplex => y.iter().all(|&v| v >= -1e-15) && (y.iter().sum::<f64>() - 1.0).abs() <= 1e-12,
        ProxOperator::BallNonneg { radius } => {
            y.iter().all(|&v| v >= 0.0) && y.iter().map(|v| v * v).sum::<f64>().sqrt() <= radius * (1.0 + 1e-14)
        }
        _ => true,
    }
}

fn by_faces(op: &ProxOperator, x: &[f64], candidates: Vec<Vec<f64>>) -> Vec<f64> {
    let dist = |y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let best = candidates
        .into_iter()
        .filter(|y| feasible(op, y))
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .expect("some face is feasible");
    // The face answer must beat a dense sweep of the feasible set.
    let sweep = grid_sweep_best(op, x);
    assert!(
        dist(&best) <= sweep + 1e-12,
        "face enumeration lost to the grid sweep: {} > {sweep}",
        dist(&best)
    );
    best
}

/// Smallest `‖y − x‖²` over a grid of the feasible set (simplex or ball
/// part), using box parametrizations of the set.
fn grid_sweep_best(op: &ProxOperator, x: &[f64]) -> f64 {
    const K: usize = 120;
    let dist = |y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let d = x.len();
    let mut best = f64::INFINITY;
    let ticks = |k: usize| k as f64 / K as f64;
    match (op, d) {
        (ProxOperator::Simplex, 1) => best = dist(&[1.0]),
        (ProxOperator::Simplex, 2) => {
            for a in 0..=K {
                best = best.min(dist(&[ticks(a), 1.0 - ticks(a)]));
            }
        }
        (ProxOperator::Simplex, _) => {
            for a in 0..=K {
                for b in 0..=K {
                    let (a, b) = (ticks(a), ticks(b));
                    best = best.min(dist(&[a, (1.0 - a) * b, (1.0 - a) * (1.0 - b)]));
                }
            }
        }
        (ProxOperator::BallNonneg { radius }, _) => {
            let half_pi = std::f64::consts::FRAC_PI_2;
            for rk in 0..=K {
                let rho = radius * ticks(rk);
                match d {
                    1 => best = best.min(dist(&[rho])),
                    2 => {
                        for a in 0..=K {
                            let t = half_pi * ticks(a);
                            best = best.min(dist(&[rho * t.cos(), rho * t.sin()]));
                        }
                    }
                    _ => {
                        for a in 0..=K / 2 {
                            for b in 0..=K / 2 {
                                let (t, p) = (half_pi * ticks(2 * a), half_pi * ticks(2 * b));
                                best = best.min(dist(&[rho * t.cos(), rho * t.sin() * p.cos(), rho * t.sin() * p.sin()]));
                            }
                        }
                    }
                }
            }
        }
        _ => unreachable!("sweep only covers constrained sets"),
    }
    best
}

/// A random operator of dimension `d` drawn from the four families with
/// nonzero `h`.
pub fn random_operator(rng: &mut RngStream, d: usize, family: usize) -> ProxOperator {
    match family % 4 {
        0 => ProxOperator::l1(rng.uniform() * 2.0).unwrap(),
        1 => {
            let lo: Vec<f64> = (0..d).map(|_| -rng.uniform() * 2.0).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + 0.1 + rng.uniform() * 3.0).collect();
            ProxOperator::boxed(lo, hi).unwrap()
        }
        2 => ProxOperator::Simplex,
        _ => ProxOperator::ball_nonneg(0.2 + rng.uniform() * 2.0).unwrap(),
    }
}

pub fn random_point(rng: &mut RngStream, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| scale * rng.standard_normal()).collect()
}

/// A random point of `dom h`: a Gaussian point mapped through the prox with
/// a random step, which for indicators is the projection.
pub fn random_feasible(op: &ProxOperator, rng: &mut RngStream, d: usize) -> Vec<f64> {
    let x = random_point(rng, d, 2.0);
    op.prox(&dv(&x), 0.1 + rng.uniform()).unwrap().into_vec()
}

/// KKT residual of `y` as the projection of `x` for the ball-part set:
/// `x − y = ν y − s` with `ν ≥ 0`, `s ≥ 0`, `s ⊥ y`, `ν(‖y‖ − r) = 0`.
/// Returns the smallest violation over the free multipliers.
pub fn ball_nonneg_kkt_residual(x: &[f64], y: &[f64], r: f64) -> f64 {
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let on_sphere = (norm - r).abs() <= 1e-12 * r.max(1.0);
    // ν from the positive coordinates (where s = 0), else 0.
    let nu = if on_sphere {
        let pos: Vec<usize> = (0..y.len()).filter(|&j| y[j] > 1e-14).collect();
        if pos.is_empty() {
            0.0
        } else {
            pos.iter().map(|&j| (x[j] - y[j]) / y[j]).sum::<f64>() / pos.len() as f64
        }
    } else {
        0.0
    };
    let mut viol = if nu < 0.0 { -nu } else { 0.0 };
    for j in 0..y.len() {
        let s = nu * y[j] - (x[j] - y[j]);
        if y[j] > 1e-14 {
            viol = viol.max(s.abs());
        } else {
            viol = viol.max((-s).max(0.0));
        }
    }
    viol
}

/// Largest `‖prox(x) − oracle(x)‖∞` over `instances` random `(op, x, η)`
/// with `d ∈ {1, 2, 3}`, cycling through all four families.
pub fn max_prox_oracle_error(instances: usize, seed: u64) -> f64 {
    let mut rng = RngStream::new(seed);
    let mut worst = 0.0f64;
    for k in 0..instances {
        let d = 1 + k % 3;
        let op = random_operator(&mut rng, d, k / 3);
        let x = random_point(&mut rng, d, 2.0);
        let eta = 0.05 + 2.0 * rng.uniform();
        let got = op.prox(&dv(&x), eta).unwrap();
        let want = brute_force_prox(&op, &x, eta);
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err);
    }
    worst
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Checks the prox three-point inequality and its generalized-step form on
/// `cases` random instances each; returns a description of every failure.
pub fn prox_inequality_failures(cases: usize, seed: u64, tol: f64) -> Vec<String> {
    let mut rng = RngStream::new(seed);
    let mut failures = Vec::new();
    for k in 0..cases {
        let d = 1 + k % 5;
        let op = random_operator(&mut rng, d, k);
        let x = random_point(&mut rng, d, 2.0);
        let z = random_feasible(&op, &mut rng, d);
        let eta = 0.05 + 2.0 * rng.uniform();
        if !op.prox_three_point_check(&dv(&x), &dv(&z), eta, tol).unwrap() {
            failures.push(format!("three-point: {op:?} x={x:?} z={z:?} eta={eta}"));
        }
        // y = prox(x − η d′): h(y) + ⟨y − z, d′⟩ ≤ h(z) + [‖z−x‖² − ‖y−x‖² − ‖y−z‖²]/(2η).
        let dp = random_point(&mut rng, d, 1.5);
        let shifted: Vec<f64> = x.iter().zip(&dp).map(|(a, g)| a - eta * g).collect();
        let y = op.prox(&dv(&shifted), eta).unwrap().into_vec();
        let hy = op.h_value(&dv(&y)).to_f64();
        let hz = op.h_value(&dv(&z)).to_f64();
        let lhs = hy + y.iter().zip(&z).zip(&dp).map(|((a, b), g)| (a - b) * g).sum::<f64>();
        let rhs = hz + (sq_dist(&z, &x) - sq_dist(&y, &x) - sq_dist(&y, &z)) / (2.0 * eta);
        if lhs > rhs + tol * rhs.abs().max(1.0) {
            failures.push(format!("generalized step: {op:?} lhs={lhs} rhs={rhs}"));
        }
    }
    failures
}

/// Exact variance and unbiasedness checks for the SVRG and SAGA directions
/// on `states` random states per problem family.
pub fn variance_failures(states: usize, seed: u64) -> Vec<String> {
    use proxvr::problem::{make_pl_quadratic, make_synthetic_nnpca, Counting};
    use proxvr::solvers::variance::{saga_moments, saga_variance_bound, svrg_moments, svrg_variance_bound};

    let mut rng = RngStream::new(seed);
    let mut failures = Vec::new();
    let mut check = |name: &str, var: f64, bound: f64, e: &DenseVector, g: &DenseVector| {
        if var > bound * (1.0 + 1e-12) + 1e-15 {
            failures.push(format!("{name}: variance {var} exceeds bound {bound}"));
        }
        let gap = e.iter().zip(g.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if gap > 1e-12 * g.iter().fold(1.0f64, |m, v| m.max(v.abs())) {
            failures.push(format!("{name}: mean direction off by {gap:e}"));
        }
    };
    for s in 0..states {
        let n = 2 + s % 15;
        let d = 1 + s % 4;
        let b = 1 + s % n;
        let nnpca = make_synthetic_nnpca(&mut rng, n, d, s % 2 == 0).unwrap();
        let quad = make_pl_quadratic(&mut rng, n.max(d), d, 0.1).unwrap();
        let x = dv(&random_point(&mut rng, d, 1.0));
        let snap = dv(&random_point(&mut rng, d, 1.0));
        let alphas_n: Vec<DenseVector> = (0..n).map(|_| dv(&random_point(&mut rng, d, 1.0))).collect();
        let alphas_q: Vec<DenseVector> = (0..n.max(d)).map(|_| dv(&random_point(&mut rng, d, 1.0))).collect();

        let g = nnpca.full_gradient_with(&x, Counting::Measurement).unwrap();
        let (v, e) = svrg_moments(&nnpca, &x, &snap, b).unwrap();
        check("svrg/nnpca", v, svrg_variance_bound(&nnpca, &x, &snap, b), &e, &g);
        let (v, e) = saga_moments(&nnpca, &x, &alphas_n, b).unwrap();
        check("saga/nnpca", v, saga_variance_bound(&nnpca, &x, &alphas_n, b), &e, &g);

        let g = quad.full_gradient_with(&x, Counting::Measurement).unwrap();
        let (v, e) = svrg_moments(&quad, &x, &snap, b).unwrap();
        check("svrg/quadratic", v, svrg_variance_bound(&quad, &x, &snap, b), &e, &g);
        let (v, e) = saga_moments(&quad, &x, &alphas_q, b).unwrap();
        check("saga/quadratic", v, saga_variance_bound(&quad, &x, &alphas_q, b), &e, &g);
    }
    failures
}

/// Runs random `(S, m, b)` ProxSVRG and `(T, b)` ProxSAGA configurations on
/// fresh problems and reports every counter that misses its closed form.
pub fn counter_mismatches(runs: usize, seed: u64) -> Vec<String> {
    use proxvr::metrics::default_start;
    use proxvr::problem::{make_pl_quadratic, make_synthetic_nnpca};
    use proxvr::solvers::{plan_manual, prox_saga, prox_svrg, RunOptions};

    let mut rng = RngStream::new(seed);
    let mut out = Vec::new();
    for k in 0..runs {
        let n = 5 + rng.below(60) as usize;
        let d = 1 + rng.below(4) as usize;
        let b = 1 + rng.below(n as u64) as usize;
        let m = 1 + rng.below(10) as usize;
        let epochs = rng.below(6);
        let iters = rng.below(60);
        let opts = RunOptions::with_stride(0.5);
        let (svrg, saga, n, b) = if k % 2 == 0 {
            let p = make_synthetic_nnpca(&mut rng, n, d, true).unwrap();
            let x0 = default_start(p.h(), d);
            let l = p.lipschitz();
            let (ps, _) = plan_manual(n, l, 0.1 / l, b, Some(m)).unwrap();
            let (pa, _) = plan_manual(n, l, 0.1 / l, b, None).unwrap();
            let s = prox_svrg(&p, &x0, &ps, epochs, &mut RngStream::new(k as u64), &opts).unwrap().counters;
            let q = p.fresh_copy();
            let a = prox_saga(&q, &x0, &pa, iters, &mut RngStream::new(k as u64), &opts).unwrap().counters;
            (s, a, n, b)
        } else {
            let p = make_pl_quadratic(&mut rng, n.max(d), d, 0.1).unwrap();
            let n = p.n();
            let b = b.min(n);
            let x0 = dv(&vec![0.5; d]);
            let l = p.lipschitz();
            let (ps, _) = plan_manual(n, l, 0.1 / l, b, Some(m)).unwrap();
            let (pa, _) = plan_manual(n, l, 0.1 / l, b, None).unwrap();
            let s = prox_svrg(&p, &x0, &ps, epochs, &mut RngStream::new(k as u64), &opts).unwrap().counters;
            let q = p.fresh_copy();
            let a = prox_saga(&q, &x0, &pa, iters, &mut RngStream::new(k as u64), &opts).unwrap().counters;
            (s, a, n, b)
        };
        let (n, b, m) = (n as u64, b as u64, m as u64);
        let want = (epochs * (n + 2 * m * b), epochs * m);
        if (svrg.ifo_calls, svrg.po_calls) != want {
            out.push(format!("svrg n={n} S={epochs} m={m} b={b}: got {svrg:?}, want {want:?}"));
        }
        let want = (n + 2 * b * iters, iters);
        if (saga.ifo_calls, saga.po_calls) != want {
            out.push(format!("saga n={n} T={iters} b={b}: got {saga:?}, want {want:?}"));
        }
    }
    out
}

/// Largest coordinate gap between the ProxGD path and the ProxSVRG / ProxSGD
/// paths when every minibatch is the full index set, over `steps` steps.
pub fn full_batch_path_gap(steps: u64, seed: u64) -> f64 {
    use proxvr::metrics::default_start;
    use proxvr::problem::{make_pl_quadratic, make_synthetic_nnpca, CompositeProblem, SmoothPart};
    use proxvr::rng::FullBatch;
    use proxvr::solvers::{plan_manual, prox_gd, prox_sgd, prox_svrg, RunOptions, SgdSchedule};

    fn gap_for<S: SmoothPart>(p: &CompositeProblem<S>, x0: &DenseVector, steps: u64, seed: u64) -> f64 {
        let opts = RunOptions {
            track_path: true,
            ..Default::default()
        };
        let n = p.n();
        let eta = 0.5 / p.lipschitz();
        let gd = prox_gd(p, x0, eta, steps, &opts).unwrap().path;
        let m = 10;
        let (plan, _) = plan_manual(n, p.lipschitz(), eta, n, Some(m)).unwrap();
        let svrg = prox_svrg(p, x0, &plan, steps.div_ceil(m as u64), &mut FullBatch::new(seed), &opts)
            .unwrap()
            .path;
        let sgd = prox_sgd(p, x0, SgdSchedule::constant(eta), n, steps, &mut FullBatch::new(seed), &opts)
            .unwrap()
            .path;
        assert_eq!(gd.len(), steps as usize);
        let mut worst = 0.0f64;
        for other in [&svrg, &sgd] {
            for (a, b) in gd.iter().zip(other.iter()) {
                for (u, v) in a.iter().zip(b.iter()) {
                    worst = worst.max((u - v).abs());
                }
            }
        }
        worst
    }

    let mut rng = RngStream::new(seed);
    let quad = make_pl_quadratic(&mut rng, 40, 6, 0.05).unwrap();
    let nnpca = make_synthetic_nnpca(&mut rng, 40, 6, true).unwrap();
    let x0q = dv(&random_point(&mut rng, 6, 1.0));
    let mut x0n = default_start(nnpca.h(), 6).into_vec();
    x0n[0] = 0.5;
    x0n[3] = 0.5;
    gap_for(&quad, &x0q, steps, seed).max(gap_for(&nnpca, &dv(&x0n), steps, seed))
}

/// With `h ≡ 0`, the largest `‖G_η(x) − ∇f(x)‖` over `points` random `x`
/// per problem family; and `‖G_η‖` at the point ProxGD converges to on the
/// ℓ1-regularized least-squares testbed.
pub fn gradient_mapping_identity(points: usize, seed: u64) -> (f64, f64) {
    use proxvr::metrics::gradient_mapping;
    use proxvr::problem::{make_pl_quadratic, make_synthetic_nnpca, CompositeProblem, Counting, SmoothPart};
    use proxvr::solvers::{prox_gd, RunOptions};

    fn worst<S: SmoothPart>(p: &CompositeProblem<S>, rng: &mut RngStream, points: usize) -> f64 {
        let mut w = 0.0f64;
        for _ in 0..points {
            let x = dv(&random_point(rng, p.dim(), 1.0));
            let eta = 0.01 + rng.uniform();
            let g = p.full_gradient_with(&x, Counting::Measurement).unwrap();
            let gm = gradient_mapping(p, &x, eta, Counting::Measurement).unwrap();
            w = w.max(gm.dist2_sq(&g).unwrap().sqrt());
        }
        w
    }

    let mut rng = RngStream::new(seed);
    let quad = make_pl_quadratic(&mut rng, 256, 10, 0.01).unwrap();
    let nnpca = make_synthetic_nnpca(&mut rng, 200, 8, true).unwrap();
    let q0 = CompositeProblem::new(quad.smooth().clone(), ProxOperator::Zero).unwrap();
    let n0 = CompositeProblem::new(nnpca.smooth().clone(), ProxOperator::Zero).unwrap();
    let identity = worst(&q0, &mut rng, points).max(worst(&n0, &mut rng, points));

    let eta = 1.0 / quad.lipschitz();
    let x0 = dv(&[0.0; 10]);
    let fixed = prox_gd(&quad, &x0, eta, 10_000, &RunOptions::default()).unwrap().x_last;
    let at_fixed = gradient_mapping(&quad, &fixed, eta, Counting::Measurement).unwrap().norm();
    (identity, at_fixed)
}

/// A random sparse dataset: 1 to 30 rows, dimension up to 50, some empty
/// rows, mixed-sign labels and values spanning many magnitudes.
pub fn random_dataset(rng: &mut RngStream) -> proxvr::data::Dataset {
    use proxvr::linalg::SparseVector;
    let n = 1 + rng.below(30) as usize;
    let dim = 1 + rng.below(50) as usize;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for r in 0..n {
        let mut idx = Vec::new();
        let mut vals = Vec::new();
        for j in 0..dim {
            if rng.uniform() < 0.3 {
                let v = rng.standard_normal() * 10f64.powi(rng.below(13) as i32 - 6);
                if v != 0.0 {
                    idx.push(j as u32);
                    vals.push(v);
                }
            }
        }
        // Pin the largest index on the first row so the inferred dimension
        // equals `dim`.
        if r == 0 && idx.last() != Some(&((dim - 1) as u32)) {
            idx.push((dim - 1) as u32);
            vals.push(1.0);
        }
        rows.push(SparseVector::new(idx, vals, dim).unwrap());
        labels.push(if rng.uniform() < 0.5 { (rng.below(5) as f64) - 2.0 } else { rng.standard_normal() });
    }
    proxvr::data::Dataset::new(rows, labels).unwrap()
}

/// Number of generated datasets whose LIBSVM text does not parse back to an
/// identical dataset.
pub fn libsvm_round_trip_failures(count: usize, seed: u64) -> usize {
    use proxvr::data::{parse_libsvm_str, to_libsvm_string};
    let mut rng = RngStream::new(seed);
    (0..count)
        .filter(|_| {
            let ds = random_dataset(&mut rng);
            let text = to_libsvm_string(&ds);
            let back = parse_libsvm_str(&text).unwrap();
            back != ds || to_libsvm_string(&back) != text
        })
        .count()
}
