//! Independent reference computations and property checks shared by the
//! property suite and the acceptance suite.
//!
//! The references use exact rational arithmetic where that is possible and
//! plain `f64` integrators with Richardson error estimates elsewhere. None of
//! them calls into the rigorous layer they are compared with.

#![allow(dead_code)]

use std::f64::consts::TAU;

use cxheat_core::evolution::tail_constants;
use cxheat_core::interval::{ComplexInterval, RealInterval};
use cxheat_core::stepper::{replay_chain, run_contour, ContourSchedule, Flow, Segment, StepCertificate, StepperOptions};
use cxheat_core::variational::validate_pair;
use cxheat_core::{ChebFourier, EquationParams, FourierVec};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run_prop<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Check) -> Check
where
    S::Value: std::fmt::Debug,
{
    runner(cases)
        .run(&strategy, |v| test(v).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Exact and f64 reference arithmetic
// ---------------------------------------------------------------------------

/// Exact rational value of a finite double.
pub fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// `x ∈ I` decided in exact arithmetic.
pub fn q_in(x: &BigRational, i: RealInterval) -> bool {
    i.is_valid() && q(i.lo) <= *x && *x <= q(i.hi)
}

/// Chebyshev × Fourier evaluation in `f64` with value `a_0 + 2 Σ a_ℓ T_ℓ(τ)`.
pub fn cheb_eval(abar: &ChebFourier, t: f64) -> Vec<Complex64> {
    let nf = abar.fourier_order() as i64;
    let tau = ((2.0 * t - abar.t_lo - abar.t_hi) / (abar.t_hi - abar.t_lo)).clamp(-1.0, 1.0);
    let n = abar.cheb_order();
    let mut tl = vec![0.0; n.max(2)];
    tl[0] = 1.0;
    tl[1] = tau;
    for l in 2..n {
        tl[l] = 2.0 * tau * tl[l - 1] - tl[l - 2];
    }
    (-nf..=nf)
        .map(|k| {
            (0..n).fold(Complex64::new(0.0, 0.0), |acc, l| {
                let (re, im) = abar.get(l, k).mid();
                let w = if l == 0 { 1.0 } else { 2.0 };
                acc + Complex64::new(re, im) * (w * tl[l])
            })
        })
        .collect()
}

fn idx(k: i64, nf: usize) -> Option<usize> {
    (k.unsigned_abs() as usize <= nf).then(|| (k + nf as i64) as usize)
}

/// `e^{iθ}(-k²ω² u_k + (u*u)_k)` for the Galerkin truncation at `nf`.
pub fn galerkin_rhs(u: &[Complex64], nf: usize, rot: Complex64) -> Vec<Complex64> {
    let n = nf as i64;
    (-n..=n)
        .map(|k| {
            let mut conv = Complex64::new(0.0, 0.0);
            for j in -n..=n {
                if let Some(i) = idx(k - j, nf) {
                    conv += u[(j + n) as usize] * u[i];
                }
            }
            let lin = -((k * k) as f64) * TAU * TAU * u[(k + n) as usize];
            rot * (lin + conv)
        })
        .collect()
}

fn rk4_generic(
    y0: &[Complex64],
    t0: f64,
    t1: f64,
    steps: usize,
    f: &impl Fn(f64, &[Complex64]) -> Vec<Complex64>,
) -> Vec<Complex64> {
    let dt = (t1 - t0) / steps as f64;
    let mut y = y0.to_vec();
    let axpy = |y: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        y.iter().zip(k).map(|(a, b)| a + b * s).collect()
    };
    for i in 0..steps {
        let t = t0 + dt * i as f64;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * dt, &axpy(&y, &k1, 0.5 * dt));
        let k3 = f(t + 0.5 * dt, &axpy(&y, &k2, 0.5 * dt));
        let k4 = f(t + dt, &axpy(&y, &k3, dt));
        for j in 0..y.len() {
            y[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (dt / 6.0);
        }
    }
    y
}

/// RK4 with `steps` and `2 steps` substeps; returns the finer solution and a
/// Richardson estimate of its ℓ¹ error plus accumulated rounding.
pub fn rk4_with_error(
    y0: &[Complex64],
    t0: f64,
    t1: f64,
    steps: usize,
    f: &impl Fn(f64, &[Complex64]) -> Vec<Complex64>,
) -> (Vec<Complex64>, f64) {
    let coarse = rk4_generic(y0, t0, t1, steps, f);
    let fine = rk4_generic(y0, t0, t1, 2 * steps, f);
    let diff: f64 = coarse.iter().zip(&fine).map(|(a, b)| (a - b).norm()).sum();
    let size: f64 = fine.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
    (fine, diff / 15.0 + 1e-15 * (2 * steps) as f64 * size)
}

/// Right-hand side of the variational equation about `ā` restricted to `|k| <= m`:
/// `c' = e^{iθ}(-k²ω² c + 2 P_m(ā(t) * c))`, or of its adjoint `c' = -Aᵀ c`.
pub fn variational_rhs(abar: &ChebFourier, m: usize, rot: Complex64, adjoint: bool) -> impl Fn(f64, &[Complex64]) -> Vec<Complex64> + '_ {
    move |t, c| {
        let a = cheb_eval(abar, t);
        let nf = abar.fourier_order();
        let mi = m as i64;
        let entry = |k: i64, j: i64| -> Complex64 {
            let mut v = match idx(k - j, nf) {
                Some(i) => a[i] * 2.0,
                None => Complex64::new(0.0, 0.0),
            };
            if k == j {
                v -= Complex64::new((k * k) as f64 * TAU * TAU, 0.0);
            }
            rot * v
        };
        (-mi..=mi)
            .map(|k| {
                (-mi..=mi).fold(Complex64::new(0.0, 0.0), |acc, j| {
                    let cj = c[(j + mi) as usize];
                    if adjoint {
                        acc - entry(j, k) * cj
                    } else {
                        acc + entry(k, j) * cj
                    }
                })
            })
            .collect()
    }
}

/// ℓ¹ distance from the point `x` to the midpoints of `enc`, and the summed
/// radii of `enc`.
pub fn distance(x: &[Complex64], enc: &FourierVec) -> (f64, f64) {
    let nf = enc.max_wavenumber() as i64;
    let xn = ((x.len() - 1) / 2) as i64;
    let mut d = 0.0;
    let mut rad = 0.0;
    for k in -xn.max(nf)..=xn.max(nf) {
        let xv = if k.abs() <= xn { x[(k + xn) as usize] } else { Complex64::new(0.0, 0.0) };
        let e = if k.abs() <= nf { enc.get(k) } else { ComplexInterval::ZERO };
        let (re, im) = e.mid();
        d += (xv - Complex64::new(re, im)).norm();
        rad += e.re.rad() + e.im.rad();
    }
    (d, rad)
}

/// A random Chebyshev × Fourier series with coefficients decaying like `decay^ℓ`.
pub fn random_series(rng: &mut ChaCha8Rng, t_lo: f64, t_hi: f64, n: usize, nf: usize, amp: f64, decay: f64) -> ChebFourier {
    let mut vals = Vec::with_capacity(n * (2 * nf + 1));
    for l in 0..n {
        let s = amp * decay.powi(l as i32);
        for _ in 0..(2 * nf + 1) {
            vals.push((rng.gen_range(-s..=s), rng.gen_range(-s..=s)));
        }
    }
    ChebFourier::from_points(t_lo, t_hi, n, nf, &vals)
}

// ---------------------------------------------------------------------------
// Interval containment
// ---------------------------------------------------------------------------

fn magnitude() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3f64..1e3,
        -1.0f64..1.0,
        -1e-6f64..1e-6,
        (-64i32..64).prop_map(|i| i as f64 * 0.25),
        (-1.0f64..1.0, -300i32..300).prop_map(|(m, e)| m * 2f64.powi(e)),
    ]
}

fn interval() -> impl Strategy<Value = RealInterval> {
    (magnitude(), magnitude(), 0u8..4).prop_map(|(a, b, kind)| match kind {
        0 => RealInterval::point(a),
        _ => RealInterval::new(a.min(b), a.max(b)),
    })
}

/// Points of `i`: both endpoints and an interior point at fraction `f`.
fn points(i: RealInterval, f: f64) -> [f64; 3] {
    let inner = (i.lo + f * (i.hi - i.lo)).clamp(i.lo, i.hi);
    [i.lo, i.hi, inner]
}

fn binary_containment(
    cases: u32,
    name: &str,
    op: impl Fn(RealInterval, RealInterval) -> RealInterval,
    exact: impl Fn(&BigRational, &BigRational) -> Option<BigRational>,
) -> Check {
    run_prop(cases, (interval(), interval(), 0.0f64..1.0, 0.0f64..1.0), |(a, b, f, g)| {
        let r = op(a, b);
        for x in points(a, f) {
            for y in points(b, g) {
                if let Some(v) = exact(&q(x), &q(y)) {
                    if r.is_valid() {
                        ensure(q_in(&v, r), || format!("{name}: {x:e}, {y:e} not in {r:?} for {a:?}, {b:?}"))?;
                    } else {
                        ensure(!r.lo.is_finite() || !r.hi.is_finite() || r.lo.is_nan(), || {
                            format!("{name}: invalid result {r:?} for {a:?}, {b:?}")
                        })?;
                    }
                }
            }
        }
        Ok(())
    })
}

fn unary_containment(
    cases: u32,
    name: &str,
    domain: impl Strategy<Value = RealInterval>,
    op: impl Fn(RealInterval) -> RealInterval,
    check: impl Fn(f64, RealInterval) -> bool,
) -> Check {
    run_prop(cases, (domain, 0.0f64..1.0), |(a, f)| {
        let r = op(a);
        ensure(r.is_valid(), || format!("{name}: invalid result for {a:?}"))?;
        for x in points(a, f) {
            ensure(check(x, r), || format!("{name}: {x:e} maps outside {r:?} for {a:?}"))?;
        }
        Ok(())
    })
}

/// The libm value is within one ulp of the true value; the enclosure must
/// contain that whole neighborhood.
fn contains_ulp_ball(v: f64, r: RealInterval) -> bool {
    r.lo <= v.next_down() && v.next_up() <= r.hi
}

/// Containment fuzz of every interval operation, `cases` inputs per operation.
pub fn interval_fuzz(cases: u32) -> Check {
    binary_containment(cases, "add", |a, b| a + b, |x, y| Some(x + y))?;
    binary_containment(cases, "sub", |a, b| a - b, |x, y| Some(x - y))?;
    binary_containment(cases, "mul", |a, b| a * b, |x, y| Some(x * y))?;
    binary_containment(
        cases,
        "div",
        |a, b| if b.contains(0.0) { RealInterval::INVALID } else { a / b },
        |x, y| (!y.is_zero()).then(|| x / y),
    )?;
    unary_containment(cases, "sqr", interval(), |a| a.sqr(), |x, r| q_in(&(q(x) * q(x)), r))?;
    unary_containment(
        cases,
        "sqrt",
        interval().prop_map(|i| i.abs()),
        |a| a.sqrt(),
        |x, r| {
            let v = q(x);
            r.lo >= 0.0 && q(r.lo) * q(r.lo) <= v && v <= q(r.hi) * q(r.hi)
        },
    )?;
    let exp_domain = (-700.0f64..700.0, 0.0f64..5.0).prop_map(|(a, w)| RealInterval::new(a, (a + w).min(700.0)));
    unary_containment(cases, "exp", exp_domain, |a| a.exp(), |x, r| contains_ulp_ball(x.exp(), r))?;
    let trig_domain = (-1.5f64..1.5, 0.0f64..0.07).prop_map(|(a, w)| RealInterval::new(a, (a + w).min(1.57)));
    unary_containment(cases, "cos", trig_domain.clone(), |a| a.cos(), |x, r| contains_ulp_ball(x.cos(), r))?;
    unary_containment(cases, "sin", trig_domain, |a| a.sin(), |x, r| contains_ulp_ball(x.sin(), r))?;
    run_prop(
        cases,
        (interval(), interval(), interval(), interval(), 0.0f64..1.0),
        |(ar, ai, br, bi, f)| {
            let p = ComplexInterval::new(ar, ai) * ComplexInterval::new(br, bi);
            let (xr, xi, yr, yi) = (points(ar, f)[2], points(ai, f)[2], points(br, f)[2], points(bi, f)[2]);
            let (re, im) = (q(xr) * q(yr) - q(xi) * q(yi), q(xr) * q(yi) + q(xi) * q(yr));
            ensure(q_in(&re, p.re) && q_in(&im, p.im), || format!("complex mul: {p:?}"))
        },
    )
}

// ---------------------------------------------------------------------------
// Banach algebra
// ---------------------------------------------------------------------------

fn point_vec(nf: usize, vals: &[(f64, f64)]) -> FourierVec {
    FourierVec::from_coeffs(nf, vals.iter().map(|&(r, i)| ComplexInterval::point(r, i)).collect())
}

type Coeffs = Vec<(f64, f64)>;

fn fourier_strategy() -> impl Strategy<Value = (usize, Coeffs, Coeffs)> {
    (1usize..8).prop_flat_map(|nf| {
        let c = (-10.0f64..10.0, -10.0f64..10.0);
        (
            Just(nf),
            prop::collection::vec(c.clone(), 2 * nf + 1),
            prop::collection::vec(c, 2 * nf + 1),
        )
    })
}

fn cheb_strategy() -> impl Strategy<Value = (usize, usize, f64, Coeffs, Coeffs)> {
    (2usize..6, 1usize..4, 1.0f64..3.0).prop_flat_map(|(n, nf, nu)| {
        let c = (-2.0f64..2.0, -2.0f64..2.0);
        let len = n * (2 * nf + 1);
        (
            Just(n),
            Just(nf),
            Just(nu),
            prop::collection::vec(c.clone(), len),
            prop::collection::vec(c, len),
        )
    })
}

/// `‖a*b‖ <= ‖a‖‖b‖` in ℓ¹, `‖a*b‖_ν <= 4‖a‖_ν‖b‖_ν` for Chebyshev × Fourier
/// series, and containment of exact rational products, on `cases` inputs each.
pub fn banach_algebra(cases: u32) -> Check {
    run_prop(cases, fourier_strategy(), |(nf, av, bv)| {
        let (a, b) = (point_vec(nf, &av), point_vec(nf, &bv));
        let c = a.convolve(&b);
        let bound = a.ell1_norm() * b.ell1_norm();
        ensure(c.ell1_norm().lo <= bound.hi, || format!("l1 algebra: {:?} > {:?}", c.ell1_norm(), bound))?;
        let n = nf as i64;
        for k in -2 * n..=2 * n {
            let (mut re, mut im) = (BigRational::zero(), BigRational::zero());
            for j in -n..=n {
                if (k - j).abs() <= n {
                    let (x, y) = (av[(j + n) as usize], bv[(k - j + n) as usize]);
                    re += q(x.0) * q(y.0) - q(x.1) * q(y.1);
                    im += q(x.0) * q(y.1) + q(x.1) * q(y.0);
                }
            }
            let ck = c.get(k);
            ensure(q_in(&re, ck.re) && q_in(&im, ck.im), || format!("convolution coefficient {k}"))?;
        }
        Ok(())
    })?;
    run_prop(cases, cheb_strategy(), |(n, nf, nu, av, bv)| {
        let a = ChebFourier::from_points(0.0, 1.0, n, nf, &av);
        let b = ChebFourier::from_points(0.0, 1.0, n, nf, &bv);
        let c = a.cheb_convolve(&b).map_err(|e| e.to_string())?;
        let lhs = c.weighted_norm(nu).value;
        let rhs = RealInterval::point(4.0) * a.weighted_norm(nu).value * b.weighted_norm(nu).value;
        ensure(lhs.lo <= rhs.hi, || format!("weighted algebra: {lhs:?} > {rhs:?}"))?;
        // Symmetric extension over ℓ ∈ ℤ: c_ℓ = Σ_j a_{|j|} b_{|ℓ-j|}.
        let (ni, fi) = (n as i64, nf as i64);
        let at = |v: &[(f64, f64)], l: i64, k: i64| v[(l.unsigned_abs() as usize) * (2 * nf + 1) + (k + fi) as usize];
        for l in 0..(2 * ni - 1) {
            for k in -2 * fi..=2 * fi {
                let (mut re, mut im) = (BigRational::zero(), BigRational::zero());
                for j in -(ni - 1)..=(ni - 1) {
                    if (l - j).abs() > ni - 1 {
                        continue;
                    }
                    for p in -fi..=fi {
                        if (k - p).abs() > fi {
                            continue;
                        }
                        let (x, y) = (at(&av, j, p), at(&bv, l - j, k - p));
                        re += q(x.0) * q(y.0) - q(x.1) * q(y.1);
                        im += q(x.0) * q(y.1) + q(x.1) * q(y.0);
                    }
                }
                let e = c.get(l as usize, k);
                ensure(q_in(&re, e.re) && q_in(&im, e.im), || format!("Chebyshev product coefficient ({l}, {k})"))?;
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Tail inequalities by quadrature
// ---------------------------------------------------------------------------

struct Profile {
    grid: Vec<f64>,
    g: Vec<f64>,
}

/// Cumulative `G(τ) = ∫_0^τ (2‖ā(σ)‖ - μ) dσ` on a uniform grid, trapezoidal.
fn profile(abar: &ChebFourier, mu: f64, nodes: usize) -> Profile {
    let h = abar.t_hi - abar.t_lo;
    let grid: Vec<f64> = (0..=nodes).map(|i| abar.t_lo + h * i as f64 / nodes as f64).collect();
    let rate: Vec<f64> = grid
        .iter()
        .map(|&t| 2.0 * cheb_eval(abar, t).iter().map(|z| z.norm()).sum::<f64>() - mu)
        .collect();
    let mut g = vec![0.0; nodes + 1];
    for i in 1..=nodes {
        g[i] = g[i - 1] + 0.5 * (rate[i] + rate[i - 1]) * (grid[i] - grid[i - 1]);
    }
    Profile { grid, g }
}

/// The three tail integrals between grid nodes `i <= j`.
fn tail_integrals(p: &Profile, i: usize, j: usize) -> [f64; 4] {
    let w = |a: usize, b: usize| (p.g[a] - p.g[b]).exp();
    let dt = p.grid[1] - p.grid[0];
    let trap = |f: &dyn Fn(usize) -> f64| -> f64 {
        if i == j {
            return 0.0;
        }
        let inner: f64 = (i + 1..j).map(f).sum();
        dt * (inner + 0.5 * (f(i) + f(j)))
    };
    let forward = trap(&|a| w(a, i));
    let backward = trap(&|a| w(j, a));
    let mut cumulative = vec![0.0; j + 1];
    for a in i + 1..=j {
        cumulative[a] = cumulative[a - 1] + 0.5 * dt * ((-p.g[a]).exp() + (-p.g[a - 1]).exp());
    }
    let double = trap(&|a| p.g[a].exp() * cumulative[a]);
    [w(j, i), forward, backward, double]
}

/// Samples `(s, t)` pairs for `sets` random series and checks the three tail
/// inequalities against quadrature of the true norm profile.
pub fn tail_inequalities(sets: usize, samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = 800;
    for set in 0..sets {
        let theta = rng.gen_range(-1.3..1.3);
        let params = EquationParams::new(format!("{theta}"), RealInterval::point(theta)).map_err(|e| e.to_string())?;
        let m = rng.gen_range(0..=2usize);
        let h = rng.gen_range(1e-4..1e-2);
        let mu = ((m + 1) * (m + 1)) as f64 * TAU * TAU * theta.cos();
        let target = rng.gen_range(0.0..0.5) * mu;
        let raw = random_series(&mut rng, 0.0, h, 5, 3, 1.0, 0.4);
        let scale = target / raw.sup_norm_x().hi.max(1e-300);
        let abar = raw.scale(ComplexInterval::point(scale, 0.0));
        let tc = tail_constants(&abar, m, &params).map_err(|e| e.to_string())?;
        let coarse = profile(&abar, mu, nodes);
        let fine = profile(&abar, mu, 2 * nodes);
        for sample in 0..samples {
            let (a, b) = (rng.gen_range(0..=nodes), rng.gen_range(0..=nodes));
            let (i, j) = if sample == 0 { (0, nodes) } else { (a.min(b), a.max(b)) };
            let c = tail_integrals(&coarse, i, j);
            let f = tail_integrals(&fine, 2 * i, 2 * j);
            for (q, name, bound) in [
                (0, "sup", tc.w_inf_sup),
                (1, "forward integral", tc.w_inf),
                (2, "backward integral", tc.w_inf),
                (3, "double integral", tc.w_inf_bar),
            ] {
                // Richardson extrapolation of the trapezoidal values.
                let value = (4.0 * f[q] - c[q]) / 3.0;
                let slack = 1e-12 * value.abs();
                ensure(value - slack <= bound.hi, || {
                    format!("set {set}: {name} {value:e} exceeds {:e} (theta {theta}, m {m}, h {h})", bound.hi)
                })?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Fundamental matrix tube
// ---------------------------------------------------------------------------

/// Validates `Φ` and `Ψᵀ` for `systems` random small problems and checks that
/// dense RK4 solutions stay inside the validated tubes at sampled times.
pub fn fundamental_tube(systems: usize, times: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for sys in 0..systems {
        let theta = rng.gen_range(-1.3..1.3);
        let params = EquationParams::new(format!("{theta}"), RealInterval::point(theta)).map_err(|e| e.to_string())?;
        let nf = rng.gen_range(1..=3usize);
        let m = rng.gen_range(0..=nf.min(2));
        let h = rng.gen_range(1e-3..1e-2);
        let t_lo = rng.gen_range(0.0..0.1);
        let order = rng.gen_range(3..=6);
        let abar = random_series(&mut rng, t_lo, t_lo + h, order, nf, 3.0, 0.3);
        let n = 12;
        let (phi, psi) = validate_pair(&abar, m, n, &[1.5, 2.0, 3.0, 1.2], &params).map_err(|e| format!("system {sys}: {e}"))?;
        let rot = Complex64::from_polar(1.0, theta);
        for (mat, adjoint) in [(&phi, false), (&psi, true)] {
            let f = variational_rhs(&abar, m, rot, adjoint);
            for (j, col) in mat.columns.iter().enumerate() {
                let mut y = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
                y[j] = Complex64::new(1.0, 0.0);
                let mut t = t_lo;
                let mut err = 0.0;
                for s in 1..=times {
                    let next = t_lo + h * s as f64 / times as f64;
                    let (y1, e) = rk4_with_error(&y, t, next, 40, &f);
                    y = y1;
                    err += e;
                    t = next;
                    let enc = col.eval_at(t);
                    let (d, rad) = distance(&y, &enc);
                    let allowed = 2.0 * mat.radii[j] + rad + err;
                    ensure(d <= allowed, || {
                        format!(
                            "system {sys} (adjoint {adjoint}) column {j} at t = {t}: distance {d:e} > {allowed:e} (r = {:e})",
                            mat.radii[j]
                        )
                    })?;
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Local inclusion tube
// ---------------------------------------------------------------------------

/// Validated steps of a small run together with their approximations.
pub fn small_run(theta: &str, u0: &FourierVec, seg: (f64, f64, usize, usize, usize)) -> (Vec<StepCertificate>, Vec<ChebFourier>) {
    let (length, h, nf, n, m) = seg;
    let schedule = ContourSchedule {
        segments: vec![Segment {
            params: EquationParams::from_expr(theta).unwrap(),
            length,
            h,
            nf,
            n,
            m,
            nu: 1.5,
        }],
    };
    let mut approx = Vec::new();
    let run = run_contour(u0, RealInterval::ZERO, &schedule, &StepperOptions::default(), |_, a| {
        approx.push(a.clone());
        Flow::Continue
    })
    .unwrap();
    (run.certificates, approx)
}

/// Integrates a Galerkin system of twice the truncation and checks that it
/// stays within `ϱ_i` of `ā` at `samples` times inside each of `steps` steps.
pub fn inclusion_tube(steps: usize, samples: usize) -> Check {
    let theta = std::f64::consts::FRAC_PI_4;
    let u0 = FourierVec::from_modes(6, &[(0, 5.0, 0.0), (1, -2.5, 0.0), (-1, -2.5, 0.0)]);
    let h = 2e-3;
    let (certs, approx) = small_run("pi/4", &u0, (h * steps as f64, h, 6, 6, 1));
    let reached = certs.last().map_or(0.0, |c| c.s_hi);
    ensure((reached - h * steps as f64).abs() < 1e-12, || format!("run stopped at {reached}"))?;
    let big = 12usize;
    let rot = Complex64::from_polar(1.0, theta);
    let f = |_: f64, u: &[Complex64]| galerkin_rhs(u, big, rot);
    let mut y: Vec<Complex64> = (-(big as i64)..=big as i64)
        .map(|k| {
            let (re, im) = u0.get(k).mid();
            Complex64::new(re, im)
        })
        .collect();
    let mut t = 0.0;
    let mut err = 0.0;
    for (cert, abar) in certs.iter().zip(&approx) {
        for s in 1..=samples {
            let next = cert.s_lo + (cert.s_hi - cert.s_lo) * s as f64 / samples as f64;
            let (y1, e) = rk4_with_error(&y, t, next, 60, &f);
            y = y1;
            err += e;
            t = next;
            let (d, rad) = distance(&y, &abar.eval_at(t));
            let rho = cert.inclusion.rho.hi;
            ensure(err < 0.1 * rho, || format!("oracle error {err:e} does not resolve rho {rho:e}"))?;
            ensure(d <= rho + rad + err, || {
                format!("step {} at t = {t}: distance {d:e} > rho {rho:e} (+{rad:e}, oracle {err:e})", cert.index)
            })?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Replay determinism
// ---------------------------------------------------------------------------

/// Runs a small contour twice and checks that the certificates agree bit for
/// bit, survive a JSON round trip and replay.
pub fn replay_determinism(cases: u32) -> Check {
    let strategy = (
        prop_oneof![Just("pi/3"), Just("-pi/3"), Just("pi/4"), Just("0")],
        -3.0f64..3.0,
        -2.0f64..2.0,
        1usize..=2,
    );
    run_prop(cases, strategy, |(theta, mean, amp, m)| {
        let u0 = FourierVec::from_modes(4, &[(0, mean, 0.0), (1, amp, 0.5), (-1, amp, -0.5)]);
        let (a, _) = small_run(theta, &u0, (3e-3, 1e-3, 4, 9, m));
        let (b, _) = small_run(theta, &u0, (3e-3, 1e-3, 4, 9, m));
        ensure(a == b, || "two runs differ".into())?;
        let text = serde_json::to_string(&a).map_err(|e| e.to_string())?;
        let back: Vec<StepCertificate> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        ensure(back == a, || "JSON round trip changed a certificate".into())?;
        let report = replay_chain(&back, RealInterval::ZERO);
        ensure(report.passed(), || format!("{:?}", report.failures))
    })
}
