//! Clock samplers, killed Brownian paths, and Monte Carlo estimators.
//!
//! Brownian motion here has variance 2t (generator is the full Laplacian),
//! so path increments over dt are N(0, 2 dt) per coordinate and the
//! Brownian-bridge wall-crossing probability over a step is
//! exp(-(b - x_i)(b - x_{i+1}) / dt).

use crate::clock::ClockKind;
use crate::domain::{DomainKind, DomainSpec, InitialCondition};
use crate::error::{Error, Result};
use crate::special::stable::kanter_a;

use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha12Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

/// Seeded, stream-addressed RNG factory. Identical (seed, stream) pairs
/// reproduce identical sequences; distinct streams are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, stream: 0 }
    }

    pub fn with_stream(&self, stream: u64) -> Self {
        RngStream { seed: self.seed, stream }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// One realized clock value at outer time t.
#[derive(Debug, Clone, Copy)]
pub struct ClockSample {
    pub kind: ClockKind,
    pub t: f64,
    /// Realized clock; negative only for two-sided clocks.
    pub value: f64,
}

/// One draw of D(1), the unit-time one-sided stable subordinator with
/// Laplace transform exp(-s^beta), via the Chambers-Mallows-Stuck sampler in
/// its one-sided (Kanter) form: D = (a(theta)/W)^{(1-beta)/beta}.
pub fn sample_stable_subordinator<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> Result<f64> {
    crate::special::stable::validate_beta(beta, "sample_stable_subordinator")?;
    let theta = (std::f64::consts::PI * rng.random::<f64>()).max(1e-12);
    let w: f64 = rng.sample(Exp1);
    Ok((kanter_a(beta, theta) / w).powf((1.0 - beta) / beta))
}

/// E^beta(t) by the inversion identity E^beta(t) = (t / D(1))^beta in law.
pub fn sample_inverse_stable<R: Rng + ?Sized>(
    beta: f64,
    t: f64,
    rng: &mut R,
) -> Result<ClockSample> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::parameter("sample_inverse_stable: need t >= 0"));
    }
    let d = sample_stable_subordinator(beta, rng)?;
    Ok(ClockSample {
        kind: ClockKind::InverseStable { beta },
        t,
        value: (t / d).powf(beta),
    })
}

/// |I_k(t)|: k nested half-normal draws, innermost at time t. Only the
/// fixed-t marginal is needed, so no path is simulated.
pub fn sample_iterated_bm_clock<R: Rng + ?Sized>(
    k: u32,
    t: f64,
    rng: &mut R,
) -> Result<ClockSample> {
    let kind = ClockKind::IteratedBm { k };
    kind.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::parameter("sample_iterated_bm_clock: need t >= 0"));
    }
    let mut s = t;
    for _ in 0..k {
        let z: f64 = rng.sample(StandardNormal);
        s = ((2.0 * s).sqrt() * z).abs();
    }
    Ok(ClockSample { kind, t, value: s })
}

/// J_k(t): nested signed normal draws through two-sided Brownian motions.
pub fn sample_two_sided_clock<R: Rng + ?Sized>(
    k: u32,
    t: f64,
    rng: &mut R,
) -> Result<ClockSample> {
    let kind = ClockKind::TwoSidedIterated { k };
    kind.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::parameter("sample_two_sided_clock: need t >= 0"));
    }
    let mut v = t;
    for _ in 0..k {
        let z: f64 = rng.sample(StandardNormal);
        v = (2.0 * v.abs()).sqrt() * z;
    }
    Ok(ClockSample { kind, t, value: v })
}

/// |Y(t)| for a standard symmetric alpha-stable Y, via the
/// Chambers-Mallows-Stuck transform and the t^{1/alpha} scaling.
pub fn sample_alpha_clock<R: Rng + ?Sized>(
    alpha: f64,
    t: f64,
    rng: &mut R,
) -> Result<ClockSample> {
    let kind = ClockKind::AlphaStable { alpha };
    kind.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::parameter("sample_alpha_clock: need t >= 0"));
    }
    let v = std::f64::consts::PI * (rng.random::<f64>() - 0.5);
    let w: f64 = rng.sample(Exp1);
    let s = (alpha * v).sin() / v.cos().powf(1.0 / alpha)
        * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
    Ok(ClockSample { kind, t, value: (t.powf(1.0 / alpha) * s).abs() })
}

/// Dispatch on the clock kind.
pub fn sample_clock<R: Rng + ?Sized>(kind: ClockKind, t: f64, rng: &mut R) -> Result<ClockSample> {
    match kind {
        ClockKind::InverseStable { beta } => sample_inverse_stable(beta, t, rng),
        ClockKind::IteratedBm { k } => sample_iterated_bm_clock(k, t, rng),
        ClockKind::TwoSidedIterated { k } => sample_two_sided_clock(k, t, rng),
        ClockKind::AlphaStable { alpha } => sample_alpha_clock(alpha, t, rng),
    }
}

/// Outcome of one killed Brownian walk.
#[derive(Debug, Clone)]
pub struct KilledPath {
    pub exited: bool,
    /// Final state: position at the horizon, or (approximately) where the
    /// walk was absorbed.
    pub position: Vec<f64>,
    pub exit_time: Option<f64>,
}

fn walls(domain: &DomainSpec) -> Result<Vec<(f64, f64)>> {
    match domain.kind() {
        DomainKind::Interval { .. } | DomainKind::Box { .. } => Ok(domain.bounds()),
        DomainKind::Table { .. } => Err(Error::parameter(
            "path simulation needs explicit geometry; table domains are spectral-only",
        )),
    }
}

/// Euler walk with increments N(0, 2h) per coordinate and a per-step
/// Brownian-bridge crossing check against the nearest wall in each
/// coordinate.
pub fn simulate_killed_path<R: Rng + ?Sized>(
    domain: &DomainSpec,
    x0: &[f64],
    horizon: f64,
    h: f64,
    rng: &mut R,
) -> Result<KilledPath> {
    let bounds = walls(domain)?;
    if !domain.is_interior(x0) {
        return Err(Error::parameter(
            "simulate_killed_path: start point must lie in the open domain",
        ));
    }
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::parameter("simulate_killed_path: need horizon >= 0"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::parameter("simulate_killed_path: need h > 0"));
    }

    let mut x = x0.to_vec();
    let mut next = vec![0.0; x.len()];
    let mut done = 0.0;
    while done < horizon {
        let dt = h.min(horizon - done);
        if dt <= 0.0 {
            break;
        }
        let sd = (2.0 * dt).sqrt();
        let mut outside = false;
        for (i, xi) in x.iter().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            let v = xi + sd * z;
            outside |= v <= bounds[i].0 || v >= bounds[i].1;
            next[i] = v;
        }
        done += dt;
        if outside {
            for (i, v) in next.iter().enumerate() {
                x[i] = v.clamp(bounds[i].0, bounds[i].1);
            }
            return Ok(KilledPath { exited: true, position: x, exit_time: Some(done) });
        }
        // Bridge correction: crossing probability against the nearest wall
        // per coordinate, exp(-(b-x)(b-x')/dt).
        let mut survive = 1.0;
        for i in 0..x.len() {
            let (lo, hi) = bounds[i];
            let (a, b) = (x[i], next[i]);
            let near_lo = (a - lo).min(b - lo);
            let near_hi = (hi - a).min(hi - b);
            let (d1, d2) = if near_lo <= near_hi {
                (a - lo, b - lo)
            } else {
                (hi - a, hi - b)
            };
            let expo = d1 * d2 / dt;
            if expo < 40.0 {
                survive *= 1.0 - (-expo).exp();
            }
        }
        if survive < 1.0 && rng.random::<f64>() >= survive {
            std::mem::swap(&mut x, &mut next);
            return Ok(KilledPath { exited: true, position: x, exit_time: Some(done) });
        }
        std::mem::swap(&mut x, &mut next);
    }
    Ok(KilledPath { exited: false, position: x, exit_time: None })
}

/// Monte Carlo estimate with exact deterministic merging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub time_step: f64,
    /// Replicates dropped because the clock draw was not finite.
    pub rejected: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
    rejected: u64,
}

impl Welford {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(a: Welford, b: Welford) -> Welford {
        if a.n == 0 {
            return Welford { rejected: a.rejected + b.rejected, ..b };
        }
        if b.n == 0 {
            return Welford { rejected: a.rejected + b.rejected, ..a };
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        let mean = a.mean + d * (b.n as f64 / n as f64);
        let m2 = a.m2 + b.m2 + d * d * (a.n as f64 * b.n as f64 / n as f64);
        Welford { n, mean, m2, rejected: a.rejected + b.rejected }
    }
}

/// Fixed-shape pairwise reduction, independent of scheduling.
fn reduce_pairwise(mut states: Vec<Welford>) -> Welford {
    if states.is_empty() {
        return Welford::default();
    }
    while states.len() > 1 {
        states = states
            .chunks(2)
            .map(|c| if c.len() == 2 { Welford::merge(c[0], c[1]) } else { c[0] })
            .collect();
    }
    states[0]
}

const REPLICATE_CHUNK: u64 = 4096;

fn run_replicates<F>(n: u64, h: f64, body: F) -> Result<MCEstimate>
where
    F: Fn(u64, &mut Welford) + Sync,
{
    let chunks: Vec<u64> = (0..n.div_ceil(REPLICATE_CHUNK)).collect();
    let states: Vec<Welford> = chunks
        .par_iter()
        .map(|&c| {
            let mut acc = Welford::default();
            let lo = c * REPLICATE_CHUNK;
            let hi = ((c + 1) * REPLICATE_CHUNK).min(n);
            for r in lo..hi {
                body(r, &mut acc);
            }
            acc
        })
        .collect();
    let total = reduce_pairwise(states);
    if total.rejected * 1000 > n {
        return Err(Error::Run(format!(
            "monte carlo: {} of {} clock draws rejected (non-finite), above the 0.1% budget",
            total.rejected, n
        )));
    }
    if total.n < 2 {
        return Err(Error::Run("monte carlo: fewer than two accepted replicates".into()));
    }
    let var = total.m2 / (total.n - 1) as f64;
    Ok(MCEstimate {
        mean: total.mean,
        stderr: (var / total.n as f64).sqrt(),
        n: total.n,
        time_step: h,
        rejected: total.rejected,
    })
}

/// Survival horizons long enough that e^{-lambda_1 L} is far below any
/// statistical resolution are scored as killed without walking them.
fn horizon_cap(domain: &DomainSpec) -> Result<f64> {
    let lambda1 = domain.eigenpairs(1)?[0].lambda;
    Ok(46.0 / lambda1)
}

/// E_x[ f(X(L)) I(tau_D(X) > L) ] with L drawn from the clock at outer time
/// t: one clock draw and one killed walk per replicate. Two-sided clocks run
/// the walk in the direction of the draw (the opposite side of the two-sided
/// exit constraint holds vacuously).
#[allow(clippy::too_many_arguments)]
pub fn mc_solve(
    domain: &DomainSpec,
    ic: &InitialCondition,
    clock: ClockKind,
    t: f64,
    x: &[f64],
    n: u64,
    h: f64,
    stream: &RngStream,
) -> Result<MCEstimate> {
    clock.validate()?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::parameter("mc_solve: need t > 0"));
    }
    if n < 100 {
        return Err(Error::parameter("mc_solve: need n >= 100 replicates"));
    }
    if !domain.is_interior(x) {
        return Err(Error::parameter("mc_solve: x must lie in the open domain"));
    }
    walls(domain)?;
    let cap = horizon_cap(domain)?;

    run_replicates(n, h, |r, acc| {
        let mut rng = stream.with_stream(stream.stream + 1 + r).rng();
        let draw = match sample_clock(clock, t, &mut rng) {
            Ok(s) => s.value,
            Err(_) => {
                acc.rejected += 1;
                return;
            }
        };
        if !draw.is_finite() {
            acc.rejected += 1;
            return;
        }
        let horizon = draw.abs();
        if horizon > cap {
            acc.push(0.0);
            return;
        }
        let path = simulate_killed_path(domain, x, horizon, h, &mut rng)
            .expect("validated arguments");
        acc.push(if path.exited { 0.0 } else { ic.value(&path.position) });
    })
}

/// The commuted formulation: exit-check the subordinated path at outer time
/// t. The subordinator path D is discretized on levels of size h, inverted
/// into clock readings E(s_j) on a uniform outer grid, and the inner walk is
/// advanced between consecutive readings with the same bridge-corrected
/// Gaussian steps.
#[allow(clippy::too_many_arguments)]
pub fn mc_solve_outer_exit(
    domain: &DomainSpec,
    ic: &InitialCondition,
    beta: f64,
    t: f64,
    x: &[f64],
    n: u64,
    h: f64,
    stream: &RngStream,
) -> Result<MCEstimate> {
    crate::special::stable::validate_beta(beta, "mc_solve_outer_exit")?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::parameter("mc_solve_outer_exit: need t > 0"));
    }
    if n < 100 {
        return Err(Error::parameter("mc_solve_outer_exit: need n >= 100 replicates"));
    }
    if !domain.is_interior(x) {
        return Err(Error::parameter("mc_solve_outer_exit: x must lie in the open domain"));
    }
    let bounds = walls(domain)?;
    let cap = horizon_cap(domain)?;
    const OUTER_STEPS: usize = 256;

    run_replicates(n, h, |r, acc| {
        let mut rng = stream.with_stream(stream.stream + 1 + r).rng();
        // Subordinator on levels x_i = i h: D_{i+1} = D_i + h^{1/beta} S_i.
        // E(s) = h * min{ i : D_i > s }; readings on the outer grid.
        let jump_scale = h.powf(1.0 / beta);
        let mut clock_at = [0.0f64; OUTER_STEPS + 1];
        let mut level = 0u64;
        let mut d = 0.0f64;
        let mut filled = 0usize;
        'outer: while filled < OUTER_STEPS {
            let s = match sample_stable_subordinator(beta, &mut rng) {
                Ok(s) => s,
                Err(_) => {
                    acc.rejected += 1;
                    return;
                }
            };
            d += jump_scale * s;
            level += 1;
            if !d.is_finite() {
                acc.rejected += 1;
                return;
            }
            while d > t * (filled + 1) as f64 / OUTER_STEPS as f64 {
                filled += 1;
                clock_at[filled] = level as f64 * h;
                if filled == OUTER_STEPS {
                    break 'outer;
                }
            }
            if level as f64 * h > cap {
                // The clock has already run past any survivable horizon.
                acc.push(0.0);
                return;
            }
        }
        // Inner walk between consecutive clock readings.
        let mut pos = x.to_vec();
        for w in clock_at.windows(2) {
            let dt = w[1] - w[0];
            if dt <= 0.0 {
                continue;
            }
            let sd = (2.0 * dt).sqrt();
            let mut survive = 1.0;
            let mut outside = false;
            for (i, p) in pos.iter_mut().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                let v = *p + sd * z;
                let (lo, hi) = bounds[i];
                if v <= lo || v >= hi {
                    outside = true;
                } else {
                    let (d1, d2) = if (*p - lo).min(v - lo) <= (hi - *p).min(hi - v) {
                        (*p - lo, v - lo)
                    } else {
                        (hi - *p, hi - v)
                    };
                    let expo = d1 * d2 / dt;
                    if expo < 40.0 {
                        survive *= 1.0 - (-expo).exp();
                    }
                }
                *p = v;
            }
            if outside || (survive < 1.0 && rng.random::<f64>() >= survive) {
                acc.push(0.0);
                return;
            }
        }
        acc.push(ic.value(&pos));
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rng(seed: u64) -> ChaCha12Rng {
        RngStream::new(seed).rng()
    }

    #[test]
    fn subordinator_draws_positive() {
        let mut r = rng(7);
        for _ in 0..1000 {
            let d = sample_stable_subordinator(0.5, &mut r).unwrap();
            assert!(d > 0.0 && d.is_finite());
        }
    }

    #[test]
    fn subordinator_laplace_functional() {
        // (1/N) sum exp(-s D_i) -> exp(-s^beta) within 4/sqrt(N).
        let mut r = rng(11);
        let n = 100_000;
        for &s in &[0.5f64, 1.0, 2.0] {
            let mut acc = 0.0;
            let mut r2 = r.clone();
            for _ in 0..n {
                acc += (-s * sample_stable_subordinator(0.5, &mut r2).unwrap()).exp();
            }
            let emp = acc / n as f64;
            let expected = (-s.powf(0.5)).exp();
            assert!(
                (emp - expected).abs() < 4.0 / (n as f64).sqrt(),
                "s={s}: {emp} vs {expected}"
            );
        }
        let _ = r.random::<f64>();
    }

    #[test]
    fn inverse_stable_scaling_and_positivity() {
        let mut r = rng(3);
        for _ in 0..1000 {
            let c = sample_inverse_stable(0.7, 2.0, &mut r).unwrap();
            assert!(c.value >= 0.0 && c.value.is_finite());
        }
    }

    #[test]
    fn iterated_clock_zero_time() {
        let mut r = rng(5);
        let c = sample_iterated_bm_clock(3, 0.0, &mut r).unwrap();
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn iterated_half_normal_mean() {
        // k=1, t=1: E |N(0,2)| = 2/sqrt(pi).
        let mut r = rng(13);
        let n = 200_000;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += sample_iterated_bm_clock(1, 1.0, &mut r).unwrap().value;
        }
        let mean = acc / n as f64;
        let expected = 2.0 / PI.sqrt();
        // half-normal sd ~ 0.6; 4 sigma of the mean estimate
        assert!((mean - expected).abs() < 4.0 * 0.61 / (n as f64).sqrt());
    }

    #[test]
    fn two_sided_sign_balance() {
        let mut r = rng(17);
        let n = 100_000;
        let mut pos = 0u64;
        for _ in 0..n {
            if sample_two_sided_clock(2, 1.0, &mut r).unwrap().value > 0.0 {
                pos += 1;
            }
        }
        let frac = pos as f64 / n as f64;
        assert!((frac - 0.5).abs() < 3.0 / (2.0 * (n as f64).sqrt()), "frac {frac}");
    }

    #[test]
    fn alpha_clock_cauchy_median() {
        // |Y(1)| with alpha=1 is folded Cauchy; median = tan(pi/4) = 1.
        let mut r = rng(19);
        let n = 100_000;
        let mut vals: Vec<f64> = (0..n)
            .map(|_| sample_alpha_clock(1.0, 1.0, &mut r).unwrap().value)
            .collect();
        vals.sort_by(f64::total_cmp);
        let med = vals[n / 2];
        assert!((med - 1.0).abs() < 0.02, "median {med}");
    }

    #[test]
    fn alpha_two_clock_is_half_normal() {
        // alpha=2, t=1: |Y| ~ |N(0,2)|: second moment 2.
        let mut r = rng(23);
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += sample_alpha_clock(2.0, 1.0, &mut r).unwrap().value.powi(2);
        }
        let m2 = acc / n as f64;
        assert!((m2 - 2.0).abs() < 0.05, "second moment {m2}");
    }

    #[test]
    fn killed_path_zero_horizon() {
        let d = DomainSpec::interval(PI).unwrap();
        let mut r = rng(29);
        let p = simulate_killed_path(&d, &[1.0], 0.0, 1e-3, &mut r).unwrap();
        assert!(!p.exited);
        assert_eq!(p.position, vec![1.0]);
    }

    #[test]
    fn killed_path_rejects_boundary_start() {
        let d = DomainSpec::interval(PI).unwrap();
        let mut r = rng(31);
        assert!(simulate_killed_path(&d, &[0.0], 1.0, 1e-3, &mut r).is_err());
        assert!(simulate_killed_path(&d, &[PI], 1.0, 1e-3, &mut r).is_err());
    }

    #[test]
    fn mc_estimates_are_bit_reproducible() {
        let d = DomainSpec::interval(PI).unwrap();
        let ic = crate::domain::named_initial_condition("sine", &d).unwrap();
        let stream = RngStream::new(42);
        let run = || {
            mc_solve(
                &d,
                &ic,
                ClockKind::InverseStable { beta: 0.5 },
                1.0,
                &[PI / 2.0],
                2000,
                1e-2,
                &stream,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
        assert!(a.stderr > 0.0);
        assert_eq!(a.n, 2000);
    }

    #[test]
    fn mc_respects_range_of_f() {
        // 0 <= f <= 1 forces estimates into [0, 1].
        let d = DomainSpec::interval(PI).unwrap();
        let ic = crate::domain::named_initial_condition("sine", &d).unwrap();
        let stream = RngStream::new(7);
        let e = mc_solve(
            &d,
            &ic,
            ClockKind::IteratedBm { k: 2 },
            1.0,
            &[1.0],
            1000,
            1e-2,
            &stream,
        )
        .unwrap();
        assert!(e.mean >= 0.0 && e.mean <= 1.0);
    }

    #[test]
    fn mc_tiny_time_returns_datum_exactly() {
        // Clock values collapse to ~0, no motion happens, and f == 1 is
        // scored on every replicate.
        let d = DomainSpec::interval(PI).unwrap();
        let ic = InitialCondition::new(|_: &[f64]| 1.0);
        let stream = RngStream::new(1);
        let e = mc_solve(
            &d,
            &ic,
            ClockKind::InverseStable { beta: 0.5 },
            1e-300,
            &[1.0],
            500,
            1e-3,
            &stream,
        )
        .unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn mc_rejects_bad_arguments() {
        let d = DomainSpec::interval(PI).unwrap();
        let ic = InitialCondition::zero();
        let s = RngStream::new(0);
        let ck = ClockKind::InverseStable { beta: 0.5 };
        assert!(mc_solve(&d, &ic, ck, 1.0, &[0.0], 500, 1e-3, &s).is_err());
        assert!(mc_solve(&d, &ic, ck, 1.0, &[1.0], 50, 1e-3, &s).is_err());
        assert!(mc_solve(&d, &ic, ck, 0.0, &[1.0], 500, 1e-3, &s).is_err());
    }
}
