//! Eigenfunction-expansion solvers: the killed heat semigroup, the
//! Mittag-Leffler spectral solution of the fractional problem, the per-mode
//! identity tying it to the higher-order problem, and the coefficient decay
//! diagnostic for smooth compactly supported data.

use crate::domain::{DomainSpec, InitialCondition};
use crate::error::{Error, Result};
use crate::special::gamma::gamma;
use crate::special::mittag_leffler::{mittag_leffler, mittag_leffler_time_deriv};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodTag {
    Spectral,
    Quadrature,
    Mc,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::Spectral => "spectral",
            MethodTag::Quadrature => "quadrature",
            MethodTag::Mc => "mc",
        }
    }
}

impl std::str::FromStr for MethodTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(MethodTag::Spectral),
            "quadrature" => Ok(MethodTag::Quadrature),
            "mc" => Ok(MethodTag::Mc),
            other => Err(Error::parameter(format!(
                "unknown method `{other}` (expected spectral, quadrature, or mc)"
            ))),
        }
    }
}

/// A solution sampled on a set of (t, x) points with per-point error
/// estimates and the mode truncation used.
#[derive(Debug, Clone)]
pub struct SolutionField {
    pub grid: Vec<(f64, Vec<f64>)>,
    pub values: Vec<f64>,
    pub err: Vec<f64>,
    pub method: MethodTag,
    pub truncation: usize,
}

/// Value plus error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

/// sum_{n <= n_modes} f_bar(n) w(n, lambda_n) phi_n(x).
pub fn modal_sum(
    domain: &DomainSpec,
    ic: &InitialCondition,
    x: &[f64],
    n_modes: usize,
    mut weight: impl FnMut(usize, f64) -> Result<f64>,
) -> Result<f64> {
    let modes = domain.eigenpairs(n_modes)?;
    let coeffs = ic.coefficients(domain, n_modes)?;
    let mut sum = 0.0;
    for (mode, &c) in modes.iter().zip(&coeffs) {
        if c == 0.0 {
            continue;
        }
        sum += c * weight(mode.index, mode.lambda)? * mode.phi(x);
    }
    Ok(sum)
}

/// Killed heat semigroup T_D(t) f (x) as a truncated kernel expansion, with
/// a tail estimate from comparing against the half-truncation sum.
pub fn heat_semigroup(
    domain: &DomainSpec,
    ic: &InitialCondition,
    t: f64,
    x: &[f64],
    n_modes: usize,
) -> Result<Estimate> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::parameter(format!(
            "heat_semigroup: need t > 0 (use the datum itself at t = 0), got {t}"
        )));
    }
    if n_modes == 0 {
        return Err(Error::parameter("heat_semigroup: need n_modes >= 1"));
    }
    let full = modal_sum(domain, ic, x, n_modes, |_, lam| Ok((-lam * t).exp()))?;
    let half = modal_sum(domain, ic, x, (n_modes / 2).max(1), |_, lam| Ok((-lam * t).exp()))?;
    Ok(Estimate { value: full, err: (full - half).abs() })
}

/// Spectral solution of the fractional problem on a (t, x) grid:
/// u(t, x) = sum f_bar(n) phi_n(x) E_beta(-lambda_n t^beta), truncated by
/// doubling until successive evaluations agree below `tol` at every point.
/// t = 0 rows return the datum exactly.
pub fn solve_spectral(
    domain: &DomainSpec,
    ic: &InitialCondition,
    beta: f64,
    grid: &[(f64, Vec<f64>)],
    tol: f64,
) -> Result<SolutionField> {
    if grid.is_empty() {
        return Err(Error::parameter("solve_spectral: empty grid"));
    }
    for (t, x) in grid {
        if !t.is_finite() || *t < 0.0 {
            return Err(Error::parameter(format!(
                "solve_spectral: grid times must be >= 0, got {t}"
            )));
        }
        if x.len() != domain.dim() {
            return Err(Error::parameter("solve_spectral: grid point dimension mismatch"));
        }
    }

    let mut values: Vec<f64> = vec![0.0; grid.len()];
    let mut err: Vec<f64> = vec![0.0; grid.len()];
    // t = 0 short-circuits to the datum itself; the series only converges
    // for t > 0.
    let live: Vec<usize> = grid
        .iter()
        .enumerate()
        .filter(|(_, (t, _))| *t > 0.0)
        .map(|(i, _)| i)
        .collect();
    for (i, (t, x)) in grid.iter().enumerate() {
        if *t == 0.0 {
            values[i] = ic.value(x);
            err[i] = 0.0;
        }
    }
    if live.is_empty() {
        return Ok(SolutionField {
            grid: grid.to_vec(),
            values,
            err,
            method: MethodTag::Spectral,
            truncation: 0,
        });
    }

    let cap = domain.mode_capacity().min(8192);
    let mut n = 8usize.min(cap);
    let mut prev: Vec<f64> = vec![f64::NAN; grid.len()];
    loop {
        for &i in &live {
            let (t, x) = &grid[i];
            let v = modal_sum(domain, ic, x, n, |_, lam| {
                mittag_leffler(beta, lam * t.powf(beta))
            })?;
            values[i] = v;
        }
        let mut worst = 0.0f64;
        for &i in &live {
            let d = (values[i] - prev[i]).abs();
            if prev[i].is_nan() {
                worst = f64::INFINITY;
            } else {
                err[i] = d;
                worst = worst.max(d);
            }
            prev[i] = values[i];
        }
        if worst < tol {
            return Ok(SolutionField {
                grid: grid.to_vec(),
                values,
                err,
                method: MethodTag::Spectral,
                truncation: n,
            });
        }
        if n >= cap {
            return Err(Error::Capacity(format!(
                "solve_spectral: needs more than {cap} modes to reach tol {tol:.1e} \
                 (last doubling delta {worst:.3e})"
            )));
        }
        n = (n * 2).min(cap);
    }
}

/// Max over `t_grid` of the residual of the per-mode identity
///
///   d/dt E_{1/m}(-lambda t^{1/m})
///     = sum_{j=1}^{m-1} t^{j/m - 1} / Gamma(j/m) (-lambda)^j
///       + (-lambda)^m E_{1/m}(-lambda t^{1/m}),
///
/// the scalar form of the equivalence between the fractional and
/// higher-order problems.
pub fn per_mode_higher_order_residual(lambda: f64, m: u32, t_grid: &[f64]) -> Result<f64> {
    if m < 2 {
        return Err(Error::parameter(format!(
            "per_mode_higher_order_residual: the identity starts at m = 2, got {m}"
        )));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::parameter("per_mode_higher_order_residual: lambda must be >= 0"));
    }
    if t_grid.is_empty() {
        return Err(Error::parameter("per_mode_higher_order_residual: empty time grid"));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let beta = 1.0 / m as f64;
    let mut worst = 0.0f64;
    for &t in t_grid {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::parameter("per_mode_higher_order_residual: need t > 0"));
        }
        let dt = mittag_leffler_time_deriv(beta, lambda, t)?;
        let e = mittag_leffler(beta, lambda * t.powf(beta))?;
        let mut forcing = 0.0;
        let mut neg_lambda_pow = 1.0;
        for j in 1..m {
            neg_lambda_pow *= -lambda;
            forcing += t.powf(j as f64 / m as f64 - 1.0) / gamma(j as f64 / m as f64)
                * neg_lambda_pow;
        }
        neg_lambda_pow *= -lambda; // now (-lambda)^m
        let r = dt - forcing - neg_lambda_pow * e;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Fits log |f_bar(n)| against log lambda_n and reports whether the decay
/// is at least lambda^{-k} (slope <= -k + 0.5). The fit runs on the
/// high-lambda half of the coefficients above the quadrature noise floor,
/// where the asymptotic rate has set in; anything below eight usable
/// coefficients is refused.
pub fn coefficient_decay_check(
    domain: &DomainSpec,
    ic: &InitialCondition,
    k: u32,
) -> Result<bool> {
    if k == 0 {
        return Err(Error::parameter("coefficient_decay_check: need k >= 1"));
    }
    let count = domain.mode_capacity().min(256);
    let modes = domain.eigenpairs(count)?;
    let coeffs = ic.coefficients(domain, count)?;

    const NOISE_FLOOR: f64 = 1e-8;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (mode, &c) in modes.iter().zip(&coeffs) {
        if c.abs() >= NOISE_FLOOR {
            xs.push(mode.lambda.ln());
            ys.push(c.abs().ln());
        }
    }
    if xs.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "coefficient_decay_check: only {} coefficients above the noise floor",
            xs.len()
        )));
    }
    let keep = (xs.len() / 2).max(8);
    let start = xs.len() - keep;
    let xs = &xs[start..];
    let ys = &ys[start..];
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    let slope = num / den;
    Ok(slope <= -(k as f64) + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::named_initial_condition;
    use std::f64::consts::PI;

    fn sine_problem() -> (DomainSpec, InitialCondition) {
        let d = DomainSpec::interval(PI).unwrap();
        let ic = named_initial_condition("sine", &d).unwrap();
        (d, ic)
    }

    #[test]
    fn heat_single_mode_benchmark() {
        let (d, ic) = sine_problem();
        let e = heat_semigroup(&d, &ic, 1.0, &[PI / 2.0], 8).unwrap();
        assert!((e.value - (-1.0f64).exp()).abs() < 1e-10, "got {}", e.value);
    }

    #[test]
    fn heat_vanishes_at_boundary() {
        let (d, ic) = sine_problem();
        let e = heat_semigroup(&d, &ic, 1.0, &[PI], 8).unwrap();
        assert!(e.value.abs() <= 1e-12);
    }

    #[test]
    fn heat_zero_datum() {
        let d = DomainSpec::interval(PI).unwrap();
        let e = heat_semigroup(&d, &InitialCondition::zero(), 1.0, &[1.0], 8).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn heat_rejects_t_zero() {
        let (d, ic) = sine_problem();
        assert!(heat_semigroup(&d, &ic, 0.0, &[1.0], 8).is_err());
    }

    #[test]
    fn spectral_single_mode_is_mittag_leffler() {
        let (d, ic) = sine_problem();
        let grid = vec![(1.0, vec![PI / 2.0])];
        let field = solve_spectral(&d, &ic, 0.5, &grid, 1e-12).unwrap();
        let expected = mittag_leffler(0.5, 1.0).unwrap();
        assert!(
            (field.values[0] - expected).abs() < 1e-11,
            "{} vs {expected}",
            field.values[0]
        );
    }

    #[test]
    fn spectral_t_zero_returns_datum() {
        let (d, ic) = sine_problem();
        let grid = vec![(0.0, vec![0.7])];
        let field = solve_spectral(&d, &ic, 0.5, &grid, 1e-10).unwrap();
        assert_eq!(field.values[0], ic.value(&[0.7]));
        assert_eq!(field.err[0], 0.0);
    }

    #[test]
    fn spectral_heat_baseline_matches_semigroup() {
        let (d, ic) = sine_problem();
        let mut grid = Vec::new();
        for &t in &[0.1, 0.5, 1.0] {
            for &x in &[0.3, 1.0, 2.0] {
                grid.push((t, vec![x]));
            }
        }
        let field = solve_spectral(&d, &ic, 1.0, &grid, 1e-12).unwrap();
        for ((t, x), &v) in grid.iter().zip(&field.values) {
            let hs = heat_semigroup(&d, &ic, *t, x, field.truncation).unwrap();
            assert!((v - hs.value).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_monotone_decay_in_time_for_single_mode() {
        let (d, ic) = sine_problem();
        let grid: Vec<(f64, Vec<f64>)> =
            (1..=20).map(|i| (0.1 * i as f64, vec![PI / 2.0])).collect();
        let field = solve_spectral(&d, &ic, 0.5, &grid, 1e-12).unwrap();
        for w in field.values.windows(2) {
            assert!(w[1] < w[0], "not strictly decreasing: {w:?}");
        }
    }

    #[test]
    fn per_mode_residual_zero_lambda() {
        let r = per_mode_higher_order_residual(0.0, 3, &[0.5, 1.0]).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn per_mode_residual_small() {
        let grid: Vec<f64> = (1..=20).map(|i| 0.1 * i as f64).collect();
        let r = per_mode_higher_order_residual(1.0, 2, &grid).unwrap();
        assert!(r <= 1e-8, "residual {r}");
        let grid2: Vec<f64> = (0..=10).map(|i| 0.5 + 0.05 * i as f64).collect();
        let r2 = per_mode_higher_order_residual(2.0, 4, &grid2).unwrap();
        assert!(r2 <= 1e-8, "residual {r2}");
    }

    #[test]
    fn per_mode_residual_rejects_m_one() {
        assert!(per_mode_higher_order_residual(1.0, 1, &[1.0]).is_err());
    }

    #[test]
    fn decay_check_polynomial_fails_k3() {
        let d = DomainSpec::interval(PI).unwrap();
        let ic = named_initial_condition("polynomial", &d).unwrap();
        // |f_bar| ~ lambda^{-3/2}: passes k=1, fails k=3.
        assert!(coefficient_decay_check(&d, &ic, 1).unwrap());
        assert!(!coefficient_decay_check(&d, &ic, 3).unwrap());
    }

    #[test]
    fn decay_check_bump_passes() {
        let d = DomainSpec::interval(PI).unwrap();
        let ic = named_initial_condition("bump", &d).unwrap();
        assert!(coefficient_decay_check(&d, &ic, 2).unwrap());
        assert!(coefficient_decay_check(&d, &ic, 3).unwrap());
    }

    #[test]
    fn decay_check_degenerate_spectrum() {
        let (d, ic) = sine_problem();
        match coefficient_decay_check(&d, &ic, 2) {
            Err(Error::InsufficientData(_)) => {}
            other => panic!("expected insufficient data, got {other:?}"),
        }
    }
}
