//! Deterministic quadrature solvers that average the killed heat semigroup
//! over a random-clock density: the inverse-stable clock for fractional and
//! higher-order problems, and the |alpha-stable| clock for the second-order
//! family. Modes are truncated before quadrature begins and the sum runs
//! inside the integral.

use crate::domain::{DomainSpec, InitialCondition};
use crate::error::{Error, Result};
use crate::quad;
use crate::special::alpha_stable::validate_alpha;
use crate::special::stable::validate_beta;
use crate::special::{
    alpha_stable_density_1d, inverse_stable_density, inverse_stable_median, mittag_leffler,
};
use crate::spectral::{solve_spectral, MethodTag, SolutionField};

use std::collections::HashMap;

/// Both routes to one spectral mode of the fractional solution:
/// the clock integral int_0^inf e^{-lambda l} f_t(l) dl and the series value
/// E_beta(-lambda t^beta). Their agreement is the scalar content of the
/// equivalence between the fractional and higher-order formulations.
pub fn mode_laplace_identity(beta: f64, lambda: f64, t: f64) -> Result<(f64, f64)> {
    validate_beta(beta, "mode_laplace_identity")?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::parameter("mode_laplace_identity: lambda must be >= 0"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::parameter("mode_laplace_identity: t must be > 0"));
    }
    if lambda == 0.0 {
        // Clock densities integrate to one.
        return Ok((1.0, 1.0));
    }
    let series = mittag_leffler(beta, lambda * t.powf(beta))?;
    let median = inverse_stable_median(beta, t)?;
    let integrand = |l: f64| {
        if l <= 0.0 {
            return 0.0;
        }
        (-lambda * l).exp() * inverse_stable_density(beta, t, l).unwrap_or(0.0)
    };
    let head = quad::integrate(&integrand, 0.0, median, 2.5e-10, 1e-10)?;
    let tail = quad::integrate_tail(&integrand, median, median, 2.5e-10, 1e-10)?;
    Ok((head.value + tail.value, series))
}

/// Shared precomputation: coefficients and eigenvalues with phi evaluated at
/// one spatial point, zero terms dropped.
fn mode_profile(
    domain: &DomainSpec,
    ic: &InitialCondition,
    x: &[f64],
    n_modes: usize,
) -> Result<Vec<(f64, f64)>> {
    let modes = domain.eigenpairs(n_modes)?;
    let coeffs = ic.coefficients(domain, n_modes)?;
    Ok(modes
        .iter()
        .zip(&coeffs)
        .filter_map(|(m, &c)| {
            let w = c * m.phi(x);
            (w != 0.0).then_some((m.lambda, w))
        })
        .collect())
}

/// u(t, x) = int_0^inf T_D(l) f (x) f_t(l) dl by adaptive quadrature on an
/// axis split at the clock median, log-friendly tail included. The mode
/// truncation comes from a spectral doubling pass and is fixed before any
/// quadrature runs.
pub fn solve_inverse_stable_quadrature(
    domain: &DomainSpec,
    ic: &InitialCondition,
    beta: f64,
    grid: &[(f64, Vec<f64>)],
    tol: f64,
) -> Result<SolutionField> {
    validate_beta(beta, "solve_inverse_stable_quadrature")?;
    for (t, _) in grid {
        if !(t.is_finite() && *t > 0.0) {
            return Err(Error::parameter(
                "solve_inverse_stable_quadrature: grid times must be > 0",
            ));
        }
    }
    // Truncation pass; also supplies a per-point series tail estimate.
    let spectral = solve_spectral(domain, ic, beta, grid, (tol * 0.1).max(1e-12))?;
    let n_modes = spectral.truncation.max(8).min(domain.mode_capacity());

    let mut medians: HashMap<u64, f64> = HashMap::new();
    let mut values = Vec::with_capacity(grid.len());
    let mut errs = Vec::with_capacity(grid.len());
    for (i, (t, x)) in grid.iter().enumerate() {
        let profile = mode_profile(domain, ic, x, n_modes)?;
        let median = match medians.get(&t.to_bits()) {
            Some(&m) => m,
            None => {
                let m = inverse_stable_median(beta, *t)?;
                medians.insert(t.to_bits(), m);
                m
            }
        };
        let integrand = |l: f64| {
            if l <= 0.0 {
                return 0.0;
            }
            let semi: f64 = profile.iter().map(|&(lam, w)| w * (-lam * l).exp()).sum();
            semi * inverse_stable_density(beta, *t, l).unwrap_or(0.0)
        };
        let head = quad::integrate(&integrand, 0.0, median, tol * 0.25, 1e-10)?;
        let tail = quad::integrate_tail(&integrand, median, median, tol * 0.25, 1e-10)?;
        values.push(head.value + tail.value);
        errs.push(head.err + tail.err + spectral.err[i]);
    }
    Ok(SolutionField {
        grid: grid.to_vec(),
        values,
        err: errs,
        method: MethodTag::Quadrature,
        truncation: n_modes,
    })
}

/// One mode's clock weight 2 int_0^inf e^{-lambda s} p^alpha(t, s) ds.
/// For alpha = 1 this is bounded by 1/(pi t lambda).
pub fn alpha_clock_mode_weight(alpha: f64, lambda: f64, t: f64) -> Result<f64> {
    validate_alpha(alpha, "alpha_clock_mode_weight")?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::parameter("alpha_clock_mode_weight: lambda must be >= 0"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::parameter("alpha_clock_mode_weight: t must be > 0"));
    }
    let integrand = |s: f64| {
        (-lambda * s).exp() * alpha_stable_density_1d(alpha, t, s).unwrap_or(0.0)
    };
    let scale = t.powf(1.0 / alpha);
    let head = quad::integrate(&integrand, 0.0, scale, 5e-14, 1e-13)?;
    let tail = quad::integrate_tail(&integrand, scale, scale, 5e-14, 1e-13)?;
    Ok(2.0 * (head.value + tail.value))
}

/// Pick a truncation so the omitted modes cannot move the alpha-clock
/// solution by more than `budget`, using the 1/(pi t lambda) mode bound.
fn alpha_truncation(
    domain: &DomainSpec,
    ic: &InitialCondition,
    t_min: f64,
    budget: f64,
) -> Result<usize> {
    let cap = domain.mode_capacity().min(4096);
    let mut n = 8usize.min(cap);
    loop {
        let modes = domain.eigenpairs(n)?;
        let coeffs = ic.coefficients(domain, n)?;
        let tail: f64 = modes
            .iter()
            .zip(&coeffs)
            .skip(n / 2)
            .map(|(m, &c)| 2.0 * c.abs() * m.sup_norm() / (std::f64::consts::PI * t_min * m.lambda))
            .sum();
        if tail < budget || n >= cap {
            return Ok(n);
        }
        n = (n * 2).min(cap);
    }
}

/// u(t, x) = 2 int_0^inf T_D(s) f (x) p^alpha(t, s) ds.
pub fn solve_alpha_clock_quadrature(
    domain: &DomainSpec,
    ic: &InitialCondition,
    alpha: f64,
    grid: &[(f64, Vec<f64>)],
    tol: f64,
) -> Result<SolutionField> {
    validate_alpha(alpha, "solve_alpha_clock_quadrature")?;
    if grid.is_empty() {
        return Err(Error::parameter("solve_alpha_clock_quadrature: empty grid"));
    }
    for (t, _) in grid {
        if !(t.is_finite() && *t > 0.0) {
            return Err(Error::parameter(
                "solve_alpha_clock_quadrature: grid times must be > 0",
            ));
        }
    }
    let t_min = grid.iter().map(|(t, _)| *t).fold(f64::INFINITY, f64::min);
    let n_modes = alpha_truncation(domain, ic, t_min, tol * 0.25)?;

    let mut values = Vec::with_capacity(grid.len());
    let mut errs = Vec::with_capacity(grid.len());
    for (t, x) in grid {
        let profile = mode_profile(domain, ic, x, n_modes)?;
        let integrand = |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            let semi: f64 = profile.iter().map(|&(lam, w)| w * (-lam * s).exp()).sum();
            semi * alpha_stable_density_1d(alpha, *t, s).unwrap_or(0.0)
        };
        let scale = t.powf(1.0 / alpha);
        let head = quad::integrate(&integrand, 0.0, scale, tol * 0.25, 1e-10)?;
        let tail = quad::integrate_tail(&integrand, scale, scale, tol * 0.25, 1e-10)?;
        values.push(2.0 * (head.value + tail.value));
        errs.push(2.0 * (head.err + tail.err) + tol * 0.25);
    }
    Ok(SolutionField {
        grid: grid.to_vec(),
        values,
        err: errs,
        method: MethodTag::Quadrature,
        truncation: n_modes,
    })
}

/// Max residual of the Cauchy-clock PDE
///
///   d^2 u / dt^2 + 2 Delta f / (pi t) + Delta^2 u = 0
///
/// over the grid. The time derivative comes from central differences of the
/// quadrature solution with a Richardson comparison between steps h and h/2;
/// Delta f and Delta^2 u are term-wise spectral multiplications.
pub fn cauchy_clock_residual(
    domain: &DomainSpec,
    ic: &InitialCondition,
    grid: &[(f64, Vec<f64>)],
    fd_step: f64,
) -> Result<f64> {
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(Error::parameter("cauchy_clock_residual: need fd_step > 0"));
    }
    if grid.is_empty() {
        return Err(Error::parameter("cauchy_clock_residual: empty grid"));
    }
    for (t, _) in grid {
        if !(t.is_finite() && *t > 2.0 * fd_step) {
            return Err(Error::parameter(
                "cauchy_clock_residual: the kernel is singular at t = 0; keep grid times above 2 fd_step",
            ));
        }
    }
    let t_min = grid.iter().map(|(t, _)| *t).fold(f64::INFINITY, f64::min) - fd_step;
    let n_modes = alpha_truncation(domain, ic, t_min, 1e-9)?;

    let mut worst = 0.0f64;
    for (t, x) in grid {
        let profile = mode_profile(domain, ic, x, n_modes)?;
        let u_at = |tt: f64| -> Result<f64> {
            let mut sum = 0.0;
            for &(lam, w) in &profile {
                sum += w * alpha_clock_mode_weight(1.0, lam, tt)?;
            }
            Ok(sum)
        };
        // Central second difference, Richardson-extrapolated from h and h/2.
        let d2 = {
            let h = fd_step;
            let coarse = (u_at(t + h)? - 2.0 * u_at(*t)? + u_at(t - h)?) / (h * h);
            let h2 = 0.5 * h;
            let fine = (u_at(t + h2)? - 2.0 * u_at(*t)? + u_at(t - h2)?) / (h2 * h2);
            fine + (fine - coarse) / 3.0
        };
        let laplacian_f: f64 = profile.iter().map(|&(lam, w)| -lam * w).sum();
        let mut bilaplacian_u = 0.0;
        for &(lam, w) in &profile {
            bilaplacian_u += lam * lam * w * alpha_clock_mode_weight(1.0, lam, *t)?;
        }
        let r = d2 + 2.0 * laplacian_f / (std::f64::consts::PI * t) + bilaplacian_u;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}
