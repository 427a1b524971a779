//! One-sided stable subordinator of index beta in (0,1), normalized so the
//! unit-time Laplace transform is exp(-s^beta), together with the density of
//! its inverse (hitting-time) process.
//!
//! Everything rests on the single-integral representation built from the
//! Kanter auxiliary function
//!
//!   a(phi) = sin((1-beta) phi) sin(beta phi)^{beta/(1-beta)} / sin(phi)^{1/(1-beta)}
//!
//! on (0, pi). Writing I(delta) = int_0^pi a(phi) exp(-a(phi) delta) dphi,
//!
//!   g_beta(u)  = beta / ((1-beta) pi) * u^{-1/(1-beta)} * I(u^{-beta/(1-beta)})
//!   P(D <= w)  = (1/pi) int_0^pi exp(-a(phi) w^{-beta/(1-beta)}) dphi
//!
//! a blows up like psi^{-1/(1-beta)} at phi = pi - psi, so the upper half of
//! the integral runs in log coordinates with an explicit underflow cutoff.

use crate::error::{Error, Result};
use crate::quad;
use crate::special::gamma::{cospi, recip_gamma, sinpi};

use std::f64::consts::{FRAC_PI_2, PI};

/// exp(-x) underflows past ~745; anything beyond this contributes nothing.
const EXP_CUTOFF: f64 = 740.0;

pub(crate) fn validate_beta(beta: f64, who: &str) -> Result<()> {
    if !beta.is_finite() || !(0.0 < beta && beta < 1.0) {
        return Err(Error::parameter(format!(
            "{who}: subordinator index must satisfy 0 < beta < 1, got {beta}"
        )));
    }
    Ok(())
}

/// Kanter's function a(phi), evaluated through logs so the powers stay
/// stable across the whole of (0, pi).
pub(crate) fn kanter_a(beta: f64, phi: f64) -> f64 {
    debug_assert!(phi > 0.0 && phi < PI);
    let log_a = (beta * (beta * phi).sin().ln() - phi.sin().ln()) / (1.0 - beta)
        + ((1.0 - beta) * phi).sin().ln();
    log_a.exp()
}

/// a(pi - psi) for small psi, with the sines expanded about pi so no
/// cancellation against pi occurs.
fn kanter_a_tail(beta: f64, psi: f64) -> f64 {
    debug_assert!(psi > 0.0 && psi <= FRAC_PI_2);
    let sb = sinpi(beta);
    let cb = cospi(beta);
    // sin(beta (pi - psi)) and sin((1-beta)(pi - psi)).
    let s_beta = sb * (beta * psi).cos() - cb * (beta * psi).sin();
    let s_comp = sb * ((1.0 - beta) * psi).cos() + cb * ((1.0 - beta) * psi).sin();
    let log_a = (beta * s_beta.ln() - psi.sin().ln()) / (1.0 - beta) + s_comp.ln();
    log_a.exp()
}

/// inf a = lim_{phi -> 0} a(phi) = beta^{beta/(1-beta)} (1 - beta).
fn kanter_a_floor(beta: f64) -> f64 {
    beta.powf(beta / (1.0 - beta)) * (1.0 - beta)
}

/// Leading coefficient of a(pi - psi) ~ A psi^{-1/(1-beta)}.
fn kanter_tail_coeff(beta: f64) -> f64 {
    sinpi(beta).powf(1.0 / (1.0 - beta))
}

/// I(delta) = int_0^pi a e^{-a delta} dphi.
fn kernel_integral(beta: f64, delta: f64) -> Result<f64> {
    debug_assert!(delta > 0.0);
    if kanter_a_floor(beta) * delta > EXP_CUTOFF {
        return Ok(0.0);
    }

    let lower = quad::integrate_with_budget(
        &|phi: f64| {
            let a = kanter_a(beta, phi);
            let e = a * delta;
            if e > EXP_CUTOFF {
                0.0
            } else {
                a * (-e).exp()
            }
        },
        1e-300,
        FRAC_PI_2,
        1e-280,
        1e-12,
        8000,
    )?;

    // psi below this makes a(pi - psi) * delta underflow the exponential.
    let psi_cut = (kanter_tail_coeff(beta) * delta / EXP_CUTOFF).powf(1.0 - beta);
    let upper = if psi_cut >= FRAC_PI_2 {
        0.0
    } else {
        let y_lo = psi_cut.max(1e-290).ln();
        let y_hi = FRAC_PI_2.ln();
        quad::integrate_with_budget(
            &|y: f64| {
                let psi = y.exp();
                let a = kanter_a_tail(beta, psi);
                let e = a * delta;
                if e > EXP_CUTOFF {
                    0.0
                } else {
                    a * (-e).exp() * psi
                }
            },
            y_lo,
            y_hi,
            1e-280,
            1e-12,
            8000,
        )?
        .value
    };

    Ok(lower.value + upper)
}

/// Density g_beta(u) of D(1). Returns 0 when the value underflows.
pub fn stable_density(beta: f64, u: f64) -> Result<f64> {
    validate_beta(beta, "stable_density")?;
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::parameter(format!(
            "stable_density: need u > 0, got {u}"
        )));
    }
    if beta == 0.5 {
        // g_{1/2}(u) = u^{-3/2} exp(-1/(4u)) / (2 sqrt(pi)).
        let e = 1.0 / (4.0 * u);
        if e > EXP_CUTOFF {
            return Ok(0.0);
        }
        return Ok(u.powf(-1.5) * (-e).exp() / (2.0 * PI.sqrt()));
    }
    stable_density_kanter(beta, u)
}

/// Kanter-integral route, also exercised directly by tests at beta = 1/2.
pub(crate) fn stable_density_kanter(beta: f64, u: f64) -> Result<f64> {
    let delta = u.powf(-beta / (1.0 - beta));
    if delta == 0.0 {
        // Far right tail: first term of the series expansion.
        return Ok(beta * recip_gamma(1.0 - beta) * u.powf(-1.0 - beta));
    }
    let kernel = kernel_integral(beta, delta)?;
    if kernel == 0.0 {
        return Ok(0.0);
    }
    Ok(beta / ((1.0 - beta) * PI) * u.powf(-1.0 / (1.0 - beta)) * kernel)
}

/// P(D(1) <= w).
pub fn stable_cdf(beta: f64, w: f64) -> Result<f64> {
    validate_beta(beta, "stable_cdf")?;
    if !w.is_finite() {
        return Err(Error::parameter("stable_cdf: w must be finite"));
    }
    if w <= 0.0 {
        return Ok(0.0);
    }
    if beta == 0.5 {
        return Ok(libm::erfc(0.5 / w.sqrt()));
    }
    let delta = w.powf(-beta / (1.0 - beta));
    if delta == 0.0 {
        return Ok(1.0);
    }
    if kanter_a_floor(beta) * delta > EXP_CUTOFF {
        return Ok(0.0);
    }

    let lower = quad::integrate_with_budget(
        &|phi: f64| {
            let e = kanter_a(beta, phi) * delta;
            if e > EXP_CUTOFF {
                0.0
            } else {
                (-e).exp()
            }
        },
        1e-300,
        FRAC_PI_2,
        1e-16,
        1e-12,
        8000,
    )?;

    let psi_cut = (kanter_tail_coeff(beta) * delta / EXP_CUTOFF).powf(1.0 - beta);
    let upper = if psi_cut >= FRAC_PI_2 {
        0.0
    } else {
        let y_lo = psi_cut.max(1e-290).ln();
        quad::integrate_with_budget(
            &|y: f64| {
                let psi = y.exp();
                let e = kanter_a_tail(beta, psi) * delta;
                if e > EXP_CUTOFF {
                    0.0
                } else {
                    (-e).exp() * psi
                }
            },
            y_lo,
            FRAC_PI_2.ln(),
            1e-16,
            1e-12,
            8000,
        )?
        .value
    };

    Ok(((lower.value + upper) / PI).clamp(0.0, 1.0))
}

/// Density f_t(x) of the inverse process E^beta(t) = inf{ u : D(u) > t }:
///
///   f_t(x) = t beta^{-1} x^{-1-1/beta} g_beta(t x^{-1/beta}).
///
/// Self-similarity gives f_t(x) = t^{-beta} f_1(x t^{-beta}); near x = 0 the
/// density is evaluated through its entire (Wright) series instead of the
/// formula above, which would push g_beta deep into its right tail.
pub fn inverse_stable_density(beta: f64, t: f64, x: f64) -> Result<f64> {
    validate_beta(beta, "inverse_stable_density")?;
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::parameter(format!(
            "inverse_stable_density: need t > 0, got {t}"
        )));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::parameter(format!(
            "inverse_stable_density: need x > 0, got {x}"
        )));
    }
    let z = x * t.powf(-beta);
    if z <= 1.0 {
        return Ok(t.powf(-beta) * wright_series(beta, z));
    }
    let u = t * x.powf(-1.0 / beta);
    let g = stable_density(beta, u)?;
    if g == 0.0 {
        return Ok(0.0);
    }
    Ok(t / beta * x.powf(-1.0 - 1.0 / beta) * g)
}

/// f_1(z) = sum_k (-z)^k / (k! Gamma(1 - beta (k+1))); rapid decay of the
/// terms keeps cancellation harmless for z <= 1.
fn wright_series(beta: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut factorial = 1.0;
    // Gamma poles make isolated terms vanish exactly, so convergence is
    // only declared after two consecutive negligible terms.
    let mut quiet = 0;
    for k in 0..300 {
        let term = pow / factorial * recip_gamma(1.0 - beta * (k + 1) as f64);
        sum += term;
        if k > 3 && term.abs() < 1e-18 * sum.abs().max(1e-300) {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        pow *= -z;
        factorial *= (k + 1) as f64;
    }
    sum.max(0.0)
}

/// P(E^beta(t) <= x) = 1 - P(D(1) <= t x^{-1/beta}).
pub fn inverse_stable_cdf(beta: f64, t: f64, x: f64) -> Result<f64> {
    validate_beta(beta, "inverse_stable_cdf")?;
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::parameter("inverse_stable_cdf: need t > 0"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - stable_cdf(beta, t * x.powf(-1.0 / beta))?)
}

/// Median of E^beta(t), used to anchor quadrature axis splits.
pub fn inverse_stable_median(beta: f64, t: f64) -> Result<f64> {
    validate_beta(beta, "inverse_stable_median")?;
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::parameter("inverse_stable_median: need t > 0"));
    }
    let med_d = stable_median(beta)?;
    Ok((t / med_d).powf(beta))
}

/// Median of D(1) by bisection on the CDF.
fn stable_median(beta: f64) -> Result<f64> {
    let mut lo = 1.0;
    let mut hi = 1.0;
    while stable_cdf(beta, lo)? > 0.5 {
        lo *= 0.5;
        if lo < 1e-200 {
            return Err(Error::Run("stable_median: bracketing failed".into()));
        }
    }
    while stable_cdf(beta, hi)? < 0.5 {
        hi *= 2.0;
        if hi > 1e200 {
            return Err(Error::Run("stable_median: bracketing failed".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if stable_cdf(beta, mid)? < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
