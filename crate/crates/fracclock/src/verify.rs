//! Independent numerical checks: the L1 Caputo derivative, PDE residuals
//! assembled from it, and Kolmogorov-Smirnov distribution tests.

use crate::domain::{DomainSpec, InitialCondition};
use crate::error::{Error, Result};
use crate::quad;
use crate::special::gamma::gamma;
use crate::special::mittag_leffler::mittag_leffler;

/// Which identity a residual report refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PdeTag {
    Fractional { beta: f64 },
    Heat,
    CauchyClock,
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub pde: PdeTag,
    pub grid: Vec<(f64, Vec<f64>)>,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Set when the series truncation error is too large to certify the
    /// requested tolerance; a small residual is then not evidence.
    pub inconclusive: bool,
}

/// Piecewise-linear (L1) Caputo derivative of order beta on a uniform grid
/// starting at t = 0. Entry 0 of the result is 0 (empty memory integral).
/// Accuracy is O(tau^{2-beta}) for smooth data.
pub fn caputo_l1(t: &[f64], g: &[f64], beta: f64) -> Result<Vec<f64>> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::parameter(format!(
            "caputo_l1: need 0 < beta < 1, got {beta}"
        )));
    }
    if t.len() != g.len() || t.len() < 2 {
        return Err(Error::parameter("caputo_l1: need matching grids with >= 2 samples"));
    }
    if t[0].abs() > 1e-12 {
        return Err(Error::parameter("caputo_l1: the memory integral starts at t = 0"));
    }
    let tau = t[1] - t[0];
    if !(tau > 0.0 && tau <= 1e-3 + 1e-15) {
        return Err(Error::parameter(format!(
            "caputo_l1: need a uniform step 0 < tau <= 1e-3, got {tau}"
        )));
    }
    for (i, w) in t.windows(2).enumerate() {
        if ((w[1] - w[0]) - tau).abs() > 1e-9 * tau.max(1e-12) {
            return Err(Error::parameter(format!(
                "caputo_l1: grid is not uniform at index {i}"
            )));
        }
    }
    for &v in g {
        if !v.is_finite() {
            return Err(Error::Input("caputo_l1: non-finite sample".into()));
        }
    }

    let n = t.len();
    // a_j = (j+1)^{1-beta} - j^{1-beta}
    let mut a = Vec::with_capacity(n);
    let mut prev = 0.0;
    for j in 1..=n {
        let next = (j as f64).powf(1.0 - beta);
        a.push(next - prev);
        prev = next;
    }
    let scale = tau.powf(-beta) / gamma(2.0 - beta);
    let dg: Vec<f64> = g.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let mut sum = 0.0;
        for j in 0..i {
            sum += a[j] * dg[i - 1 - j];
        }
        *o = scale * sum;
    }
    Ok(out)
}

/// Residual of the fractional problem d^beta u/dt^beta = Laplacian u on the
/// time band spanned by `grid`, per spatial point: u is sampled from the
/// spectral series on a uniform grid of step `tau`, the Caputo derivative
/// comes from `caputo_l1`, and the Laplacian from term-wise multiplication
/// by -lambda_n. For beta = 1 the residual uses central differences
/// instead.
pub fn fractional_residual(
    domain: &DomainSpec,
    ic: &InitialCondition,
    beta: f64,
    grid: &[(f64, Vec<f64>)],
    tau: f64,
    tolerance: f64,
) -> Result<ResidualReport> {
    if grid.is_empty() {
        return Err(Error::parameter("fractional_residual: empty grid"));
    }
    let t_lo = grid.iter().map(|(t, _)| *t).fold(f64::INFINITY, f64::min);
    let t_hi = grid.iter().map(|(t, _)| *t).fold(0.0f64, f64::max);
    let exclusion = (10.0 * tau).max(1e-2);
    if t_lo < exclusion {
        return Err(Error::parameter(format!(
            "fractional_residual: grid times must stay above max(10 tau, 1e-2) = {exclusion} \
             (the forcing terms are singular at t = 0)"
        )));
    }

    // One truncation for all points, from a spectral doubling pass.
    let spectral = crate::spectral::solve_spectral(domain, ic, beta, grid, 1e-10)?;
    let n_modes = spectral.truncation.max(8).min(domain.mode_capacity());
    let truncation_err = spectral.err.iter().cloned().fold(0.0f64, f64::max);

    let steps = (t_hi / tau).ceil() as usize;
    let times: Vec<f64> = (0..=steps).map(|j| j as f64 * tau).collect();
    let modes = domain.eigenpairs(n_modes)?;
    let coeffs = ic.coefficients(domain, n_modes)?;

    let mut xs: Vec<&Vec<f64>> = grid.iter().map(|(_, x)| x).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();

    let mut worst = 0.0f64;
    for x in xs {
        let profile: Vec<(f64, f64)> = modes
            .iter()
            .zip(&coeffs)
            .filter_map(|(m, &c)| {
                let w = c * m.phi(x);
                (w != 0.0).then_some((m.lambda, w))
            })
            .collect();
        let mut u = vec![0.0; times.len()];
        let mut lap = vec![0.0; times.len()];
        for &(lam, w) in &profile {
            for (j, &tj) in times.iter().enumerate() {
                let e = if beta == 1.0 {
                    (-lam * tj).exp()
                } else {
                    mittag_leffler(beta, lam * tj.powf(beta))?
                };
                u[j] += w * e;
                lap[j] -= lam * w * e;
            }
        }
        if beta == 1.0 {
            for j in 1..times.len() - 1 {
                if times[j] < t_lo || times[j] > t_hi {
                    continue;
                }
                let dudt = (u[j + 1] - u[j - 1]) / (2.0 * tau);
                worst = worst.max((dudt - lap[j]).abs());
            }
        } else {
            let caputo = caputo_l1(&times, &u, beta)?;
            for j in 1..times.len() {
                if times[j] < t_lo || times[j] > t_hi {
                    continue;
                }
                worst = worst.max((caputo[j] - lap[j]).abs());
            }
        }
    }

    Ok(ResidualReport {
        pde: if beta == 1.0 { PdeTag::Heat } else { PdeTag::Fractional { beta } },
        grid: grid.to_vec(),
        max_residual: worst,
        tolerance,
        inconclusive: truncation_err > 0.5 * tolerance,
    })
}

/// Reference side of a one- or two-sample Kolmogorov-Smirnov test.
pub enum KsReference<'a> {
    /// Second sample (two-sample test).
    Samples(&'a [f64]),
    /// Density on [support_lo, infinity), integrated by adaptive quadrature
    /// into a CDF; must carry total mass 1 within 1e-6.
    Density { pdf: &'a (dyn Fn(f64) -> f64 + Sync), support_lo: f64 },
    /// Closed-form CDF.
    Cdf(&'a (dyn Fn(f64) -> f64 + Sync)),
}

/// KS statistic and asymptotic p-value.
pub fn ks_distribution_test(samples: &[f64], reference: KsReference) -> Result<(f64, f64)> {
    if samples.len() < 1000 {
        return Err(Error::parameter(format!(
            "ks_distribution_test: need at least 1e3 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("ks_distribution_test: non-finite sample".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    match reference {
        KsReference::Samples(other) => {
            if other.len() < 1000 {
                return Err(Error::parameter(
                    "ks_distribution_test: need at least 1e3 reference samples",
                ));
            }
            if other.iter().any(|v| !v.is_finite()) {
                return Err(Error::Input("ks_distribution_test: non-finite sample".into()));
            }
            let mut ys = other.to_vec();
            ys.sort_by(f64::total_cmp);
            let d = two_sample_statistic(&xs, &ys);
            let n_eff = (xs.len() * ys.len()) as f64 / (xs.len() + ys.len()) as f64;
            Ok((d, kolmogorov_q(n_eff.sqrt() * d)))
        }
        KsReference::Cdf(cdf) => {
            let d = one_sample_statistic(&xs, cdf);
            Ok((d, kolmogorov_q((xs.len() as f64).sqrt() * d)))
        }
        KsReference::Density { pdf, support_lo } => {
            let cdf_at = cumulative_cdf(&xs, pdf, support_lo)?;
            let d = xs
                .iter()
                .enumerate()
                .map(|(i, _)| {
                    let f = cdf_at[i];
                    let hi = (i + 1) as f64 / xs.len() as f64 - f;
                    let lo = f - i as f64 / xs.len() as f64;
                    hi.abs().max(lo.abs())
                })
                .fold(0.0f64, f64::max);
            Ok((d, kolmogorov_q((xs.len() as f64).sqrt() * d)))
        }
    }
}

fn one_sample_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).abs().max((f - i as f64 / n).abs())
        })
        .fold(0.0f64, f64::max)
}

fn two_sample_statistic(xs: &[f64], ys: &[f64]) -> f64 {
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// CDF of the reference density at each sorted sample point, by cumulative
/// adaptive quadrature; validates total mass.
fn cumulative_cdf(
    sorted: &[f64],
    pdf: &(dyn Fn(f64) -> f64 + Sync),
    support_lo: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(sorted.len());
    let seg_tol = 1e-9;
    let mut acc = 0.0;
    let mut prev = support_lo;
    for &x in sorted {
        let hi = x.max(prev);
        if hi > prev {
            acc += quad::integrate(&|v: f64| pdf(v), prev, hi, seg_tol, 1e-9)
                .map_err(|e| Error::Reference(format!("ks reference density: {e}")))?
                .value;
            prev = hi;
        }
        out.push(acc.clamp(0.0, 1.0));
    }
    // Total mass including the tail beyond the largest sample.
    let tail = quad::integrate_tail(
        &|v: f64| pdf(v),
        prev,
        (prev - support_lo).max(1.0),
        1e-8,
        1e-8,
    )
    .map_err(|e| Error::Reference(format!("ks reference density: {e}")))?;
    let mass = acc + tail.value;
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::Reference(format!(
            "ks reference density integrates to {mass}, not 1 (tolerance 1e-6)"
        )));
    }
    Ok(out)
}

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1}
/// exp(-2 k^2 lambda^2).
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.18 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_grid(t_max: f64, tau: f64) -> Vec<f64> {
        let n = (t_max / tau).round() as usize;
        (0..=n).map(|j| j as f64 * tau).collect()
    }

    #[test]
    fn caputo_of_constant_is_zero() {
        let t = uniform_grid(0.1, 1e-3);
        let g = vec![3.7; t.len()];
        let d = caputo_l1(&t, &g, 0.5).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn caputo_power_rule() {
        // D^{1/2} t = sqrt(t) / Gamma(3/2).
        let tau = 1e-4;
        let t = uniform_grid(1.0, tau);
        let g: Vec<f64> = t.clone();
        let d = caputo_l1(&t, &g, 0.5).unwrap();
        let mut worst = 0.0f64;
        for (j, &tj) in t.iter().enumerate().skip(100) {
            let expected = tj.sqrt() / gamma(1.5);
            worst = worst.max((d[j] - expected).abs());
        }
        assert!(worst < 1e-4, "max error {worst}");
    }

    #[test]
    fn caputo_l1_exact_on_linear_data() {
        // The scheme integrates the piecewise-linear interpolant exactly, so
        // g(t) = t is reproduced to rounding.
        let t = uniform_grid(0.5, 1e-3);
        let d = caputo_l1(&t, &t, 0.5).unwrap();
        for (j, &tj) in t.iter().enumerate().skip(1) {
            let expected = tj.sqrt() / gamma(1.5);
            assert!((d[j] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn caputo_l1_convergence_order() {
        // Halving tau shrinks the error by at least 2^{1.4} (theoretical
        // rate 2^{2 - beta}) on the curved power-rule benchmark g(t) = t^2,
        // whose Caputo half-derivative is Gamma(3)/Gamma(5/2) t^{3/2}.
        let err_at = |tau: f64| {
            let t = uniform_grid(0.5, tau);
            let g: Vec<f64> = t.iter().map(|&v| v * v).collect();
            let d = caputo_l1(&t, &g, 0.5).unwrap();
            let scale = gamma(3.0) / gamma(2.5);
            t.iter()
                .enumerate()
                .skip((0.05 / tau) as usize)
                .map(|(j, &tj)| (d[j] - scale * tj.powf(1.5)).abs())
                .fold(0.0f64, f64::max)
        };
        let coarse = err_at(2e-4);
        let fine = err_at(1e-4);
        assert!(
            coarse / fine >= 2.0f64.powf(1.4),
            "ratio {} too small",
            coarse / fine
        );
    }

    #[test]
    fn caputo_rejects_nonuniform_grid() {
        let mut t = uniform_grid(0.01, 1e-4);
        t[5] += 3e-5;
        let g = vec![1.0; t.len()];
        assert!(caputo_l1(&t, &g, 0.5).is_err());
    }

    #[test]
    fn caputo_rejects_coarse_grid() {
        let t = uniform_grid(1.0, 1e-2);
        let g = vec![0.0; t.len()];
        assert!(caputo_l1(&t, &g, 0.5).is_err());
    }

    #[test]
    fn gl_cross_check_on_power() {
        // Grunwald-Letnikov one-sided differences as an independent oracle
        // for the same derivative (g - g(0) removes the Riemann-Liouville
        // offset; here g(0) = 0 already).
        let beta = 0.5;
        let tau = 1e-4;
        let t = uniform_grid(0.5, tau);
        let g: Vec<f64> = t.clone();
        let l1 = caputo_l1(&t, &g, beta).unwrap();
        // GL weights w_0 = 1, w_j = w_{j-1} (j - 1 - beta) / j.
        let n = t.len();
        let mut w = vec![0.0; n];
        w[0] = 1.0;
        for j in 1..n {
            w[j] = w[j - 1] * ((j as f64 - 1.0 - beta) / j as f64);
        }
        let j = n - 1;
        let mut gl = 0.0;
        for (k, wk) in w.iter().enumerate().take(j + 1) {
            gl += wk * g[j - k];
        }
        gl *= tau.powf(-beta);
        assert!((l1[j] - gl).abs() < 1e-3, "L1 {} vs GL {gl}", l1[j]);
    }

    #[test]
    fn ks_identical_samples() {
        let xs: Vec<f64> = (0..2000).map(|i| (i as f64) * 0.001).collect();
        let (d, p) = ks_distribution_test(&xs, KsReference::Samples(&xs)).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn ks_two_sample_symmetry() {
        let xs: Vec<f64> = (0..1500).map(|i| (i as f64 * 0.7).sin().abs()).collect();
        let ys: Vec<f64> = (0..1700).map(|i| (i as f64 * 0.3).cos().abs()).collect();
        let (d1, p1) = ks_distribution_test(&xs, KsReference::Samples(&ys)).unwrap();
        let (d2, p2) = ks_distribution_test(&ys, KsReference::Samples(&xs)).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(p1, p2);
    }

    #[test]
    fn ks_uniform_against_its_cdf() {
        // Low-discrepancy points against the uniform CDF: tiny statistic.
        let n = 5000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let (d, p) = ks_distribution_test(&xs, KsReference::Cdf(&|x: f64| x.clamp(0.0, 1.0)))
            .unwrap();
        assert!(d < 1e-3);
        assert!(p > 0.999);
    }

    #[test]
    fn ks_rejects_unnormalized_density() {
        let xs: Vec<f64> = (0..1200).map(|i| 0.001 * i as f64).collect();
        let bad = |x: f64| 0.5 * (-x).exp(); // mass 1/2 on [0, inf)
        match ks_distribution_test(&xs, KsReference::Density { pdf: &bad, support_lo: 0.0 }) {
            Err(Error::Reference(_)) => {}
            other => panic!("expected reference error, got {other:?}"),
        }
        // A density that cannot be integrated at all is a reference error
        // too.
        let diverging = |_: f64| 0.5;
        match ks_distribution_test(
            &xs,
            KsReference::Density { pdf: &diverging, support_lo: 0.0 },
        ) {
            Err(Error::Reference(_)) => {}
            other => panic!("expected reference error, got {other:?}"),
        }
    }

    #[test]
    fn ks_needs_enough_samples() {
        let xs = vec![0.5; 10];
        assert!(ks_distribution_test(&xs, KsReference::Cdf(&|x: f64| x)).is_err());
    }

    #[test]
    fn kolmogorov_q_basics() {
        assert_eq!(kolmogorov_q(0.0), 1.0);
        assert!(kolmogorov_q(0.5) > 0.9);
        assert!(kolmogorov_q(2.0) < 1e-3);
        let q1 = kolmogorov_q(1.0);
        assert!((q1 - 0.27).abs() < 0.01, "Q(1) = {q1}");
    }
}
