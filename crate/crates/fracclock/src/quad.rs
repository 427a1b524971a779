//! Adaptive Gauss-Kronrod quadrature.
//!
//! A single (G7, K15) rule drives everything: finite intervals by greedy
//! bisection of the worst panel, semi-infinite integrals by geometric
//! segment growth until the tail stops contributing.

use crate::error::{Error, Result};

/// Kronrod-15 abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod-15 weights, matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_2,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss-7 weights for the odd-indexed abscissae of `XGK`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub err: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);

    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Integrate `f` over the finite interval `[a, b]`.
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |integral|)` or the panel
/// budget runs out. The returned `err` is the summed panel estimate.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    integrate_with_budget(f, a, b, abs_tol, rel_tol, 4000)
}

pub fn integrate_with_budget<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::parameter("integrate: endpoints must be finite"));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, err: 0.0 });
    }

    let (v, e) = gk15(f, a, b);
    let mut panels = vec![Panel { a, b, value: v, err: e }];

    loop {
        let mut total = 0.0;
        let mut total_err = 0.0;
        for p in &panels {
            total += p.value;
            total_err += p.err;
        }
        let goal = abs_tol.max(rel_tol * total.abs());
        if total_err <= goal || panels.len() >= max_panels {
            if total_err > goal && total_err > 10.0 * goal {
                return Err(Error::Numeric {
                    what: "adaptive quadrature did not converge".into(),
                    value: total,
                    achieved: total_err,
                    requested: goal,
                });
            }
            return Ok(Quadrature { value: total, err: total_err });
        }

        // Split the worst panel.
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty panel list");
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Interval at floating-point resolution; keep it as is.
            panels.push(p);
            let total: f64 = panels.iter().map(|q| q.value).sum();
            let total_err: f64 = panels.iter().map(|q| q.err).sum();
            return Ok(Quadrature { value: total, err: total_err });
        }
        let (vl, el) = gk15(f, p.a, m);
        let (vr, er) = gk15(f, m, p.b);
        panels.push(Panel { a: p.a, b: m, value: vl, err: el });
        panels.push(Panel { a: m, b: p.b, value: vr, err: er });
    }
}

/// Integrate `f` over `[a, infinity)`.
///
/// The axis is covered by segments whose lengths grow geometrically from
/// `scale`; integration stops once a segment contributes less than a small
/// fraction of the tolerance. Handles both exponential tails and power-law
/// tails (the latter just take more segments).
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::parameter("integrate_tail: scale must be positive"));
    }
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut lo = a;
    let mut len = scale;
    let seg_tol = 0.125 * abs_tol;
    let mut quiet = 0usize;
    for _ in 0..220 {
        let hi = lo + len;
        let q = integrate_with_budget(f, lo, hi, seg_tol, rel_tol * 0.25, 800)?;
        total += q.value;
        total_err += q.err;
        if q.value.abs() <= seg_tol.max(1e-3 * rel_tol * total.abs()) {
            quiet += 1;
            // Two consecutive negligible segments: call the tail done.
            if quiet >= 2 {
                return Ok(Quadrature { value: total, err: total_err + q.value.abs() });
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        len *= 2.0;
    }
    Err(Error::Numeric {
        what: "semi-infinite quadrature: tail did not decay".into(),
        value: total,
        achieved: total_err.max(abs_tol * 2.0),
        requested: abs_tol,
    })
}
