//! Thin wrappers around libm's gamma family plus the trig-on-pi helpers the
//! eigenfunction code needs for exact boundary zeros.

/// Gamma function for positive arguments.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// 1/Gamma(x), finite for every real x; zero at the poles x = 0, -1, -2, ...
pub fn recip_gamma(x: f64) -> f64 {
    if x > 0.5 {
        if x <= 170.0 {
            1.0 / libm::tgamma(x)
        } else {
            // Gamma exceeds ~1e306 past 170; the reciprocal underflows.
            let lg = libm::lgamma(x);
            if lg > 708.0 {
                0.0
            } else {
                (-lg).exp()
            }
        }
    } else {
        // Reflection: 1/Gamma(x) = sin(pi x) * Gamma(1-x) / pi.
        let s = sinpi(x);
        if s == 0.0 {
            return 0.0;
        }
        let y = 1.0 - x;
        if y <= 170.0 {
            s * libm::tgamma(y) / std::f64::consts::PI
        } else {
            let magnitude = libm::lgamma(y) + s.abs().ln() - std::f64::consts::PI.ln();
            if magnitude > 708.0 {
                f64::INFINITY * s.signum()
            } else {
                s.signum() * magnitude.exp()
            }
        }
    }
}

/// sin(pi x) with exact zeros at integer x.
pub fn sinpi(x: f64) -> f64 {
    // Reduce to r in [-0.5, 0.5] with x = n + r, n integer.
    let n = x.round();
    let r = x - n;
    let s = (std::f64::consts::PI * r).sin();
    // Odd n flips the sign.
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// cos(pi x) with exact zeros at half-integer x.
pub fn cospi(x: f64) -> f64 {
    sinpi(x + 0.5)
}
