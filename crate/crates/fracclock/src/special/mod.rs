//! Analytic kernels shared by every solver: the Mittag-Leffler function on
//! the negative real axis, one-sided stable subordinator densities, inverse
//! stable (hitting time) densities, and symmetric alpha-stable transition
//! densities in one dimension.
//!
//! All routines are pure functions of their arguments.

pub mod alpha_stable;
pub mod gamma;
pub mod mittag_leffler;
pub mod stable;

pub use alpha_stable::alpha_stable_density_1d;
pub use mittag_leffler::{mittag_leffler, mittag_leffler_deriv, mittag_leffler_time_deriv};
pub use stable::{
    inverse_stable_cdf, inverse_stable_density, inverse_stable_median, stable_cdf, stable_density,
};
