//! Solvers for time-fractional and higher-order diffusion problems on
//! bounded domains, with three mutually validating routes to the same
//! solution:
//!
//! 1. **Spectral**: Dirichlet eigenfunction expansion with Mittag-Leffler
//!    time profiles.
//! 2. **Subordination quadrature**: the killed heat semigroup averaged over
//!    a random-clock density (inverse stable, or the absolute value of a
//!    symmetric alpha-stable process).
//! 3. **Monte Carlo**: killed Brownian paths run on sampled clocks (inverse
//!    stable draws, nested iterated-Brownian clocks, alpha-stable clocks).
//!
//! A verification layer checks the defining identities numerically: Caputo
//! derivative consistency, per-mode higher-order residuals, the Cauchy-clock
//! PDE residual, and distributional equalities between clock constructions.

pub mod clock;
pub mod config;
pub mod domain;
pub mod error;
pub mod mc;
pub mod quad;
pub mod report;
pub mod run;
pub mod special;
pub mod spectral;
pub mod subordinate;
pub mod verify;

pub use clock::ClockKind;
pub use config::{parse_config, RunConfig};
pub use domain::{DomainSpec, EigenMode, InitialCondition};
pub use error::{Error, Result};
pub use spectral::{MethodTag, SolutionField};
