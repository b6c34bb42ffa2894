//! Capacity upper bounds for the symmetric primitive relay channel.
//!
//! A source `X` reaches a destination `Y` and a relay `Z` over two
//! independent copies of the same channel; the relay forwards a message of
//! rate `C₀` over a noiseless link. The crate computes upper bounds on the
//! capacity `C(C₀)` that improve on the cutset bound by controlling the
//! entropy gap between what the relay message reveals at the relay and at
//! the destination:
//!
//! - [`scalar_bounds`]: the entropy-gap functions, their variational forms and inverses
//! - [`gaussian_relay`]: bounds for Gaussian links under a power constraint
//! - [`dmc_relay`]: the bound for discrete channels, maximized over input distributions
//! - [`rhc_verify`]: numerical checks of the underlying semigroup inequalities
//!
//! Everything is in nats.
//!
//! ```
//! use relay_bounds::{gaussian_relay, EntropyRate, GaussianRelayParams, Tolerance};
//!
//! let params = GaussianRelayParams::from_snr(0.5, EntropyRate::new(0.1)?)?;
//! let report = gaussian_relay::report(&params, Tolerance::default())?;
//! assert!(report.best <= report.cutset);
//! # Ok::<(), relay_bounds::BoundsError>(())
//! ```

// `!(x > 0.0)` style guards must also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dmc_relay;
pub mod error;
pub mod gaussian_relay;
pub mod numeric;
pub mod rhc_verify;
pub mod scalar_bounds;
pub mod types;

pub use dmc_relay::{DiscreteChannel, DmcBoundReport, InputDistribution, OptimizerConfig};
pub use error::{BoundsError, Result};
pub use gaussian_relay::{CurveTable, GaussianBoundReport, GaussianRelayParams};
pub use rhc_verify::{ProductFunction, QuadratureRule, RelayInstance, SemiSimpleSemigroup};
pub use types::{BddDensityAlpha, EntropyRate, Tolerance, SATURATION};
