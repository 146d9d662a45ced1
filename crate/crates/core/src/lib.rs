//! Continuous-time Wiener phase noise channel observed through an
//! integrate-and-dump receiver with `L` samples per symbol.
//!
//! * [`stochastic`]: inner Wiener paths, the per-interval `(F, N)` pair and
//!   the closed-form fading statistics.
//! * [`channel`]: the discrete oversampled channel, the shifted-exponential
//!   input and the amplitude / differential-phase receiver statistics.
//! * [`bounds`]: analytic achievable-rate lower bounds, the `E|F|⁻²` bound
//!   and the high-SNR pre-log.
//! * [`estimators`]: Monte-Carlo oracles that the analytic bounds must
//!   not exceed.
//!
//! All information quantities are in nats.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// frozen reference values keep every digit they were computed with
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod bounds;
pub mod channel;
pub mod csv;
pub mod error;
pub mod estimators;
pub mod params;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};
pub use params::ChannelParams;
pub use stats::McEstimate;
