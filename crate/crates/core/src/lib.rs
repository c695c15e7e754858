//! Downlink XL-MIMO energy-efficiency toolkit.
//!
//! The crate models spatially non-stationary long-term fading along an
//! extra-large linear array, evaluates conjugate-beamforming (CB) and
//! zero-forcing (ZF) SINRs, prices the resulting configuration with a
//! detailed base-station power-consumption model, and selects the active
//! antenna subset that maximizes total energy efficiency.
//!
//! Module map:
//!
//! * [`geometry`]: array layout, user drops, path-loss matrix, fading draws.
//! * [`precoding`]: CB/ZF precoders, instantaneous and deterministic-equivalent SINR.
//! * [`power`]: power-consumption breakdown, flop accounting, energy efficiency.
//! * [`selection`]: HRNP ranking plus local-search, genetic and particle-swarm selectors.
//! * [`analytic`]: closed-form EE approximation and the Newton-Raphson optimum.
//! * [`experiment`]: configuration, Monte-Carlo orchestration, result files.

// `!(x > 0.0)` style guards reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod power;
pub mod precoding;
pub mod rng;
pub mod selection;

pub use error::{Error, Result};
pub use geometry::{
    ArrayGeometry, ChannelRealization, LongTermFadingMatrix, ScenarioConfig, UserPositions,
};
pub use power::{PowerBreakdown, PowerParams};
pub use precoding::{ActiveSet, Precoder, PrecodingResult, SinrReport};
