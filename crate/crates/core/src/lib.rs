//! Stable-throughput analysis and slotted Monte Carlo simulation for a
//! cognitive-radio link pair sharing one channel.
//!
//! A secondary (cognitive) transmitter may sense the channel for a prefix of
//! each time slot and then access it randomly, or skip sensing entirely. The
//! crate computes, for four access schemes:
//!
//! - closed-form average service rates of the primary and secondary queues,
//! - the maximum stable secondary arrival rate as a function of the primary
//!   arrival rate (region boundary curves), optimized over the sensing
//!   duration and the access probabilities,
//! - seeded slot-level simulations that cross-validate the analysis and
//!   probe queue stability empirically.
//!
//! The four schemes are: [`Scheme::Conventional`] (sense, transmit with
//! probability one on an idle declaration), [`Scheme::IdleOnly`] (sense,
//! random access on idle), [`Scheme::IdleBusy`] (random access on idle and,
//! with a second probability, on busy), and [`Scheme::NoSensing`] (random
//! access with no sensing at all).

pub mod config;
pub mod error;
pub mod optimizer;
pub mod phy;
pub mod runner;
pub mod schemes;
pub mod sim;

pub use error::{Error, Result};
pub use phy::{LinkParams, SensingModel};
pub use schemes::{AccessPolicy, NetworkEnv, Scheme, ServiceRates, SuccessModel};
pub use sim::{SecondaryArrivals, SimConfig, SimReport, Verdict};
