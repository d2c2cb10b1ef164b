//! Stochastic-geometry outage and compound-Poisson ruin models for assessing
//! cyber-insurance risk in heterogeneous wireless networks.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure, seeded
//! computations:
//!
//! - [`geometry`]: Poisson and α-Ginibre point processes on a disk, plus
//!   pair-correlation and count statistics used to validate the samplers.
//! - [`hwn`]: K-tier downlink networks with jammers, max-received-power
//!   association, SINR at the typical user and service-outage estimation,
//!   together with closed-form coverage oracles for the Poisson limit.
//! - [`actuarial`]: the insurer surplus as a compound Poisson risk process,
//!   finite-time ruin by exact event-driven simulation, an order-statistics
//!   oracle for deterministic claims, and premium calibration.
//!
//! Every sampler is a function of its inputs and a `u64` seed. Child seeds are
//! derived with [`seed::child_seed`], so results never depend on execution
//! order.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod actuarial;
pub mod error;
pub mod geometry;
pub mod hwn;
pub mod linalg;
pub(crate) mod math;
pub mod quad;
pub mod seed;

pub use error::{Error, Result};
pub use math::{db_to_linear, dbm_to_mw, linear_to_db, mw_to_dbm};
