//! Downlink NOMA pairing laboratory.
//!
//! Two users sharing a time-frequency resource in the power domain can beat
//! an orthogonal split only when their channel qualities differ enough and
//! the strong user's interference cancellation is good enough. This crate
//! provides the closed-form machinery to decide that, plus the simulation
//! harness to measure it:
//!
//! * [`rates`] — OMA/NOMA SINR and rate models (log-rate and discrete-rate),
//!   including residual-interference (imperfect SIC) terms.
//! * [`bounds`] — closed-form bounds on the power split `alpha_s` and the
//!   SIC imperfection `beta`, and the minimum-SINR-difference pairing
//!   criterion they compose into.
//! * [`pairing`] — the adaptive user pairing algorithm plus near-far and
//!   uniform-offset baselines, power-split selection, and plan evaluation.
//! * [`netsim`] — Poisson-deployed base stations and users, pathloss with
//!   Rayleigh fading, max-SINR association, and a deterministic seeded
//!   Monte Carlo experiment runner.
//!
//! All core math operates on linear-scale SINR; dB conversion belongs at
//! I/O boundaries (see [`units`]).
//!
//! ```
//! use pairlab_core::pairing::{evaluate_plan, plan_aup, SplitPolicy};
//! use pairlab_core::rates::{DrTable, RateModel, SicImperfection, UserChannel};
//!
//! // eight users between roughly 2 and 14 dB
//! let users: Vec<UserChannel> = (1..=8)
//!     .map(|i| UserChannel::new(format!("u{i}"), 1.5f64.powi(i)).unwrap())
//!     .collect();
//! let sic = SicImperfection::new(0.02).unwrap();
//! let plan = plan_aup(&users, sic, SplitPolicy::default()).unwrap();
//! assert_eq!(plan.pairs.len(), 4);
//!
//! // at this residual-interference level, pairing still beats all-OMA
//! let report = evaluate_plan(&plan, sic, RateModel::Lr, &DrTable::default()).unwrap();
//! assert!(report.total_rate > report.total_oma_rate);
//! ```

pub mod bounds;
pub mod error;
pub mod netsim;
pub mod pairing;
pub mod rates;
pub mod units;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
