//! Performance models for on-package memory attached over a UCIe
//! die-to-die link.
//!
//! The crate has five building blocks:
//!
//! * [`model`] - shared domain types (traffic mixes, link presets, lane
//!   topologies, metric results).
//! * [`analytic`] - closed-form bandwidth-efficiency, density, and
//!   power-efficiency evaluation for every attach approach.
//! * [`codec`] - bit-exact 256-byte flit encode/decode for the three
//!   symmetric layouts (CXL.Mem unoptimized/optimized, CHI Format-X).
//! * [`sim`] - a deterministic link simulator with per-lane-group power
//!   accounting and link-level retry; it serves as an independent check
//!   on the analytic formulas.
//! * [`dram`] - the logic-die-to-DRAM side: clock-ratio validation and
//!   the pipelined four-device LPDDR6 command/data scheduler.
//!
//! The `ucie-mem` binary exposes all of it on the command line; see
//! [`cli`].

pub mod analytic;
pub mod cli;
pub mod codec;
pub mod dram;
pub mod model;
pub mod sim;

pub use model::{ApproachId, LinkVariant, MetricsResult, TrafficMix};
