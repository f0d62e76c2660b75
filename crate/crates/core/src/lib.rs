//! Time-of-arrival distributions for freely moving Gaussian wave packets.
//!
//! The crate computes four arrival-time densities at a detector — Kijowski's
//! (K), the quantum flux (F), a semi-classical momentum pushforward (SC) and
//! the windowed "quantum clock" density (QC) — together with the matching
//! non-arrival probabilities, and the long-window asymptotics of the QC
//! normalization. All physics runs in dimensionless units (ħ = m = 1, lengths
//! in units of the initial width); [`units`] converts at the boundary.

// NaN must fail range checks, so `!(x > 0.0)` is deliberate; quadrature
// nodes are quoted to full published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod asymptotics;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod numerics;
pub mod packet;
pub mod units;

pub use error::{Error, Kind, Result};
pub use packet::{Detector, GaussianTerm, PacketSpec};
pub use units::UnitSystem;
