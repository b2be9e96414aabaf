//! Exact capacity analysis for linear deterministic wireless relay networks.
//!
//! The crate models a network as nodes exchanging length-`q` binary vectors,
//! where a link of gain `n` delivers the top `n` levels of the transmitted
//! vector. Capacity is the minimum GF(2) rank over all source/destination cuts.
//! Alongside the deterministic model it evaluates the Gaussian relay channel and
//! the Gaussian diamond network, comparing relaying rates with cut-set bounds.
//!
//! Modules:
//! - [`gf2`]: dense bit matrices, shift matrices and rank.
//! - [`detnet`]: network model, cut enumeration and min-cut capacity.
//! - [`channels`]: point-to-point, MAC and BC capacities in both models.
//! - [`gaussian_gap`]: relay and diamond gap computations and sweeps.
//! - [`achievability`]: random linear coding trials on layered networks.
//! - [`cli`]: command-line front end used by the `detcap` binary.

pub mod achievability;
pub mod channels;
pub mod cli;
pub mod detnet;
mod error;
pub mod format;
pub mod gaussian_gap;
pub mod gf2;
pub mod par;

pub use error::{Error, Result};
