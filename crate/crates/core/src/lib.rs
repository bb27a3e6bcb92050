//! Outage analysis of hybrid THz/FSO backhaul networks with mmWave access.

pub mod channels;
pub mod error;
pub mod montecarlo;
pub mod network;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
