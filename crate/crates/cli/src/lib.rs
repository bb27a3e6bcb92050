//! Scenario-driven outage sweeps over hybrid THz/FSO backhaul networks.

pub mod model;
pub mod presets;
pub mod run;
pub mod scenario;
pub mod validate;
