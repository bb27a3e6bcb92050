//! Physical link models: FSO, THz and mmWave access.

pub mod absorption;
pub mod access;
pub mod fso;
pub mod pointing;
pub mod thz;

pub use absorption::{
    parse_absorption_table, AbsorptionModel, AbsorptionRow, AbsorptionTable, Environment, TableParseError,
};
pub use access::{access_pathloss_db, access_snr_cdf, AccessConfig, AccessLinkParams};
pub use fso::{
    attenuation_coefficient, fso_attenuation, fso_snr_scale, fso_turbulence_params, gamma_gamma_pdf, kruse_q,
    rytov_variance, Detection, FsoCoefficients, FsoConfig, FsoDist, FsoLinkParams, KruseSign,
};
pub use pointing::{derive_pointing, PointingGeometry};
pub use thz::{thz_pathloss, ThzConfig, ThzDist, ThzLinkParams};

/// m/s
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
