//! Real special functions backing the closed-form outage expressions.

mod bessel;
mod cgamma;
mod erf;
mod gamma;
mod incgamma;
mod meijer;

pub use bessel::{bessel_k, bessel_k_scaled, ln_bessel_k_scaled};
pub use cgamma::ln_gamma_complex;
pub use erf::{erf, erfc};
pub use gamma::{beta, gamma, ln_abs_gamma, ln_beta, ln_gamma, rgamma, sin_pi};
pub use incgamma::{
    exp_integral_e, incomplete_gamma, lower_gamma_series, regularized_lower, regularized_upper, upper_gamma_any,
    GammaKind,
};
pub use meijer::{
    meijer_g, meijer_g_contour, meijer_g_leading, meijer_g_leading_terms, meijer_g_leading_terms_scaled,
    meijer_g_scaled, meijer_g_slater, MeijerGSpec, Scaled,
};

pub use gamma::ln_gamma_pos;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecialError {
    #[error("{function}: {detail}")]
    Domain { function: &'static str, detail: String },
    #[error("meijer_g: unsupported instance G^({m},{n})_({p},{q})")]
    Unsupported { m: usize, n: usize, p: usize, q: usize },
    #[error("meijer_g: divergent parameters: {0}")]
    Divergent(String),
    #[error("{function}: cancellation destroyed accuracy (condition number {condition:.3e})")]
    Cancellation { function: &'static str, condition: f64 },
    #[error("{function}: no convergence after {iterations} iterations")]
    NoConvergence { function: &'static str, iterations: usize },
}
