use crate::specfun::SpecialError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {detail}")]
    InvalidParameter { field: &'static str, detail: String },
    #[error("no closed form: {0}")]
    UnsupportedClosedForm(&'static str),
    #[error("absorption table does not cover {freq_ghz} GHz (covered {lo_ghz}..{hi_ghz} GHz)")]
    UnresolvedAbsorption { freq_ghz: f64, lo_ghz: f64, hi_ghz: f64 },
    #[error("absorption coefficient evaluates negative ({value} 1/m) at {freq_ghz} GHz")]
    NegativeAbsorption { freq_ghz: f64, value: f64 },
    #[error(transparent)]
    Special(#[from] SpecialError),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(field: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter {
            field,
            detail: format!("must be positive and finite, got {v}"),
        })
    }
}
