//! Single hybrid hop: a THz and an FSO link in parallel into one receiver.
//!
//! Switching is in outage when both SNRs are below threshold; combining
//! when their MRC sum is.

use super::{Method, OutageEstimate};
use crate::channels::{FsoLinkParams, ThzLinkParams};
use crate::error::{positive, Result};
use crate::quad;
use crate::specfun::{ln_abs_gamma, ln_gamma, meijer_g_scaled};

/// Terms kept in the combining series before declaring non-convergence.
pub const DEFAULT_SERIES_TERMS: usize = 50;
/// A term below this fraction of the partial sum ends the series.
pub const SERIES_TOL: f64 = 1e-14;
// Σ|t| / |sum| above this loses more digits than the backends may disagree by.
const MAX_CANCELLATION: f64 = 1e5;
const QUAD_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Switching,
    Combining,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Switching => "switching",
            Mode::Combining => "combining",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombiningBackend {
    /// residue series, quadrature if it does not converge
    Series,
    Quadrature,
}

/// `None` for a link means it is not deployed (its SNR is always zero).
#[derive(Debug, Clone, PartialEq)]
pub struct HopConfig {
    pub fso: Option<FsoLinkParams>,
    pub thz: Option<ThzLinkParams>,
    pub mode: Mode,
    pub threshold: f64,
}

impl HopConfig {
    pub fn new(fso: Option<FsoLinkParams>, thz: Option<ThzLinkParams>, mode: Mode, threshold: f64) -> Result<Self> {
        positive("hop.threshold", threshold)?;
        Ok(HopConfig {
            fso,
            thz,
            mode,
            threshold,
        })
    }

    pub fn fso_cdf(&self) -> Result<f64> {
        self.fso.as_ref().map_or(Ok(1.0), |f| f.cdf(self.threshold))
    }

    pub fn thz_cdf(&self) -> Result<f64> {
        self.thz.as_ref().map_or(Ok(1.0), |t| t.cdf(self.threshold))
    }

    /// FSO plus THz diversity; an absent link contributes nothing.
    pub fn diversity(&self) -> f64 {
        self.fso.as_ref().map_or(0.0, |f| f.diversity()) + self.thz.as_ref().map_or(0.0, |t| t.diversity())
    }
}

/// F_T(γ_th) F_F(γ_th)
pub fn hop_outage_switching(hop: &HopConfig) -> Result<OutageEstimate> {
    Ok(OutageEstimate::analytic(
        hop.thz_cdf()? * hop.fso_cdf()?,
        Method::Closed,
    ))
}

pub fn hop_outage_combining(hop: &HopConfig, backend: CombiningBackend) -> Result<OutageEstimate> {
    let (fso, thz) = match (&hop.fso, &hop.thz) {
        (Some(f), Some(t)) => (f, t),
        _ => return hop_outage_switching(hop),
    };
    if backend == CombiningBackend::Series {
        if let Ok(s) = combining_series(fso, thz, hop.threshold, DEFAULT_SERIES_TERMS) {
            if s.converged {
                return Ok(OutageEstimate::analytic(s.value, Method::Closed));
            }
        }
    }
    let v = combining_quadrature(fso, thz, hop.threshold)?;
    Ok(OutageEstimate::analytic(v, Method::Quadrature))
}

pub fn hop_outage(hop: &HopConfig, backend: CombiningBackend) -> Result<OutageEstimate> {
    match hop.mode {
        Mode::Switching => hop_outage_switching(hop),
        Mode::Combining => hop_outage_combining(hop, backend),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOutcome {
    pub value: f64,
    pub terms: usize,
    pub converged: bool,
}

/// Neumaier-compensated running sum that also tracks Σ|t|.
#[derive(Default)]
struct Compensated {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// P[γ_T + γ_F < γ_th] from the lower-incomplete-gamma expansion of F_T,
/// integrated term by term against the FSO density:
///
/// ```text
/// P = ℂ₃^s/Γ(k) [Γ(ℂ₂) H(ξ²/2) - s Σ_z (-1)^z ℂ₃^{ℂ₂+z} H(α(k+z)/2) / (z! (k+z)(ℂ₂+z))]
/// H(ν) = E[((γ_th - γ_F)/γ̂)^ν ; γ_F < γ_th]
///      = Γ(ν+1) (γ_th/γ̂)^ν 𝔻₁ G^{3κ,1}_{κ+1,3κ+1}[z_F | 1, Ψ₁; Ψ₂, -ν]
/// ```
pub fn combining_series(
    fso: &FsoLinkParams,
    thz: &ThzLinkParams,
    threshold: f64,
    max_terms: usize,
) -> Result<SeriesOutcome> {
    positive("threshold", threshold)?;
    let s = thz.pointing_exponent();
    let k = thz.shape();
    let c2 = thz.c2();
    let alpha = thz.config().alpha;
    let ln_c3 = thz.c3().ln();
    let ln_ratio = (threshold / thz.gamma_hat()).ln();
    let z_f = fso.cdf_argument(threshold);
    let ln_d1 = fso.coefficients().ln_d1;
    let ln_gk = ln_gamma(k)?;

    // ln H(ν) and its sign
    let ln_h = |nu: f64| -> Result<(f64, f64)> {
        let g = meijer_g_scaled(&fso.cdf_spec(-nu), z_f)?;
        let ln = ln_gamma(nu + 1.0)? + nu * ln_ratio + ln_d1 + g.ln_scale + g.mantissa.abs().ln();
        Ok((ln, g.mantissa.signum()))
    };

    let mut acc = Compensated::default();
    let (ln_g2, sign_g2) = ln_abs_gamma(c2)?;
    let (lh, sh) = ln_h(0.5 * thz.pointing().xi2())?;
    acc.add(sign_g2 * sh * (s * ln_c3 - ln_gk + ln_g2 + lh).exp());

    let mut converged = false;
    let mut terms = 0;
    let mut ln_fact = 0.0;
    let mut prev = 0.0;
    for z in 0..max_terms {
        let zf = z as f64;
        if z > 0 {
            ln_fact += zf.ln();
        }
        let (lh, sh) = ln_h(0.5 * alpha * (k + zf))?;
        let denom = (k + zf) * (c2 + zf);
        let sign = if z % 2 == 0 { 1.0 } else { -1.0 } * sh * denom.signum();
        let ln_t = (k + zf) * ln_c3 - ln_gk + lh - ln_fact - denom.abs().ln();
        let t = -s * sign * ln_t.exp();
        acc.add(t);
        terms = z + 1;
        // terms grow until z ≈ x_th, so only a shrinking term may end the sum
        if t.abs() < prev && t.abs() <= SERIES_TOL * acc.value().abs() {
            converged = true;
            break;
        }
        prev = t.abs();
    }
    let value = acc.value();
    let well_conditioned = value > 0.0 && value <= 1.0 + 1e-9 && acc.abs <= MAX_CANCELLATION * value;
    Ok(SeriesOutcome {
        value: value.clamp(0.0, 1.0),
        terms,
        converged: converged && well_conditioned && value.is_finite(),
    })
}

/// ∫₀^{γ_th} f_F(γ) F_T(γ_th - γ) dγ by double-exponential quadrature.
pub fn combining_quadrature(fso: &FsoLinkParams, thz: &ThzLinkParams, threshold: f64) -> Result<f64> {
    positive("threshold", threshold)?;
    // surface the first evaluation error instead of integrating NaN
    fso.pdf(0.5 * threshold)?;
    thz.cdf(0.5 * threshold)?;
    let r = quad::tanh_sinh(
        |_, da, db| {
            let f = fso.pdf(da).unwrap_or(f64::NAN);
            if f == 0.0 {
                return 0.0;
            }
            f * thz.cdf(db).unwrap_or(f64::NAN)
        },
        0.0,
        threshold,
        QUAD_TOL,
    );
    Ok(r.value.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{db_to_linear, FsoConfig, ThzConfig};

    fn links(power_db: f64) -> (FsoLinkParams, ThzLinkParams) {
        let p = db_to_linear(power_db);
        (
            FsoLinkParams::new(FsoConfig {
                power: p,
                ..Default::default()
            })
            .unwrap(),
            ThzLinkParams::new(ThzConfig {
                power: p,
                ..Default::default()
            })
            .unwrap(),
        )
    }

    #[test]
    fn series_matches_quadrature() {
        // x_th = ℂ₃ γ_th/γ̂ stays below ~5 on this grid
        for &(db, th) in &[
            (20.0, 0.5),
            (20.0, 1.0),
            (30.0, 1.0),
            (30.0, 3.0),
            (40.0, 3.0),
            (40.0, 10.0),
        ] {
            let (f, t) = links(db);
            {
                let s = combining_series(&f, &t, th, DEFAULT_SERIES_TERMS).unwrap();
                let q = combining_quadrature(&f, &t, th).unwrap();
                assert!(s.converged, "{db} dB, γth={th}: {s:?}");
                assert!((s.value - q).abs() <= 1e-5 * q, "{db} dB, γth={th}: {} vs {q}", s.value);
            }
        }
    }

    #[test]
    fn cancellation_is_flagged_and_falls_back() {
        // x_th = ℂ₃ γ_th/γ̂ ≈ 15: the alternating tail cancels to ~1e-6
        let (f, t) = links(10.0);
        let s = combining_series(&f, &t, 0.5, DEFAULT_SERIES_TERMS).unwrap();
        assert!(!s.converged);
        let hop = HopConfig::new(Some(f), Some(t), Mode::Combining, 0.5).unwrap();
        let e = hop_outage(&hop, CombiningBackend::Series).unwrap();
        assert_eq!(e.method, Method::Quadrature);
    }

    #[test]
    fn truncation_is_stable() {
        let (f, t) = links(25.0);
        let a = combining_series(&f, &t, 1.0, 50).unwrap();
        let b = combining_series(&f, &t, 1.0, 150).unwrap();
        assert!((a.value - b.value).abs() <= 1e-8 * b.value);
    }

    #[test]
    fn degenerate_links() {
        let (f, t) = links(20.0);
        let th = 1.5;
        let fso_only = HopConfig::new(Some(f.clone()), None, Mode::Combining, th).unwrap();
        let v = hop_outage_combining(&fso_only, CombiningBackend::Series).unwrap().value;
        assert_eq!(v, f.cdf(th).unwrap());
        let thz_only = HopConfig::new(None, Some(t.clone()), Mode::Combining, th).unwrap();
        assert_eq!(
            hop_outage(&thz_only, CombiningBackend::Series).unwrap().value,
            t.cdf(th).unwrap()
        );
        let sw = HopConfig::new(Some(f), Some(t), Mode::Switching, th).unwrap();
        let co = HopConfig {
            mode: Mode::Combining,
            ..sw.clone()
        };
        let (a, b) = (
            hop_outage(&co, CombiningBackend::Series).unwrap().value,
            hop_outage(&sw, CombiningBackend::Series).unwrap().value,
        );
        assert!(a <= b && a > 0.0, "{a} {b}");
    }
}
