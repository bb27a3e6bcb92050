//! FSO link: Beer–Lambert attenuation, Gamma-Gamma turbulence and
//! zero-boresight pointing error.
//!
//! The received electrical SNR is γ = δ_κ I^κ with I = I_a I_p, where
//! δ_κ = (P η I_l)^κ / σ². κ = 1 is heterodyne detection, κ = 2 IM/DD.

use super::pointing::PointingGeometry;
use crate::error::{positive, Error, Result};
use crate::quad;
use crate::specfun::{ln_bessel_k_scaled, ln_gamma, meijer_g_leading_terms_scaled, meijer_g_scaled, MeijerGSpec};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Heterodyne,
    IntensityModulation,
}

impl Detection {
    pub fn kappa(self) -> u32 {
        match self {
            Detection::Heterodyne => 1,
            Detection::IntensityModulation => 2,
        }
    }
}

/// Sign of the wavelength exponent in the Kruse attenuation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KruseSign {
    /// (λ/550 nm)^{-q}: longer wavelengths attenuate less
    Physical,
    /// (λ/550 nm)^{+q}
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoConfig {
    /// m
    pub wavelength: f64,
    /// m
    pub length: f64,
    /// m^{-2/3}
    pub cn2: f64,
    /// km
    pub visibility_km: f64,
    pub detection: Detection,
    pub eta: f64,
    pub power: f64,
    pub noise_var: f64,
    pub aperture_radius: f64,
    pub beamwidth: f64,
    pub jitter_std: f64,
    pub boresight: (f64, f64),
    pub kruse_sign: KruseSign,
}

impl Default for FsoConfig {
    fn default() -> Self {
        FsoConfig {
            wavelength: 1550e-9,
            length: 200.0,
            cn2: 1e-12,
            visibility_km: 10.0,
            detection: Detection::IntensityModulation,
            eta: 1.0,
            power: 1.0,
            noise_var: 1.0,
            aperture_radius: 0.2,
            beamwidth: 0.4,
            jitter_std: 0.05,
            boresight: (0.0, 0.0),
            kruse_sign: KruseSign::Physical,
        }
    }
}

/// Plane-wave Rytov variance 1.23 C_n² k^{7/6} L^{11/6}.
pub fn rytov_variance(cn2: f64, wavelength: f64, length: f64) -> f64 {
    let k = 2.0 * PI / wavelength;
    1.23 * cn2 * k.powf(7.0 / 6.0) * length.powf(11.0 / 6.0)
}

/// Gamma-Gamma shapes (α, β) from the Rytov variance.
pub fn fso_turbulence_params(cn2: f64, wavelength: f64, length: f64) -> (f64, f64) {
    let s2 = rytov_variance(cn2, wavelength, length);
    let s125 = s2.powf(6.0 / 5.0);
    let alpha = 1.0 / (0.49 * s2 / (1.0 + 1.11 * s125).powf(7.0 / 6.0)).exp_m1();
    let beta = 1.0 / (0.51 * s2 / (1.0 + 0.69 * s125).powf(5.0 / 6.0)).exp_m1();
    (alpha, beta)
}

/// Kruse size-distribution exponent q(Vi).
pub fn kruse_q(visibility_km: f64) -> f64 {
    if visibility_km > 50.0 {
        1.6
    } else if visibility_km >= 6.0 {
        1.3
    } else {
        0.585 * visibility_km.cbrt()
    }
}

/// Attenuation coefficient in 1/km.
pub fn attenuation_coefficient(visibility_km: f64, wavelength: f64, sign: KruseSign) -> f64 {
    let q = kruse_q(visibility_km);
    let ratio = wavelength * 1e9 / 550.0;
    let exponent = match sign {
        KruseSign::Physical => -q,
        KruseSign::Literal => q,
    };
    3.912 / visibility_km * ratio.powf(exponent)
}

/// I_l = exp(-C_A L), with L in metres.
pub fn fso_attenuation(visibility_km: f64, wavelength: f64, length: f64, sign: KruseSign) -> f64 {
    (-attenuation_coefficient(visibility_km, wavelength, sign) * length * 1e-3).exp()
}

/// δ_κ = (P η I_l)^κ / σ².
pub fn fso_snr_scale(power: f64, eta: f64, i_l: f64, noise_var: f64, kappa: u32) -> f64 {
    (power * eta * i_l).powi(kappa as i32) / noise_var
}

/// Coefficients of the CDF F(γ) = D₁ G^{3κ,1}_{κ+1,3κ+1}[D₂ γ/(A₀^κ δ) | 1, Ψ₁; Ψ₂, 0].
#[derive(Debug, Clone, PartialEq)]
pub struct FsoCoefficients {
    /// underflows to 0 in weak turbulence; closed forms use `ln_d1`
    pub d1: f64,
    pub ln_d1: f64,
    pub d2: f64,
    pub psi1: Vec<f64>,
    pub psi2: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsoDist {
    Pdf,
    Cdf,
    CdfAsymptotic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FsoLinkParams {
    cfg: FsoConfig,
    pointing: PointingGeometry,
    alpha: f64,
    beta: f64,
    i_l: f64,
    delta: f64,
    coeffs: FsoCoefficients,
}

impl FsoLinkParams {
    pub fn new(cfg: FsoConfig) -> Result<Self> {
        positive("fso.wavelength", cfg.wavelength)?;
        positive("fso.length", cfg.length)?;
        positive("fso.cn2", cfg.cn2)?;
        positive("fso.visibility_km", cfg.visibility_km)?;
        positive("fso.eta", cfg.eta)?;
        positive("fso.power", cfg.power)?;
        positive("fso.noise_var", cfg.noise_var)?;
        let pointing = PointingGeometry::new(cfg.aperture_radius, cfg.beamwidth, cfg.jitter_std)?
            .with_boresight(cfg.boresight.0, cfg.boresight.1);
        let (alpha, beta) = fso_turbulence_params(cfg.cn2, cfg.wavelength, cfg.length);
        let i_l = fso_attenuation(cfg.visibility_km, cfg.wavelength, cfg.length, cfg.kruse_sign);
        let kappa = cfg.detection.kappa();
        let delta = fso_snr_scale(cfg.power, cfg.eta, i_l, cfg.noise_var, kappa);
        let coeffs = coefficients(alpha, beta, pointing.xi2(), kappa)?;
        Ok(FsoLinkParams {
            cfg,
            pointing,
            alpha,
            beta,
            i_l,
            delta,
            coeffs,
        })
    }

    pub fn config(&self) -> &FsoConfig {
        &self.cfg
    }

    pub fn with_power(&self, power: f64) -> Result<Self> {
        FsoLinkParams::new(FsoConfig { power, ..self.cfg })
    }

    pub fn pointing(&self) -> &PointingGeometry {
        &self.pointing
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn attenuation(&self) -> f64 {
        self.i_l
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn kappa(&self) -> u32 {
        self.cfg.detection.kappa()
    }
    pub fn coefficients(&self) -> &FsoCoefficients {
        &self.coeffs
    }

    /// Meijer argument D₂ γ / (A₀^κ δ).
    pub fn cdf_argument(&self, gamma: f64) -> f64 {
        let k = self.kappa() as i32;
        self.coeffs.d2 * gamma / (self.pointing.a0().powi(k) * self.delta)
    }

    /// Spec of G^{3κ,1}_{κ+1,3κ+1}[· | 1, Ψ₁; Ψ₂, last].
    pub fn cdf_spec(&self, last: f64) -> MeijerGSpec {
        let mut a = vec![1.0];
        a.extend_from_slice(&self.coeffs.psi1);
        let mut b = self.coeffs.psi2.clone();
        b.push(last);
        let m = 3 * self.kappa() as usize;
        MeijerGSpec { m, n: 1, a, b }
    }

    fn require_closed_form(&self) -> Result<()> {
        if self.pointing.has_boresight() {
            return Err(Error::UnsupportedClosedForm(
                "nonzero boresight has no closed form; use Monte Carlo",
            ));
        }
        Ok(())
    }

    pub fn cdf(&self, gamma: f64) -> Result<f64> {
        self.require_closed_form()?;
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        if gamma == f64::INFINITY {
            return Ok(1.0);
        }
        let spec = self.cdf_spec(0.0);
        let g = meijer_g_scaled(&spec, self.cdf_argument(gamma))?;
        let v = g.mantissa * (g.ln_scale + self.coeffs.ln_d1).exp();
        Ok(v.clamp(0.0, 1.0))
    }

    pub fn cdf_asymptotic(&self, gamma: f64) -> Result<f64> {
        self.require_closed_form()?;
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.cdf_asymptotic_terms(gamma)?.iter().map(|t| t.0).sum())
    }

    /// Leading power-law terms of the CDF at γ as (value, exponent of γ).
    pub fn cdf_asymptotic_terms(&self, gamma: f64) -> Result<Vec<(f64, f64)>> {
        self.require_closed_form()?;
        let spec = self.cdf_spec(0.0);
        let terms = meijer_g_leading_terms_scaled(&spec, self.cdf_argument(gamma))?;
        Ok(terms
            .into_iter()
            .map(|(v, p)| (v.mantissa * (v.ln_scale + self.coeffs.ln_d1).exp(), p))
            .collect())
    }

    pub fn pdf(&self, gamma: f64) -> Result<f64> {
        self.require_closed_form()?;
        let div = self.diversity();
        if gamma <= 0.0 {
            return Ok(if div > 1.0 { 0.0 } else { f64::INFINITY });
        }
        let xi2 = self.pointing.xi2();
        let kappa = self.kappa() as f64;
        let spec = MeijerGSpec::new(3, 0, vec![xi2 + 1.0], vec![xi2, self.alpha, self.beta])?;
        let z = self.alpha * self.beta / self.pointing.a0() * (gamma / self.delta).powf(1.0 / kappa);
        let g = meijer_g_scaled(&spec, z)?;
        let ln_pre = xi2.ln() - kappa.ln() - gamma.ln() - ln_gamma(self.alpha)? - ln_gamma(self.beta)?;
        Ok((g.mantissa * (ln_pre + g.ln_scale).exp()).max(0.0))
    }

    /// Gamma-Gamma density of the turbulence gain I_a.
    pub fn turbulence_pdf(&self, a: f64) -> f64 {
        gamma_gamma_pdf(self.alpha, self.beta, a)
    }

    /// CDF by direct integration over the turbulence gain:
    /// F(γ) = ∫ f_{I_a}(a) min(1, (i₀/(a A₀))^{ξ²}) da, i₀ = (γ/δ)^{1/κ}.
    pub fn cdf_quadrature(&self, gamma: f64) -> Result<f64> {
        self.require_closed_form()?;
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        let i0 = (gamma / self.delta).powf(1.0 / self.kappa() as f64);
        let split = i0 / self.pointing.a0();
        let xi2 = self.pointing.xi2();
        let (al, be) = (self.alpha, self.beta);
        let head = quad::tanh_sinh(|_, da, _| gamma_gamma_pdf(al, be, da), 0.0, split, 1e-12).value;
        let ln_split = split.ln();
        let tail = quad::integrate_to_infinity(
            |a| {
                let ln_f = ln_gamma_gamma_pdf(al, be, a);
                (ln_f + xi2 * (ln_split - a.ln())).exp()
            },
            split,
            1e-12,
        )
        .value;
        Ok((head + tail).clamp(0.0, 1.0))
    }

    pub fn snr_dist(&self, gamma: f64, kind: FsoDist) -> Result<f64> {
        match kind {
            FsoDist::Pdf => self.pdf(gamma),
            FsoDist::Cdf => self.cdf(gamma),
            FsoDist::CdfAsymptotic => self.cdf_asymptotic(gamma),
        }
    }

    /// min(ξ², α, β)/κ
    pub fn diversity(&self) -> f64 {
        self.pointing.xi2().min(self.alpha).min(self.beta) / self.kappa() as f64
    }
}

fn coefficients(alpha: f64, beta: f64, xi2: f64, kappa: u32) -> Result<FsoCoefficients> {
    let k = kappa as f64;
    let ln_d1 =
        (alpha + beta - 2.0) * k.ln() + xi2.ln() - (k - 1.0) * (2.0 * PI).ln() - ln_gamma(alpha)? - ln_gamma(beta)?;
    let d2 = (alpha * beta).powf(k) / k.powf(2.0 * k);
    let psi1 = (1..=kappa).map(|j| (xi2 + j as f64) / k).collect();
    let mut psi2 = Vec::with_capacity(3 * kappa as usize);
    for base in [xi2, alpha, beta] {
        psi2.extend((0..kappa).map(|j| (base + j as f64) / k));
    }
    Ok(FsoCoefficients {
        d1: ln_d1.exp(),
        ln_d1,
        d2,
        psi1,
        psi2,
    })
}

fn ln_gamma_gamma_pdf(alpha: f64, beta: f64, a: f64) -> f64 {
    if !(a > 0.0) {
        return f64::NEG_INFINITY;
    }
    let ab = alpha * beta;
    let x = 2.0 * (ab * a).sqrt();
    let ln_k = match ln_bessel_k_scaled(alpha - beta, x) {
        Ok(k) => k,
        Err(_) => return f64::NEG_INFINITY,
    };
    std::f64::consts::LN_2 + 0.5 * (alpha + beta) * ab.ln()
        - crate::specfun::ln_gamma_pos(alpha)
        - crate::specfun::ln_gamma_pos(beta)
        + (0.5 * (alpha + beta) - 1.0) * a.ln()
        + ln_k
        - x
}

/// f(a) = 2(αβ)^{(α+β)/2} a^{(α+β)/2-1} K_{α-β}(2√(αβa)) / (Γ(α)Γ(β))
pub fn gamma_gamma_pdf(alpha: f64, beta: f64, a: f64) -> f64 {
    ln_gamma_gamma_pdf(alpha, beta, a).exp()
}
