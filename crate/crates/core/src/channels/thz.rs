//! THz link: Friis spreading with molecular absorption, α-μ fading on N_r
//! MRC branches and a common misalignment gain.
//!
//! Every distribution is expressed in x = ℂ₃ (γ/γ̂)^{α/2}, where the fading
//! sum maps to a unit-scale Gamma(N_r μ) variable and the misalignment to a
//! power law with exponent s = ξ²/α on [0, 1].

use super::absorption::AbsorptionModel;
use super::pointing::PointingGeometry;
use super::{db_to_linear, SPEED_OF_LIGHT};
use crate::error::{positive, Error, Result};
use crate::specfun::{
    self as sf, exp_integral_e, ln_gamma, meijer_g_scaled, regularized_lower, upper_gamma_any, MeijerGSpec,
};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct ThzConfig {
    pub frequency: f64,
    pub length: f64,
    pub gt_dbi: f64,
    pub gr_dbi: f64,
    pub alpha: f64,
    pub mu: f64,
    pub nr: u32,
    pub omega: f64,
    pub absorption: AbsorptionModel,
    /// `None` uses the effective aperture radius λ√G_t / (2π)
    pub aperture_radius: Option<f64>,
    pub beamwidth: f64,
    pub jitter_std: f64,
    pub power: f64,
    pub noise_var: f64,
}

impl Default for ThzConfig {
    fn default() -> Self {
        ThzConfig {
            frequency: 119e9,
            length: 200.0,
            gt_dbi: 55.0,
            gr_dbi: 55.0,
            alpha: 2.0,
            mu: 3.0,
            nr: 2,
            omega: 1.0,
            absorption: AbsorptionModel::Direct { k_abs: 5e-4 },
            aperture_radius: None,
            beamwidth: 0.5,
            jitter_std: 0.06,
            power: 1.0,
            noise_var: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThzDist {
    Pdf,
    Cdf,
    CdfMeijer,
    CdfAsymptotic,
}

/// Amplitude path gain c√(G_t G_r)/(4π f d) · exp(-d k_abs / 2), gains linear.
pub fn thz_pathloss(frequency: f64, length: f64, gt: f64, gr: f64, absorption: &AbsorptionModel) -> Result<f64> {
    positive("thz.frequency", frequency)?;
    positive("thz.length", length)?;
    positive("thz.gt", gt)?;
    positive("thz.gr", gr)?;
    let k_abs = absorption.k_abs(frequency)?;
    Ok(SPEED_OF_LIGHT * (gt * gr).sqrt() / (4.0 * PI * frequency * length) * (-0.5 * length * k_abs).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThzLinkParams {
    cfg: ThzConfig,
    pointing: PointingGeometry,
    h_l: f64,
    gamma_bar: f64,
    c1: f64,
    c3: f64,
}

impl ThzLinkParams {
    pub fn new(cfg: ThzConfig) -> Result<Self> {
        positive("thz.alpha", cfg.alpha)?;
        positive("thz.mu", cfg.mu)?;
        positive("thz.omega", cfg.omega)?;
        positive("thz.power", cfg.power)?;
        positive("thz.noise_var", cfg.noise_var)?;
        if cfg.nr == 0 {
            return Err(Error::InvalidParameter {
                field: "thz.nr",
                detail: "at least one receive antenna is required".into(),
            });
        }
        let gt = db_to_linear(cfg.gt_dbi);
        let gr = db_to_linear(cfg.gr_dbi);
        let h_l = thz_pathloss(cfg.frequency, cfg.length, gt, gr, &cfg.absorption)?;
        let aperture = match cfg.aperture_radius {
            Some(a) => a,
            None => SPEED_OF_LIGHT / cfg.frequency * gt.sqrt() / (2.0 * PI),
        };
        let pointing = PointingGeometry::new(aperture, cfg.beamwidth, cfg.jitter_std)?;
        let gamma_bar = cfg.power * h_l * h_l / cfg.noise_var;
        let k = cfg.nr as f64 * cfg.mu;
        let c3 = k / (pointing.a0() * cfg.omega).powf(cfg.alpha);
        let s = pointing.xi2() / cfg.alpha;
        let c1 = (pointing.xi2().ln() + s * c3.ln() - ln_gamma(k)?).exp();
        Ok(ThzLinkParams {
            cfg,
            pointing,
            h_l,
            gamma_bar,
            c1,
            c3,
        })
    }

    pub fn config(&self) -> &ThzConfig {
        &self.cfg
    }

    pub fn with_power(&self, power: f64) -> Result<Self> {
        ThzLinkParams::new(ThzConfig {
            power,
            ..self.cfg.clone()
        })
    }

    pub fn pointing(&self) -> &PointingGeometry {
        &self.pointing
    }
    pub fn path_gain(&self) -> f64 {
        self.h_l
    }
    /// per-branch SNR scale P h_l² / σ²
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }
    /// N_r γ̄
    pub fn gamma_hat(&self) -> f64 {
        self.cfg.nr as f64 * self.gamma_bar
    }
    /// Gamma shape N_r μ of the fading sum
    pub fn shape(&self) -> f64 {
        self.cfg.nr as f64 * self.cfg.mu
    }
    /// ξ²/α
    pub fn pointing_exponent(&self) -> f64 {
        self.pointing.xi2() / self.cfg.alpha
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    /// N_r μ - ξ²/α
    pub fn c2(&self) -> f64 {
        self.shape() - self.pointing_exponent()
    }
    pub fn c3(&self) -> f64 {
        self.c3
    }

    /// x = ℂ₃ (γ/γ̂)^{α/2}
    pub fn argument(&self, gamma: f64) -> f64 {
        self.c3 * (gamma / self.gamma_hat()).powf(0.5 * self.cfg.alpha)
    }

    /// F = P(k, x) + x^s Γ(k - s, x) / Γ(k)
    pub fn cdf(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        if gamma == f64::INFINITY {
            return Ok(1.0);
        }
        let x = self.argument(gamma);
        let k = self.shape();
        let s = self.pointing_exponent();
        if s.is_infinite() {
            return Ok(regularized_lower(k, x)?);
        }
        let tail = (self.ln_tail(x)? - ln_gamma(k)?).exp();
        Ok((regularized_lower(k, x)? + tail).clamp(0.0, 1.0))
    }

    /// ln(x^s Γ(ℂ₂, x)); for ℂ₂ < 0 this is x^k E_{1-ℂ₂}(x), which avoids
    /// the opposite overflows of x^s and Γ(ℂ₂, x) at small x.
    fn ln_tail(&self, x: f64) -> Result<f64> {
        let c2 = self.c2();
        if c2 < 0.0 {
            Ok(self.shape() * x.ln() + exp_integral_e(1.0 - c2, x)?.ln())
        } else {
            Ok(self.pointing_exponent() * x.ln() + upper_gamma_any(c2, x)?.ln())
        }
    }

    pub fn pdf(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        let x = self.argument(gamma);
        let s = self.pointing_exponent();
        if s.is_infinite() {
            let k = self.shape();
            let ln = (k - 1.0) * x.ln() - x - ln_gamma(k)? + (0.5 * self.cfg.alpha * x / gamma).ln();
            return Ok(ln.exp());
        }
        let ln = (0.5 * self.pointing.xi2()).ln() + self.ln_tail(x)? - ln_gamma(self.shape())? - gamma.ln();
        Ok(ln.exp())
    }

    /// ℂ₁/(α γ̂^{ξ²/2}) γ^{ξ²/2} G^{2,1}_{2,3}[x | 1-s, 1; 0, ℂ₂, -s]
    pub fn cdf_meijer(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        let s = self.pointing_exponent();
        let spec = MeijerGSpec::new(2, 1, vec![1.0 - s, 1.0], vec![0.0, self.c2(), -s])?;
        let g = meijer_g_scaled(&spec, self.argument(gamma))?;
        let half = 0.5 * self.pointing.xi2();
        let ln_pre = self.c1.ln() - self.cfg.alpha.ln() + half * (gamma / self.gamma_hat()).ln();
        Ok((g.mantissa * (ln_pre + g.ln_scale).exp()).clamp(0.0, 1.0))
    }

    /// Two leading powers of u = γ/γ̂:
    /// (ℂ₁Γ(ℂ₂)/ξ²) u^{ξ²/2} - ℂ₁ℂ₃^{ℂ₂}/(ℂ₂ α N_r μ) u^{α N_r μ/2}.
    pub fn cdf_asymptotic(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.cdf_asymptotic_terms(gamma)?.iter().map(|t| t.0).sum())
    }

    /// The two asymptotic terms at γ > 0 as (value, exponent of γ).
    pub fn cdf_asymptotic_terms(&self, gamma: f64) -> Result<[(f64, f64); 2]> {
        let c2 = self.c2();
        if c2.abs() < 1e-9 || (c2 < 0.0 && (c2 - c2.round()).abs() < 1e-9) {
            return Err(Error::UnsupportedClosedForm(
                "asymptotic THz cdf needs N_r μ - ξ²/α off the non-positive integers",
            ));
        }
        let u = gamma / self.gamma_hat();
        let xi2 = self.pointing.xi2();
        let k = self.shape();
        let alpha = self.cfg.alpha;
        let first = self.c1 * sf::gamma(c2)? / xi2 * u.powf(0.5 * xi2);
        let second = self.c1 * self.c3.powf(c2) / (c2 * alpha * k) * u.powf(0.5 * alpha * k);
        Ok([(first, 0.5 * xi2), (-second, 0.5 * alpha * k)])
    }

    pub fn snr_dist(&self, gamma: f64, kind: ThzDist) -> Result<f64> {
        match kind {
            ThzDist::Pdf => self.pdf(gamma),
            ThzDist::Cdf => self.cdf(gamma),
            ThzDist::CdfMeijer => self.cdf_meijer(gamma),
            ThzDist::CdfAsymptotic => self.cdf_asymptotic(gamma),
        }
    }

    /// min(ξ²/2, α N_r μ / 2)
    pub fn diversity(&self) -> f64 {
        (0.5 * self.pointing.xi2()).min(0.5 * self.cfg.alpha * self.shape())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    fn table(power_db: f64) -> ThzLinkParams {
        ThzLinkParams::new(ThzConfig {
            power: db_to_linear(power_db),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn friis_spreading() {
        let free = AbsorptionModel::Direct { k_abs: 0.0 };
        let g = db_to_linear(55.0);
        let h = thz_pathloss(119e9, 200.0, g, g, &free).unwrap();
        assert!((h - 0.317).abs() < 1e-3, "{h}");
        let lossy = AbsorptionModel::Direct { k_abs: 3e-3 };
        let r = thz_pathloss(119e9, 400.0, g, g, &lossy).unwrap() / thz_pathloss(119e9, 200.0, g, g, &lossy).unwrap();
        assert!((r - 0.5 * (-0.5 * 200.0 * 3e-3f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn table_pointing_and_diversity() {
        let link = table(0.0);
        assert!((link.pointing().aperture_radius() - 0.2254).abs() < 1e-3);
        assert!((link.pointing().xi() - 4.645).abs() < 5e-3, "{}", link.pointing().xi());
        assert_eq!(link.diversity(), 6.0);
    }

    #[test]
    fn rayleigh_without_misalignment() {
        let link = ThzLinkParams::new(ThzConfig {
            mu: 1.0,
            nr: 1,
            aperture_radius: Some(50.0),
            jitter_std: 1e-6,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(link.cdf(0.0).unwrap(), 0.0);
        let gb = link.gamma_bar();
        for &t in &[0.01_f64, 0.5, 3.0] {
            let expect = -(-t).exp_m1();
            let got = link.cdf(t * gb).unwrap();
            assert!(
                (got - expect).abs() < 1e-9 * expect.max(1e-300) + 1e-15,
                "{t}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn meijer_form_matches_gamma_form() {
        for cfg in [
            ThzConfig::default(),
            ThzConfig {
                alpha: 2.7,
                mu: 1.4,
                nr: 3,
                ..Default::default()
            },
            ThzConfig {
                jitter_std: 0.3,
                ..Default::default()
            },
            ThzConfig {
                alpha: 1.5,
                mu: 0.8,
                nr: 1,
                jitter_std: 0.15,
                ..Default::default()
            },
        ] {
            let link = ThzLinkParams::new(cfg).unwrap();
            for &r in &[1e-4, 1e-2, 0.3, 1.0, 4.0] {
                let g = r * link.gamma_hat();
                let a = link.cdf(g).unwrap();
                let b = link.cdf_meijer(g).unwrap();
                assert!((a - b).abs() <= 1e-8 * a, "γ/γ̂={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pdf_integrates_to_one_and_matches_cdf() {
        let link = ThzLinkParams::new(ThzConfig {
            alpha: 2.4,
            mu: 1.3,
            nr: 2,
            jitter_std: 0.2,
            ..Default::default()
        })
        .unwrap();
        let total = quad::integrate_to_infinity(|g| link.pdf(g).unwrap(), 0.0, 1e-10).value;
        assert!((total - 1.0).abs() < 1e-7, "{total}");
        let g = 0.7 * link.gamma_hat();
        let part = quad::gauss_kronrod(|t| link.pdf(t).unwrap(), 0.0, g, 1e-11, 0.0).value;
        assert!((part / link.cdf(g).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn asymptote_approaches_exact() {
        let link = table(0.0);
        let err = |r: f64| {
            let g = r * link.gamma_hat();
            (link.cdf_asymptotic(g).unwrap() / link.cdf(g).unwrap() - 1.0).abs()
        };
        assert!(err(1e-4) < 1e-2);
        assert!(err(1e-6) < 1e-4);
        assert!(err(1e-6) < err(1e-5) && err(1e-5) < err(1e-4));
    }

    #[test]
    fn uncovered_frequency_fails() {
        let t = crate::channels::AbsorptionTable::parse("200, 0, 1e-4\n300, 0, 0", Default::default()).unwrap();
        let cfg = ThzConfig {
            absorption: AbsorptionModel::Polynomial(t),
            ..Default::default()
        };
        assert!(matches!(
            ThzLinkParams::new(cfg),
            Err(Error::UnresolvedAbsorption { .. })
        ));
    }
}
