//! mmWave access link: Nakagami-m per antenna, N_t-fold sum, Gamma-distributed SNR.

use super::SPEED_OF_LIGHT;
use crate::error::{positive, Error, Result};
use crate::specfun::{ln_gamma, regularized_lower};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessConfig {
    /// Nakagami fading severity, ≥ 0.5
    pub m: f64,
    pub nt: u32,
    /// mean channel power per antenna
    pub omega: f64,
    pub frequency: f64,
    pub length: f64,
    pub gt_dbi: f64,
    pub gr_dbi: f64,
    /// oxygen absorption, dB/km
    pub rho_ox: f64,
    /// rain attenuation, dB/km
    pub rho_rain: f64,
    pub power: f64,
    pub noise_var: f64,
}

impl Default for AccessConfig {
    fn default() -> Self {
        AccessConfig {
            m: 2.0,
            nt: 3,
            omega: 1.0,
            frequency: 28e9,
            length: 100.0,
            gt_dbi: 44.0,
            gr_dbi: 44.0,
            rho_ox: 15.1,
            rho_rain: 0.0,
            power: 1.0,
            noise_var: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessLinkParams {
    cfg: AccessConfig,
    path_gain: f64,
    gamma_bar: f64,
}

/// Path gain in dB: antenna gains, Friis spreading and gaseous/rain attenuation.
pub fn access_pathloss_db(cfg: &AccessConfig) -> f64 {
    let lambda = SPEED_OF_LIGHT / cfg.frequency;
    cfg.gt_dbi + cfg.gr_dbi
        - 20.0 * (4.0 * PI * cfg.length / lambda).log10()
        - (cfg.rho_ox + cfg.rho_rain) * cfg.length * 1e-3
}

impl AccessLinkParams {
    pub fn new(cfg: AccessConfig) -> Result<Self> {
        if !(cfg.m >= 0.5) {
            return Err(Error::InvalidParameter {
                field: "access.m",
                detail: format!("Nakagami severity must be at least 0.5, got {}", cfg.m),
            });
        }
        if cfg.nt == 0 {
            return Err(Error::InvalidParameter {
                field: "access.nt",
                detail: "at least one antenna is required".into(),
            });
        }
        positive("access.omega", cfg.omega)?;
        positive("access.frequency", cfg.frequency)?;
        positive("access.length", cfg.length)?;
        positive("access.power", cfg.power)?;
        positive("access.noise_var", cfg.noise_var)?;
        if !(cfg.rho_ox >= 0.0 && cfg.rho_rain >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "access.rho",
                detail: "attenuation rates must be non-negative".into(),
            });
        }
        let path_gain = 10f64.powf(access_pathloss_db(&cfg) / 10.0);
        let gamma_bar = cfg.omega * cfg.power * path_gain / cfg.noise_var;
        Ok(AccessLinkParams {
            cfg,
            path_gain,
            gamma_bar,
        })
    }

    pub fn config(&self) -> &AccessConfig {
        &self.cfg
    }

    pub fn with_power(&self, power: f64) -> Result<Self> {
        AccessLinkParams::new(AccessConfig { power, ..self.cfg })
    }

    /// linear path gain p_l
    pub fn path_gain(&self) -> f64 {
        self.path_gain
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    /// Gamma shape of the SNR, m·N_t
    pub fn shape(&self) -> f64 {
        self.cfg.m * self.cfg.nt as f64
    }

    /// F(γ) = P(m N_t, m γ / γ̄)
    pub fn cdf(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        Ok(regularized_lower(self.shape(), self.cfg.m * gamma / self.gamma_bar)?)
    }

    /// Leading term x^k / Γ(k+1) of P(k, x), x = m γ / γ̄.
    pub fn cdf_asymptotic(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(0.0);
        }
        let k = self.shape();
        let x = self.cfg.m * gamma / self.gamma_bar;
        Ok((k * x.ln() - ln_gamma(k + 1.0)?).exp())
    }

    pub fn diversity(&self) -> f64 {
        self.shape()
    }
}

pub fn access_snr_cdf(gamma: f64, link: &AccessLinkParams) -> Result<f64> {
    link.cdf(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::lower_gamma_series;

    #[test]
    fn table_path_gain() {
        let cfg = AccessConfig::default();
        let db = access_pathloss_db(&cfg);
        assert!((db + 14.9).abs() < 0.05, "{db}");
        // doubling the length: 6.02 dB spreading plus the extra attenuation
        let far = AccessConfig { length: 200.0, ..cfg };
        let diff = db - access_pathloss_db(&far);
        assert!((diff - (20.0 * 2f64.log10() + 15.1 * 0.1)).abs() < 1e-12);
        // 1 km of oxygen absorption costs exactly 15.1 dB
        let km = AccessConfig { length: 1000.0, ..cfg };
        let no_ox = AccessConfig { rho_ox: 0.0, ..km };
        assert!((access_pathloss_db(&no_ox) - access_pathloss_db(&km) - 15.1).abs() < 1e-12);
    }

    #[test]
    fn exponential_case() {
        let link = AccessLinkParams::new(AccessConfig {
            m: 1.0,
            nt: 1,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(link.cdf(0.0).unwrap(), 0.0);
        for &g in &[0.01, 0.3, 2.0] {
            let x = g * link.gamma_bar();
            let expect = -(-g).exp_m1();
            assert!((link.cdf(x).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn incomplete_gamma_series_oracle() {
        // m = 2, N_t = 3 at γ/γ̄ = 0.1: P(6, 0.2)
        let link = AccessLinkParams::new(AccessConfig::default()).unwrap();
        let f = link.cdf(0.1 * link.gamma_bar()).unwrap();
        let oracle = lower_gamma_series(6.0, 0.2, 40) / 120.0;
        assert!((f / oracle - 1.0).abs() < 1e-12, "{f} vs {oracle}");
        assert!((f - 7.489e-8).abs() < 1e-10);
    }

    #[test]
    fn asymptote_approaches_cdf() {
        let link = AccessLinkParams::new(AccessConfig::default()).unwrap();
        let mut prev = f64::INFINITY;
        for &u in &[1e-1, 1e-2, 1e-3] {
            let g = u * link.gamma_bar();
            let err = (link.cdf_asymptotic(g).unwrap() / link.cdf(g).unwrap() - 1.0).abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn rejects_bad_severity() {
        assert!(AccessLinkParams::new(AccessConfig {
            m: 0.3,
            ..Default::default()
        })
        .is_err());
        assert!(AccessLinkParams::new(AccessConfig {
            nt: 0,
            ..Default::default()
        })
        .is_err());
    }
}
