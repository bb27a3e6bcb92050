//! Pointing-error geometry of a Gaussian beam on a circular aperture.
//!
//! The aperture is replaced by the square of equal area, which gives the
//! collected fraction h_p(r) ≈ A₀ exp(-2r²/ω_eq²) for radial displacement r.

use crate::error::{positive, Result};
use crate::specfun::erf;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingGeometry {
    aperture_radius: f64,
    beamwidth: f64,
    jitter_std: f64,
    boresight: (f64, f64),
    v0: f64,
    a0: f64,
    w_eq: f64,
    xi: f64,
}

/// (v₀, A₀, ω_eq, ξ) for aperture radius a, beamwidth ω and jitter ε.
pub fn derive_pointing(a: f64, w: f64, eps: f64) -> Result<(f64, f64, f64, f64)> {
    positive("aperture_radius", a)?;
    positive("beamwidth", w)?;
    positive("jitter_std", eps)?;
    let v0 = (PI * a * a / (2.0 * w * w)).sqrt();
    let e = erf(v0);
    let a0 = e * e;
    let w_eq2 = (PI * a0).sqrt() * w * w / (2.0 * v0 * (-v0 * v0).exp());
    let w_eq = w_eq2.sqrt();
    Ok((v0, a0, w_eq, w_eq / (2.0 * eps)))
}

impl PointingGeometry {
    pub fn new(aperture_radius: f64, beamwidth: f64, jitter_std: f64) -> Result<Self> {
        let (v0, a0, w_eq, xi) = derive_pointing(aperture_radius, beamwidth, jitter_std)?;
        Ok(PointingGeometry {
            aperture_radius,
            beamwidth,
            jitter_std,
            boresight: (0.0, 0.0),
            v0,
            a0,
            w_eq,
            xi,
        })
    }

    pub fn with_boresight(mut self, x: f64, y: f64) -> Self {
        self.boresight = (x, y);
        self
    }

    pub fn aperture_radius(&self) -> f64 {
        self.aperture_radius
    }
    pub fn beamwidth(&self) -> f64 {
        self.beamwidth
    }
    pub fn jitter_std(&self) -> f64 {
        self.jitter_std
    }
    pub fn boresight(&self) -> (f64, f64) {
        self.boresight
    }
    pub fn has_boresight(&self) -> bool {
        self.boresight != (0.0, 0.0)
    }
    pub fn v0(&self) -> f64 {
        self.v0
    }
    pub fn a0(&self) -> f64 {
        self.a0
    }
    pub fn w_eq(&self) -> f64 {
        self.w_eq
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }
    pub fn xi2(&self) -> f64 {
        self.xi * self.xi
    }

    /// P[h_p ≤ h] = (h/A₀)^{ξ²} on [0, A₀], zero boresight.
    pub fn cdf(&self, h: f64) -> f64 {
        if h <= 0.0 {
            0.0
        } else if h >= self.a0 {
            1.0
        } else {
            (h / self.a0).powf(self.xi2())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_kronrod;

    /// Collected fraction of a unit-power Gaussian beam displaced by r along x,
    /// integrated over the equal-area square aperture.
    fn collected(a: f64, w: f64, r: f64) -> f64 {
        let half = 0.5 * a * PI.sqrt();
        let norm = 2.0 / (PI * w * w);
        let line = |shift: f64| {
            gauss_kronrod(
                |x| (-2.0 * (x - shift) * (x - shift) / (w * w)).exp(),
                -half,
                half,
                1e-14,
                0.0,
            )
            .value
        };
        norm * line(r) * line(0.0)
    }

    #[test]
    fn table_values_match_aperture_integration() {
        let (a, w, eps) = (0.2, 0.4, 0.05);
        let g = PointingGeometry::new(a, w, eps).unwrap();
        let a0 = collected(a, w, 0.0);
        assert!((g.a0() - a0).abs() < 1e-12, "{} vs {a0}", g.a0());
        assert!((g.a0() - 0.3899).abs() < 5e-4);
        // curvature of ln h_p at r = 0 is -4/ω_eq²
        let dr = 1e-3;
        let c = ((collected(a, w, dr)).ln() - 2.0 * a0.ln() + (collected(a, w, -dr)).ln()) / (dr * dr);
        let w_eq = (-4.0 / c).sqrt();
        assert!((g.w_eq() - w_eq).abs() / w_eq < 1e-6, "{} vs {w_eq}", g.w_eq());
        assert!((g.xi() - 4.574).abs() < 5e-3);
        // the square replaces the disc of the same area to within 1%
        let disc = 1.0 - (-2.0 * a * a / (w * w)).exp();
        assert!((g.a0() - disc).abs() / disc < 0.01);
    }

    #[test]
    fn full_capture_and_vanishing_xi() {
        let g = PointingGeometry::new(10.0, 0.4, 0.05).unwrap();
        assert!((g.a0() - 1.0).abs() < 1e-12);
        assert!(g.w_eq() >= g.beamwidth());
        let far = PointingGeometry::new(0.2, 0.4, 1e6).unwrap();
        assert!(far.xi() < 1e-6);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(PointingGeometry::new(0.0, 0.4, 0.05).is_err());
        assert!(PointingGeometry::new(0.2, -0.4, 0.05).is_err());
        assert!(PointingGeometry::new(0.2, 0.4, 0.0).is_err());
    }
}
