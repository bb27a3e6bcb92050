//! Channel realizations for the three link types.

use crate::channels::{AccessLinkParams, FsoLinkParams, PointingGeometry, ThzLinkParams};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThzSumMode {
    /// Σ over N_r independent α-μ powers
    ExactSum,
    /// one α-μ envelope with shape N_r μ, scaled by N_r
    AlphaMuApprox,
}

fn gamma_unit<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    // shape > 0 is a constructor invariant of every caller
    Gamma::new(shape, 1.0).expect("positive gamma shape").sample(rng)
}

/// Product of two unit-mean Gamma variates with shapes α and β.
pub fn sample_gamma_gamma<R: Rng + ?Sized>(rng: &mut R, alpha: f64, beta: f64) -> f64 {
    gamma_unit(rng, alpha) / alpha * (gamma_unit(rng, beta) / beta)
}

/// A₀ exp(-2r²/ω_eq²) with per-axis displacement Normal(ϖ, ε²).
pub fn sample_pointing<R: Rng + ?Sized>(rng: &mut R, g: &PointingGeometry, with_boresight: bool) -> f64 {
    let (bx, by) = if with_boresight { g.boresight() } else { (0.0, 0.0) };
    let dx: f64 = bx + g.jitter_std() * rng.sample::<f64, _>(StandardNormal);
    let dy: f64 = by + g.jitter_std() * rng.sample::<f64, _>(StandardNormal);
    let w2 = g.w_eq() * g.w_eq();
    g.a0() * (-2.0 * (dx * dx + dy * dy) / w2).exp()
}

/// Ω (G/μ)^{1/α}, G ~ Gamma(μ, 1).
pub fn sample_alpha_mu<R: Rng + ?Sized>(rng: &mut R, alpha: f64, mu: f64, omega: f64) -> f64 {
    omega * (gamma_unit(rng, mu) / mu).powf(1.0 / alpha)
}

/// δ_κ (I_a I_p)^κ
pub fn sample_fso_snr<R: Rng + ?Sized>(rng: &mut R, link: &FsoLinkParams, with_boresight: bool) -> f64 {
    let ia = sample_gamma_gamma(rng, link.alpha(), link.beta());
    let ip = sample_pointing(rng, link.pointing(), with_boresight);
    link.delta() * (ia * ip).powi(link.kappa() as i32)
}

/// γ̄ h_p² Σ|h_i|² (exact) or γ̂ h_p² X², X ~ α-μ(α, N_r μ, Ω) (approximate).
pub fn sample_thz_snr<R: Rng + ?Sized>(rng: &mut R, link: &ThzLinkParams, mode: ThzSumMode) -> f64 {
    let cfg = link.config();
    let hp = sample_pointing(rng, link.pointing(), false);
    let fading = match mode {
        ThzSumMode::ExactSum => {
            let sum: f64 = (0..cfg.nr)
                .map(|_| sample_alpha_mu(rng, cfg.alpha, cfg.mu, cfg.omega).powi(2))
                .sum();
            link.gamma_bar() * sum
        }
        ThzSumMode::AlphaMuApprox => {
            let x = sample_alpha_mu(rng, cfg.alpha, link.shape(), cfg.omega);
            link.gamma_hat() * x * x
        }
    };
    hp * hp * fading
}

/// (P p_l / σ²) Σ_{N_t} |h|², |h|² ~ Gamma(m, Ω/m).
pub fn sample_access_snr<R: Rng + ?Sized>(rng: &mut R, link: &AccessLinkParams) -> f64 {
    let cfg = link.config();
    let sum: f64 = (0..cfg.nt).map(|_| gamma_unit(rng, cfg.m) * cfg.omega / cfg.m).sum();
    cfg.power * link.path_gain() / cfg.noise_var * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{FsoConfig, ThzConfig};
    use crate::montecarlo::RngStream;
    use crate::quad;
    use statrs::distribution::{ContinuousCDF, Gamma as GammaDist};

    fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn gamma_gamma_unit_mean_and_shape() {
        let mut rng = RngStream::new(1, 0).rng();
        let n = 200_000;
        let (a, b) = (4.343, 2.492);
        let xs: Vec<f64> = (0..n).map(|_| sample_gamma_gamma(&mut rng, a, b)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = 1.0 / a + 1.0 / b + 1.0 / (a * b);
        assert!((mean - 1.0).abs() < 3.0 * (var / n as f64).sqrt(), "{mean}");
        let sub: Vec<f64> = xs[..4000].to_vec();
        let cdf =
            |x: f64| quad::gauss_kronrod(|t| crate::channels::gamma_gamma_pdf(a, b, t), 0.0, x, 1e-10, 1e-14).value;
        let d = ks_distance(sub, cdf);
        assert!(d < 1.63 / (4000f64).sqrt(), "KS {d}");
        let tight: Vec<f64> = (0..10_000).map(|_| sample_gamma_gamma(&mut rng, 1e6, 1e6)).collect();
        assert!(tight.iter().all(|x| (x - 1.0).abs() < 0.01));
    }

    #[test]
    fn pointing_follows_power_law() {
        let g = PointingGeometry::new(0.2, 0.4, 0.05).unwrap();
        let mut rng = RngStream::new(2, 0).rng();
        let xs: Vec<f64> = (0..5000).map(|_| sample_pointing(&mut rng, &g, false)).collect();
        let d = ks_distance(xs, |h| g.cdf(h));
        assert!(d < 1.63 / (5000f64).sqrt(), "KS {d}");
        let still = PointingGeometry::new(0.2, 0.4, 1e-12).unwrap();
        assert!((sample_pointing(&mut rng, &still, false) - still.a0()).abs() < 1e-15);
    }

    #[test]
    fn alpha_mu_moments_and_gamma_sum() {
        let mut rng = RngStream::new(3, 0).rng();
        let n = 100_000;
        let (alpha, mu, omega) = (2.7, 1.4, 1.3);
        let m: f64 = (0..n)
            .map(|_| sample_alpha_mu(&mut rng, alpha, mu, omega).powf(alpha))
            .sum::<f64>()
            / n as f64;
        let target = omega.powf(alpha);
        // X^α = Ω^α G/μ has variance Ω^{2α}/μ
        assert!(
            (m - target).abs() < 3.0 * target / (mu * n as f64).sqrt(),
            "{m} vs {target}"
        );
        let xs: Vec<f64> = (0..5000)
            .map(|_| {
                (0..2)
                    .map(|_| sample_alpha_mu(&mut rng, 2.0, 3.0, 1.0).powi(2))
                    .sum::<f64>()
            })
            .collect();
        let g6 = GammaDist::new(6.0, 3.0).unwrap();
        let d = ks_distance(xs, |x| g6.cdf(x));
        assert!(d < 1.63 / (5000f64).sqrt(), "KS {d}");
    }

    #[test]
    fn thz_sum_modes_agree_at_alpha_two() {
        let link = ThzLinkParams::new(ThzConfig::default()).unwrap();
        let mut r1 = RngStream::new(4, 0).rng();
        let mut r2 = RngStream::new(4, 1).rng();
        let a: Vec<f64> = (0..5000)
            .map(|_| sample_thz_snr(&mut r1, &link, ThzSumMode::ExactSum))
            .collect();
        let d = ks_distance(a, |g| link.cdf(g).unwrap());
        assert!(d < 1.63 / (5000f64).sqrt(), "exact KS {d}");
        let b: Vec<f64> = (0..5000)
            .map(|_| sample_thz_snr(&mut r2, &link, ThzSumMode::AlphaMuApprox))
            .collect();
        let d = ks_distance(b, |g| link.cdf(g).unwrap());
        assert!(d < 1.63 / (5000f64).sqrt(), "approx KS {d}");
    }

    #[test]
    fn fso_snr_matches_cdf() {
        let link = FsoLinkParams::new(FsoConfig {
            power: 7.0,
            ..Default::default()
        })
        .unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        let sample: Vec<f64> = (0..4000).map(|_| sample_fso_snr(&mut rng, &link, false)).collect();
        let d = ks_distance(sample, |g| link.cdf(g).unwrap());
        assert!(d < 1.63 / (4000f64).sqrt(), "KS {d}");
    }
}
