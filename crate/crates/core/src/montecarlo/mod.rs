//! Sampling oracle for every outage quantity in `network`.
//!
//! Samples are drawn in fixed blocks; block b of a run with seed s uses the
//! ChaCha8 stream (s, b), so estimates depend only on the seed and sample
//! count, never on the number of worker threads.

mod sample;

pub use sample::{
    sample_access_snr, sample_alpha_mu, sample_fso_snr, sample_gamma_gamma, sample_pointing, sample_thz_snr, ThzSumMode,
};

use crate::channels::{FsoLinkParams, ThzLinkParams};
use crate::error::{Error, Result};
use crate::network::{AccessHop, Backhaul, HopConfig, Method, Mode, OutageEstimate, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

pub const BLOCK_SIZE: u64 = 1 << 16;
pub const MIN_SAMPLES: u64 = 1_000;
pub const MAX_SAMPLES: u64 = 1_000_000_000;
/// Fewer failures than this and the interval is flagged as wide.
pub const MIN_EVENTS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub n_samples: u64,
    pub confidence: f64,
    pub thz_sum: ThzSumMode,
    pub boresight: bool,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            n_samples: 10_000_000,
            confidence: 0.95,
            thz_sum: ThzSumMode::ExactSum,
            boresight: false,
        }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_SAMPLES..=MAX_SAMPLES).contains(&self.n_samples) {
            return Err(Error::InvalidParameter {
                field: "mc.samples",
                detail: format!("must lie in [{MIN_SAMPLES}, {MAX_SAMPLES}], got {}", self.n_samples),
            });
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidParameter {
                field: "mc.confidence",
                detail: format!("must lie in (0, 1), got {}", self.confidence),
            });
        }
        Ok(())
    }
}

/// Failure count over a number of trials; merging is integer addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub failures: u64,
    pub trials: u64,
}

impl Counts {
    pub fn merge(self, other: Counts) -> Counts {
        Counts {
            failures: self.failures + other.failures,
            trials: self.trials + other.trials,
        }
    }
}

/// Wilson score interval as (centre, half-width).
pub fn wilson_interval(c: Counts, confidence: f64) -> (f64, f64) {
    let n = c.trials as f64;
    let p = c.failures as f64 / n;
    let z = Normal::standard().inverse_cdf(0.5 + 0.5 * confidence);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (centre, half)
}

/// Counts failures of `event` over `n` samples, split into fixed blocks that
/// run in parallel.
pub fn count_failures<F>(seed: u64, n: u64, event: F) -> Counts
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let blocks = n.div_ceil(BLOCK_SIZE);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(seed, b).rng();
            let len = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
            let failures = (0..len).filter(|_| event(&mut rng)).count() as u64;
            Counts { failures, trials: len }
        })
        .reduce(Counts::default, Counts::merge)
}

/// The point estimate is the empirical fraction; the half-width is the
/// larger distance to either Wilson bound.
pub fn estimate<F>(seed: u64, spec: &SampleSpec, event: F) -> Result<OutageEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    spec.validate()?;
    let c = count_failures(seed, spec.n_samples, event);
    Ok(to_estimate(c, spec.confidence))
}

pub fn to_estimate(c: Counts, confidence: f64) -> OutageEstimate {
    let p = c.failures as f64 / c.trials as f64;
    let (centre, half) = wilson_interval(c, confidence);
    let lo = (centre - half).max(0.0);
    let hi = (centre + half).min(1.0);
    OutageEstimate {
        value: p,
        method: Method::MonteCarlo,
        ci_halfwidth: (p - lo).max(hi - p),
        wide_ci: c.failures < MIN_EVENTS,
    }
}

/// Binomial standard error √(p(1-p)/n) at probability p.
pub fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn fso_snr(rng: &mut ChaCha8Rng, fso: Option<&FsoLinkParams>, spec: &SampleSpec) -> f64 {
    fso.map_or(0.0, |f| sample_fso_snr(rng, f, spec.boresight))
}

fn thz_snr(rng: &mut ChaCha8Rng, thz: Option<&ThzLinkParams>, spec: &SampleSpec) -> f64 {
    thz.map_or(0.0, |t| sample_thz_snr(rng, t, spec.thz_sum))
}

/// One realization of a hybrid hop; true when in outage.
pub fn hop_fails(rng: &mut ChaCha8Rng, hop: &HopConfig, spec: &SampleSpec) -> bool {
    let gt = thz_snr(rng, hop.thz.as_ref(), spec);
    let gf = fso_snr(rng, hop.fso.as_ref(), spec);
    match hop.mode {
        Mode::Switching => gt < hop.threshold && gf < hop.threshold,
        Mode::Combining => gt < hop.threshold && gt + gf < hop.threshold,
    }
}

pub fn backhaul_fails(rng: &mut ChaCha8Rng, backhaul: &Backhaul, spec: &SampleSpec) -> bool {
    match backhaul {
        // every hop is drawn so the stream position never depends on outcomes
        Backhaul::System1 { hops } => hops.iter().fold(false, |acc, h| hop_fails(rng, h, spec) | acc),
        Backhaul::System2 {
            fso,
            thz,
            thresholds,
            mode,
        } => {
            let n = thz.len();
            let gt: Vec<f64> = thz.iter().map(|t| thz_snr(rng, Some(t), spec)).collect();
            let gf = fso_snr(rng, fso.as_ref(), spec);
            let th_n = thresholds[n - 1];
            let early = (0..n - 1).any(|i| gt[i] < thresholds[i]);
            match mode {
                Mode::Switching => (early || gt[n - 1] < th_n) && gf < th_n,
                Mode::Combining => {
                    if early {
                        gf < th_n
                    } else {
                        gt[n - 1] < th_n && gt[n - 1] + gf < th_n
                    }
                }
            }
        }
    }
}

fn access_fails(rng: &mut ChaCha8Rng, access: &AccessHop) -> bool {
    sample_access_snr(rng, &access.link) < access.threshold
}

pub fn topology_fails(rng: &mut ChaCha8Rng, t: &Topology, spec: &SampleSpec) -> bool {
    let bh = backhaul_fails(rng, &t.backhaul, spec);
    let acc = t.access.as_ref().is_some_and(|a| access_fails(rng, a));
    bh || acc
}

fn check_closed_form_free(t: &Topology, spec: &SampleSpec) -> Result<()> {
    t.backhaul.validate()?;
    spec.validate()
}

pub fn estimate_hop_outage(seed: u64, hop: &HopConfig, spec: &SampleSpec) -> Result<OutageEstimate> {
    estimate(seed, spec, |rng| hop_fails(rng, hop, spec))
}

pub fn estimate_outage(seed: u64, topology: &Topology, spec: &SampleSpec) -> Result<OutageEstimate> {
    check_closed_form_free(topology, spec)?;
    estimate(seed, spec, |rng| topology_fails(rng, topology, spec))
}

/// All routes fail together in one realization; routes are independent.
pub fn estimate_mesh_outage(seed: u64, routes: &[Topology], spec: &SampleSpec) -> Result<OutageEstimate> {
    for r in routes {
        check_closed_form_free(r, spec)?;
    }
    estimate(seed, spec, |rng| {
        routes.iter().fold(true, |all, r| topology_fails(rng, r, spec) & all)
    })
}

/// P[γ_F < γ]
pub fn estimate_fso_cdf(seed: u64, link: &FsoLinkParams, gamma: f64, spec: &SampleSpec) -> Result<OutageEstimate> {
    estimate(seed, spec, |rng| sample_fso_snr(rng, link, spec.boresight) < gamma)
}

/// P[γ_T < γ]
pub fn estimate_thz_cdf(seed: u64, link: &ThzLinkParams, gamma: f64, spec: &SampleSpec) -> Result<OutageEstimate> {
    estimate(seed, spec, |rng| sample_thz_snr(rng, link, spec.thz_sum) < gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{db_to_linear, AccessConfig, AccessLinkParams, FsoConfig, ThzConfig};

    fn small() -> SampleSpec {
        SampleSpec {
            n_samples: 300_000,
            ..Default::default()
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        use rand::Rng;
        let a: Vec<u64> = (0..4).map(|_| RngStream::new(9, 3).rng().random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = RngStream::new(9, 3).rng().random();
        let y: u64 = RngStream::new(9, 4).rng().random();
        assert_ne!(x, y);
    }

    #[test]
    fn partition_invariance() {
        let ev = |rng: &mut ChaCha8Rng| rand::Rng::random::<f64>(rng) < 0.3;
        let whole = count_failures(11, 5 * BLOCK_SIZE + 17, ev);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| count_failures(11, 5 * BLOCK_SIZE + 17, ev));
        assert_eq!(whole, serial);
        let manual = (0..6u64)
            .map(|b| {
                let mut rng = RngStream::new(11, b).rng();
                let len = BLOCK_SIZE.min(5 * BLOCK_SIZE + 17 - b * BLOCK_SIZE);
                Counts {
                    failures: (0..len).filter(|_| ev(&mut rng)).count() as u64,
                    trials: len,
                }
            })
            .fold(Counts::default(), Counts::merge);
        assert_eq!(whole, manual);
    }

    #[test]
    fn wilson_bounds() {
        let (c, h) = wilson_interval(
            Counts {
                failures: 0,
                trials: 1000,
            },
            0.95,
        );
        assert!(c - h <= 1e-15 && c + h > 0.0);
        let (c, h) = wilson_interval(
            Counts {
                failures: 500,
                trials: 1000,
            },
            0.95,
        );
        assert!((c - 0.5).abs() < 1e-15 && (h - 0.0309).abs() < 1e-3);
        let e = to_estimate(
            Counts {
                failures: 3,
                trials: 1000,
            },
            0.95,
        );
        assert!(e.wide_ci && e.lower() >= 0.0);
    }

    #[test]
    fn rejects_tiny_budgets() {
        let spec = SampleSpec {
            n_samples: 10,
            ..Default::default()
        };
        assert!(estimate(0, &spec, |_| true).is_err());
    }

    #[test]
    fn vanishing_threshold_never_fails() {
        let p = db_to_linear(20.0);
        let hop = HopConfig::new(
            Some(
                FsoLinkParams::new(FsoConfig {
                    power: p,
                    ..Default::default()
                })
                .unwrap(),
            ),
            Some(
                ThzLinkParams::new(ThzConfig {
                    power: p,
                    ..Default::default()
                })
                .unwrap(),
            ),
            Mode::Combining,
            1e-300,
        )
        .unwrap();
        assert_eq!(estimate_hop_outage(1, &hop, &small()).unwrap().value, 0.0);
    }

    #[test]
    fn single_fso_hop_matches_cdf() {
        let link = FsoLinkParams::new(FsoConfig {
            power: db_to_linear(10.0),
            ..Default::default()
        })
        .unwrap();
        let g = 1.0;
        let exact = link.cdf(g).unwrap();
        let hop = HopConfig::new(Some(link), None, Mode::Switching, g).unwrap();
        let e = estimate_hop_outage(2, &hop, &small()).unwrap();
        assert!(
            (e.value - exact).abs() < 3.0 * binomial_se(exact, small().n_samples),
            "{} vs {exact}",
            e.value
        );
    }

    #[test]
    fn access_link_matches_cdf() {
        let link = AccessLinkParams::new(AccessConfig::default()).unwrap();
        let th = 0.3 * link.gamma_bar();
        let exact = link.cdf(th).unwrap();
        let e = estimate(3, &small(), |rng| sample_access_snr(rng, &link) < th).unwrap();
        assert!(
            (e.value - exact).abs() < 3.0 * binomial_se(exact, small().n_samples),
            "{} vs {exact}",
            e.value
        );
    }
}
