//! High-SNR outage: each link CDF is replaced by its leading power-law terms.
//!
//! For the MRC sum, a term a γ^p of F_F against b γ^q of F_T contributes
//! a b Γ(p+1)Γ(q+1)/Γ(p+q+1) at γ_th.

use super::hop::{HopConfig, Mode};
use super::topology::Backhaul;
use super::{union_of_independent, Method, OutageEstimate};
use crate::channels::{FsoLinkParams, ThzLinkParams};
use crate::error::Result;
use crate::specfun::ln_gamma;

fn fso_terms(fso: Option<&FsoLinkParams>, th: f64) -> Result<Vec<(f64, f64)>> {
    match fso {
        Some(f) => f.cdf_asymptotic_terms(th),
        None => Ok(vec![(1.0, 0.0)]),
    }
}

fn thz_terms(thz: Option<&ThzLinkParams>, th: f64) -> Result<Vec<(f64, f64)>> {
    match thz {
        Some(t) => Ok(t.cdf_asymptotic_terms(th)?.to_vec()),
        None => Ok(vec![(1.0, 0.0)]),
    }
}

fn total(terms: &[(f64, f64)]) -> f64 {
    terms.iter().map(|t| t.0).sum()
}

fn combining(fso: Option<&FsoLinkParams>, thz: Option<&ThzLinkParams>, th: f64) -> Result<f64> {
    let (ff, ft) = (fso_terms(fso, th)?, thz_terms(thz, th)?);
    if fso.is_none() || thz.is_none() {
        return Ok(total(&ff) * total(&ft));
    }
    let mut sum = 0.0;
    for &(a, p) in &ff {
        for &(b, q) in &ft {
            let ln_w = ln_gamma(p + 1.0)? + ln_gamma(q + 1.0)? - ln_gamma(p + q + 1.0)?;
            sum += a * b * ln_w.exp();
        }
    }
    Ok(sum)
}

pub fn asymptotic_hop_outage(hop: &HopConfig) -> Result<OutageEstimate> {
    let (fso, thz) = (hop.fso.as_ref(), hop.thz.as_ref());
    let v = match hop.mode {
        Mode::Switching => total(&fso_terms(fso, hop.threshold)?) * total(&thz_terms(thz, hop.threshold)?),
        Mode::Combining => combining(fso, thz, hop.threshold)?,
    };
    Ok(asym(v))
}

fn asym(v: f64) -> OutageEstimate {
    OutageEstimate {
        value: v.max(0.0),
        method: Method::Asymptotic,
        ci_halfwidth: 0.0,
        wide_ci: false,
    }
}

/// The exact composition rules applied to asymptotic link terms. Values are
/// not clamped to 1, so the low-SNR end shows where the expansion breaks.
pub fn asymptotic_backhaul_outage(backhaul: &Backhaul) -> Result<OutageEstimate> {
    backhaul.validate()?;
    match backhaul {
        Backhaul::System1 { hops } => {
            let ps = hops
                .iter()
                .map(|h| asymptotic_hop_outage(h).map(|e| e.value.min(1.0)))
                .collect::<Result<Vec<_>>>()?;
            Ok(asym(union_of_independent(ps)))
        }
        Backhaul::System2 {
            fso,
            thz,
            thresholds,
            mode,
        } => {
            let n = thz.len();
            let th = thresholds[n - 1];
            let f_f = total(&fso_terms(fso.as_ref(), th)?);
            let f_t = thz
                .iter()
                .zip(thresholds)
                .map(|(t, &g)| Ok(total(&thz_terms(Some(t), g)?).min(1.0)))
                .collect::<Result<Vec<_>>>()?;
            let v = match mode {
                Mode::Switching => f_f * union_of_independent(f_t),
                Mode::Combining => {
                    let early = union_of_independent(f_t[..n - 1].iter().copied());
                    f_f * early + (1.0 - early) * combining(fso.as_ref(), Some(&thz[n - 1]), th)?
                }
            };
            Ok(asym(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{db_to_linear, FsoConfig, ThzConfig};
    use crate::network::{hop_outage, CombiningBackend};

    fn hop(power_db: f64, mode: Mode) -> HopConfig {
        let p = db_to_linear(power_db);
        HopConfig::new(
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
            mode,
            db_to_linear(1.0),
        )
        .unwrap()
    }

    #[test]
    fn ratio_to_exact_tends_to_one() {
        for mode in [Mode::Switching, Mode::Combining] {
            let mut last = f64::INFINITY;
            for &db in &[30.0, 35.0, 40.0, 50.0] {
                let h = hop(db, mode);
                let exact = hop_outage(&h, CombiningBackend::Series).unwrap().value;
                let r = asymptotic_hop_outage(&h).unwrap().value / exact;
                let err = (r - 1.0).abs();
                assert!(err < last, "{mode:?} {db} dB: ratio {r}");
                if exact <= 1e-4 {
                    assert!((0.5..=2.0).contains(&r), "{mode:?} {db} dB: ratio {r}");
                }
                if db >= 40.0 {
                    assert!(err < 0.1, "{mode:?} {db} dB: ratio {r}");
                }
                last = err;
            }
        }
    }

    #[test]
    fn power_law_in_the_snr_scale() {
        // scaling every average SNR by 10 is the same as dividing γ_th by 10
        for mode in [Mode::Switching, Mode::Combining] {
            let h = hop(40.0, mode);
            let lo = HopConfig {
                threshold: h.threshold / 10.0,
                ..h.clone()
            };
            let a = asymptotic_hop_outage(&h).unwrap().value;
            let b = asymptotic_hop_outage(&lo).unwrap().value;
            let slope = (b / a).log10();
            assert!(
                (slope + h.diversity()).abs() < 0.01,
                "{mode:?}: {slope} vs {}",
                h.diversity()
            );
        }
    }
}
