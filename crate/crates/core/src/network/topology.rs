//! Multi-hop backhaul chains and their end-to-end composition.
//!
//! System 1 puts a hybrid hop between every pair of adjacent nodes and
//! decodes at each node. System 2 chains THz hops only and runs a single FSO
//! link from the donor to the final node, where switching or combining
//! happens against the final THz hop.

use super::hop::{hop_outage, CombiningBackend, HopConfig, Mode};
use super::{e2e_outage, union_of_independent, Method, OutageEstimate};
use crate::channels::{AccessLinkParams, FsoLinkParams, ThzLinkParams};
use crate::error::{positive, Error, Result};

// built once per evaluation, never stored in bulk
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum Backhaul {
    System1 {
        hops: Vec<HopConfig>,
    },
    System2 {
        /// donor to final node; `None` leaves a THz-only cascade
        fso: Option<FsoLinkParams>,
        thz: Vec<ThzLinkParams>,
        thresholds: Vec<f64>,
        mode: Mode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccessHop {
    pub link: AccessLinkParams,
    pub threshold: f64,
}

impl AccessHop {
    pub fn cdf(&self) -> Result<f64> {
        self.link.cdf(self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub backhaul: Backhaul,
    pub access: Option<AccessHop>,
}

impl Backhaul {
    pub fn validate(&self) -> Result<()> {
        let bad = |detail: &str| {
            Err(Error::InvalidParameter {
                field: "topology.hops",
                detail: detail.into(),
            })
        };
        match self {
            Backhaul::System1 { hops } if hops.is_empty() => bad("at least one hop is required"),
            Backhaul::System2 { thz, thresholds, .. } => {
                if thz.is_empty() {
                    return bad("at least one hop is required");
                }
                if thz.len() != thresholds.len() {
                    return bad("one threshold per THz hop is required");
                }
                for &t in thresholds {
                    positive("topology.threshold", t)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn n_hops(&self) -> usize {
        match self {
            Backhaul::System1 { hops } => hops.len(),
            Backhaul::System2 { thz, .. } => thz.len(),
        }
    }

    /// The chain as seen by node `n` (1-based): its first n hops. In System 2
    /// the end-to-end FSO link only terminates at the final node.
    pub fn prefix(&self, n: usize) -> Backhaul {
        let n = n.clamp(1, self.n_hops());
        match self {
            Backhaul::System1 { hops } => Backhaul::System1 {
                hops: hops[..n].to_vec(),
            },
            Backhaul::System2 {
                fso,
                thz,
                thresholds,
                mode,
            } => Backhaul::System2 {
                fso: if n == thz.len() { fso.clone() } else { None },
                thz: thz[..n].to_vec(),
                thresholds: thresholds[..n].to_vec(),
                mode: *mode,
            },
        }
    }
}

/// 1 - Π(1 - P_n) over decode-and-forward hops.
pub fn multihop_outage_s1(hops: &[HopConfig], backend: CombiningBackend) -> Result<OutageEstimate> {
    let mut method = Method::Closed;
    let mut ps = Vec::with_capacity(hops.len());
    for h in hops {
        let e = hop_outage(h, backend)?;
        if e.method == Method::Quadrature {
            method = Method::Quadrature;
        }
        ps.push(e.value);
    }
    Ok(OutageEstimate::analytic(union_of_independent(ps), method))
}

/// Combining: F_F Σ_{n<N} F_{T,n} Π_{j<n}(1-F_{T,j}) + Π_{n<N}(1-F_{T,n}) F^{CO}_N.
/// Switching: F_F (1 - Π_{n≤N}(1-F_{T,n})).
/// The FSO link is tested against the final hop's threshold.
pub fn s2_outage(
    fso: Option<&FsoLinkParams>,
    thz: &[ThzLinkParams],
    thresholds: &[f64],
    mode: Mode,
    backend: CombiningBackend,
) -> Result<OutageEstimate> {
    let n = thz.len();
    let last_th = thresholds[n - 1];
    let f_f = fso.map_or(Ok(1.0), |f| f.cdf(last_th))?;
    let f_t = thz
        .iter()
        .zip(thresholds)
        .map(|(t, &th)| t.cdf(th))
        .collect::<Result<Vec<_>>>()?;
    match mode {
        Mode::Switching => Ok(OutageEstimate::analytic(
            f_f * union_of_independent(f_t),
            Method::Closed,
        )),
        Mode::Combining => {
            let early_fail = union_of_independent(f_t[..n - 1].iter().copied());
            let last = HopConfig {
                fso: fso.cloned(),
                thz: Some(thz[n - 1].clone()),
                mode: Mode::Combining,
                threshold: last_th,
            };
            let co = hop_outage(&last, backend)?;
            let value = f_f * early_fail + (1.0 - early_fail) * co.value;
            Ok(OutageEstimate::analytic(value, co.method))
        }
    }
}

pub fn backhaul_outage(backhaul: &Backhaul, backend: CombiningBackend) -> Result<OutageEstimate> {
    backhaul.validate()?;
    match backhaul {
        Backhaul::System1 { hops } => multihop_outage_s1(hops, backend),
        Backhaul::System2 {
            fso,
            thz,
            thresholds,
            mode,
        } => s2_outage(fso.as_ref(), thz, thresholds, *mode, backend),
    }
}

/// Backhaul outage combined with the access link when present.
pub fn e2e_outage_of(topology: &Topology, backend: CombiningBackend) -> Result<OutageEstimate> {
    let bh = backhaul_outage(&topology.backhaul, backend)?;
    match &topology.access {
        Some(a) => Ok(e2e_outage(bh, a.cdf()?)),
        None => Ok(bh),
    }
}

/// E2E outage seen at each node of an IAB chain, donor first when it serves
/// UEs over a direct access link.
pub fn iab_node_outages(topology: &Topology, donor_serves: bool, backend: CombiningBackend) -> Result<Vec<f64>> {
    let access = topology.access.as_ref().ok_or(Error::InvalidParameter {
        field: "topology.access",
        detail: "IAB evaluation needs an access link".into(),
    })?;
    let mut out = Vec::with_capacity(topology.backhaul.n_hops() + 1);
    if donor_serves {
        out.push(access.cdf()?);
    }
    for n in 1..=topology.backhaul.n_hops() {
        let bh = backhaul_outage(&topology.backhaul.prefix(n), backend)?;
        out.push(e2e_outage(bh, access.cdf()?).value);
    }
    Ok(out)
}

/// S1: worst hop's FSO + THz diversity. S2: end-to-end FSO diversity plus
/// the worst THz hop.
pub fn backhaul_diversity(backhaul: &Backhaul) -> f64 {
    match backhaul {
        Backhaul::System1 { hops } => hops.iter().map(HopConfig::diversity).fold(f64::INFINITY, f64::min),
        Backhaul::System2 { fso, thz, .. } => {
            fso.as_ref().map_or(0.0, |f| f.diversity())
                + thz.iter().map(ThzLinkParams::diversity).fold(f64::INFINITY, f64::min)
        }
    }
}

/// Diversity including the access link, which sits in series.
pub fn system_diversity(topology: &Topology) -> f64 {
    let bh = backhaul_diversity(&topology.backhaul);
    topology.access.as_ref().map_or(bh, |a| bh.min(a.link.diversity()))
}
