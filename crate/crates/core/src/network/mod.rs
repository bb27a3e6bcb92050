//! Composition of per-link distributions into hop, multi-hop, end-to-end,
//! IAB-averaged and mesh outage probabilities.

mod asymptotic;
mod hop;
mod topology;

pub use asymptotic::{asymptotic_backhaul_outage, asymptotic_hop_outage};
pub use hop::{
    combining_quadrature, combining_series, hop_outage, hop_outage_combining, hop_outage_switching, CombiningBackend,
    HopConfig, Mode, SeriesOutcome, DEFAULT_SERIES_TERMS, SERIES_TOL,
};
pub use topology::{
    backhaul_diversity, backhaul_outage, e2e_outage_of, iab_node_outages, multihop_outage_s1, s2_outage,
    system_diversity, AccessHop, Backhaul, Topology,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Closed,
    /// closed-form request answered by direct numerical integration
    Quadrature,
    Asymptotic,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Quadrature => "quadrature",
            Method::Asymptotic => "asymptotic",
            Method::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub value: f64,
    pub method: Method,
    /// zero for analytic estimates
    pub ci_halfwidth: f64,
    /// sample budget too small for the observed event rate
    pub wide_ci: bool,
}

impl OutageEstimate {
    pub fn analytic(value: f64, method: Method) -> Self {
        OutageEstimate {
            value: value.clamp(0.0, 1.0),
            method,
            ci_halfwidth: 0.0,
            wide_ci: false,
        }
    }

    pub fn lower(&self) -> f64 {
        (self.value - self.ci_halfwidth).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.value + self.ci_halfwidth).min(1.0)
    }
}

/// P_BH + F_acc - P_BH F_acc
pub fn e2e_outage(backhaul: OutageEstimate, access_cdf: f64) -> OutageEstimate {
    let p = backhaul.value;
    OutageEstimate {
        value: (p + access_cdf - p * access_cdf).clamp(0.0, 1.0),
        ..backhaul
    }
}

/// 2^{L R} - 1
pub fn iab_threshold(ues: u32, rate: f64) -> f64 {
    (ues as f64 * rate * std::f64::consts::LN_2).exp_m1()
}

/// Threshold of every hop in a chain whose node n serves `ue_counts[n]` UEs;
/// hop n carries the UEs of node n and all nodes after it.
pub fn iab_thresholds(ue_counts: &[u32], rate: f64) -> Vec<f64> {
    let mut carried: Vec<u32> = ue_counts
        .iter()
        .rev()
        .scan(0u32, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    carried.reverse();
    carried.into_iter().map(|l| iab_threshold(l, rate)).collect()
}

pub fn iab_average(per_node: &[f64]) -> Option<f64> {
    if per_node.is_empty() {
        None
    } else {
        // running mean: exact for constant input
        Some(
            per_node
                .iter()
                .enumerate()
                .fold(0.0, |m, (i, &x)| m + (x - m) / (i + 1) as f64),
        )
    }
}

/// Π_q P_q over independent routes.
pub fn mesh_outage(routes: &[f64]) -> f64 {
    routes.iter().product()
}

/// 1 - Π(1 - p_n), accurate when every p_n is tiny.
pub(crate) fn union_of_independent(ps: impl IntoIterator<Item = f64>) -> f64 {
    let s: f64 = ps.into_iter().map(|p| (-p).ln_1p()).sum();
    -s.exp_m1()
}
