//! Scenario at one sweep point → core link objects → outage per engine.

use crate::scenario::{self, Engine, Links, Scenario, SweepVariable, System, ThzSum, UeBlock};
use backhaul_core::channels::{
    db_to_linear, AbsorptionModel, AccessConfig, AccessLinkParams, Detection, FsoConfig, FsoLinkParams, KruseSign,
    ThzConfig, ThzLinkParams,
};
use backhaul_core::montecarlo::{self, backhaul_fails, sample_access_snr, SampleSpec, ThzSumMode};
use backhaul_core::network::{
    asymptotic_backhaul_outage, backhaul_outage, iab_threshold, iab_thresholds, AccessHop, Backhaul, CombiningBackend,
    HopConfig, Method, Mode, OutageEstimate,
};
use backhaul_core::{Error, Result};
use rand_chacha::ChaCha8Rng;

/// Fractional part of the golden ratio in 64 bits; spreads derived seeds.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn derive_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(GOLDEN.wrapping_mul(index as u64 + 1))
}

/// A serving path: backhaul chain (absent when the donor serves directly)
/// followed by an optional access link, in series.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub backhaul: Option<Backhaul>,
    pub access: Option<AccessHop>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Single,
    /// this many independent copies of the one route, all must fail
    Mesh(u32),
    /// mean over the routes, one per serving node
    Average,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub routes: Vec<Route>,
    pub combine: Combine,
    pub spec: SampleSpec,
}

/// The scenario with one sweep value substituted.
pub fn at_point(s: &Scenario, value: f64) -> Scenario {
    let mut s = s.clone();
    let Some(var) = s.sweep.as_ref().map(|w| w.variable) else {
        return s;
    };
    match var {
        SweepVariable::PowerDb => s.topology.power_db = value,
        SweepVariable::ThresholdDb => s.topology.threshold_db = value,
        SweepVariable::JitterStd => {
            s.fso.jitter_std_m = value;
            s.thz.jitter_std_m = value;
        }
        // validation has checked these are positive integers
        SweepVariable::NHops => s.topology.hops = value.round() as u32,
        SweepVariable::NRoutes => s.topology.routes = value.round() as u32,
        SweepVariable::UePosition => {
            if let Some(ue) = s.topology.ue.as_mut() {
                ue.position_m = value;
            }
        }
    }
    s
}

struct Links3<'a> {
    s: &'a Scenario,
    absorption: &'a AbsorptionModel,
    power: f64,
}

impl Links3<'_> {
    fn fso(&self, length: f64) -> Result<FsoLinkParams> {
        let f = &self.s.fso;
        FsoLinkParams::new(FsoConfig {
            wavelength: f.wavelength_nm * 1e-9,
            length,
            cn2: f.cn2,
            visibility_km: f.visibility_km,
            detection: match f.detection {
                scenario::Detection::ImDd => Detection::IntensityModulation,
                scenario::Detection::Heterodyne => Detection::Heterodyne,
            },
            eta: f.eta,
            power: self.power,
            noise_var: 1.0,
            aperture_radius: f.aperture_radius_m,
            beamwidth: f.beamwidth_m,
            jitter_std: f.jitter_std_m,
            boresight: (f.boresight_m[0], f.boresight_m[1]),
            kruse_sign: match f.kruse_sign {
                scenario::KruseSign::Physical => KruseSign::Physical,
                scenario::KruseSign::Literal => KruseSign::Literal,
            },
        })
    }

    fn thz(&self, length: f64) -> Result<ThzLinkParams> {
        let t = &self.s.thz;
        ThzLinkParams::new(ThzConfig {
            frequency: t.frequency_ghz * 1e9,
            length,
            gt_dbi: t.gt_dbi,
            gr_dbi: t.gr_dbi,
            alpha: t.alpha,
            mu: t.mu,
            nr: t.nr,
            omega: t.omega,
            absorption: self.absorption.clone(),
            aperture_radius: t.aperture_radius_m,
            beamwidth: t.beamwidth_m,
            jitter_std: t.jitter_std_m,
            power: self.power,
            noise_var: 1.0,
        })
    }

    fn access(&self, length: f64, threshold: f64) -> Result<AccessHop> {
        let a = &self.s.access;
        let link = AccessLinkParams::new(AccessConfig {
            m: a.m,
            nt: a.nt,
            omega: a.omega,
            frequency: a.frequency_ghz * 1e9,
            length,
            gt_dbi: a.gt_dbi,
            gr_dbi: a.gr_dbi,
            rho_ox: a.rho_ox_db_per_km,
            rho_rain: a.rho_rain_db_per_km,
            power: self.power,
            noise_var: 1.0,
        })?;
        Ok(AccessHop { link, threshold })
    }

    fn mode(&self) -> Mode {
        match self.s.topology.mode {
            scenario::Mode::Switching => Mode::Switching,
            scenario::Mode::Combining => Mode::Combining,
        }
    }

    /// Chain of `thresholds.len()` hops of `hop_length` each.
    fn chain(&self, system: System, links: Links, hop_length: f64, thresholds: &[f64]) -> Result<Backhaul> {
        let n = thresholds.len();
        let mode = self.mode();
        match (system, links) {
            (System::S1, _) => {
                let hops = thresholds
                    .iter()
                    .map(|&th| {
                        let fso = (links != Links::Thz).then(|| self.fso(hop_length)).transpose()?;
                        let thz = (links != Links::Fso).then(|| self.thz(hop_length)).transpose()?;
                        HopConfig::new(fso, thz, mode, th)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Backhaul::System1 { hops })
            }
            // without THz relays only the end-to-end FSO link remains
            (System::S2, Links::Fso) => Ok(Backhaul::System1 {
                hops: vec![HopConfig::new(
                    Some(self.fso(hop_length * n as f64)?),
                    None,
                    mode,
                    thresholds[n - 1],
                )?],
            }),
            (System::S2, _) => Ok(Backhaul::System2 {
                fso: (links == Links::Hybrid)
                    .then(|| self.fso(hop_length * n as f64))
                    .transpose()?,
                thz: (0..n).map(|_| self.thz(hop_length)).collect::<Result<Vec<_>>>()?,
                thresholds: thresholds.to_vec(),
                mode,
            }),
        }
    }
}

fn invalid(field: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        detail: detail.into(),
    }
}

/// Builds the evaluation for a scenario whose sweep value is already
/// substituted (see [`at_point`]).
pub fn build(s: &Scenario, absorption: &AbsorptionModel) -> Result<Evaluation> {
    let t = &s.topology;
    let b = Links3 {
        s,
        absorption,
        power: db_to_linear(t.power_db),
    };
    if t.hops == 0 {
        return Err(invalid("topology.hops", "at least one hop is required"));
    }
    let n = t.hops as usize;
    let iab = t.iab.clone();
    let hop_thresholds = |count: usize| match &iab {
        Some(i) => iab_thresholds(&vec![i.ues_per_node; count], i.rate_bps_hz),
        None => vec![db_to_linear(t.threshold_db); count],
    };
    let access_threshold = match (t.access_threshold_db, &iab) {
        (Some(db), _) => db_to_linear(db),
        (None, Some(i)) => iab_threshold(1, i.rate_bps_hz),
        (None, None) => db_to_linear(t.threshold_db),
    };
    let spec = SampleSpec {
        n_samples: s.mc.samples,
        confidence: s.mc.confidence,
        thz_sum: match s.mc.thz_sum {
            ThzSum::Exact => ThzSumMode::ExactSum,
            ThzSum::AlphaMu => ThzSumMode::AlphaMuApprox,
        },
        boresight: s.fso.boresight_m != [0.0, 0.0],
    };

    if let Some(ue) = &t.ue {
        let rate = iab.as_ref().map_or(0.1, |i| i.rate_bps_hz);
        let ues = iab.as_ref().map_or(10, |i| i.ues_per_node);
        let route = ue_route(&b, ue, ues, rate, access_threshold)?;
        return Ok(Evaluation {
            routes: vec![route],
            combine: Combine::Single,
            spec,
        });
    }

    let backhaul = b.chain(t.system, t.links, t.hop_length_m, &hop_thresholds(n))?;
    let access = if t.access {
        Some(b.access(s.access.length_m, access_threshold)?)
    } else {
        None
    };
    let swept_routes = s.sweep.as_ref().is_some_and(|w| w.variable == SweepVariable::NRoutes);
    if t.routes > 1 || swept_routes {
        return Ok(Evaluation {
            routes: vec![Route {
                backhaul: Some(backhaul),
                access,
            }],
            combine: Combine::Mesh(t.routes),
            spec,
        });
    }
    match &iab {
        Some(i) if i.average => {
            let access = access.ok_or_else(|| invalid("topology.access", "IAB averaging needs an access link"))?;
            let mut routes = Vec::with_capacity(n + 1);
            if i.donor_serves {
                routes.push(Route {
                    backhaul: None,
                    access: Some(access.clone()),
                });
            }
            for k in 1..=n {
                routes.push(Route {
                    backhaul: Some(backhaul.prefix(k)),
                    access: Some(access.clone()),
                });
            }
            Ok(Evaluation {
                routes,
                combine: Combine::Average,
                spec,
            })
        }
        _ => Ok(Evaluation {
            routes: vec![Route {
                backhaul: Some(backhaul),
                access,
            }],
            combine: Combine::Single,
            spec,
        }),
    }
}

/// Donor at x = 0, middle node at `spacing`, final node at 2·`spacing`.
/// Deployments 1 to 4 serve from a fixed node. Deployments 5 to 7 serve from
/// the deployed node with the lowest closed-form outage at the UE position,
/// so every engine evaluates the same route; ties go to the node nearer the
/// donor.
fn ue_route(b: &Links3, ue: &UeBlock, ues: u32, rate: f64, access_threshold: f64) -> Result<Route> {
    let s = ue.spacing_m;
    let one = |len: f64, links: Links| b.chain(System::S1, links, len, &iab_thresholds(&[ues], rate));
    let pair = |system: System| b.chain(system, Links::Hybrid, s, &iab_thresholds(&[ues, ues], rate));
    let candidates: Vec<(f64, Option<Backhaul>)> = match ue.scenario {
        1 => vec![(0.0, None)],
        2 => vec![(s, Some(one(s, Links::Hybrid)?))],
        3 => vec![(s, Some(one(s, Links::Thz)?))],
        4 => vec![(2.0 * s, Some(one(2.0 * s, Links::Hybrid)?))],
        5 | 6 => {
            let c = pair(if ue.scenario == 5 { System::S1 } else { System::S2 })?;
            vec![(0.0, None), (s, Some(c.prefix(1))), (2.0 * s, Some(c))]
        }
        7 => vec![(0.0, None), (2.0 * s, Some(one(2.0 * s, Links::Hybrid)?))],
        other => return Err(invalid("topology.ue.scenario", format!("must be 1 to 7, got {other}"))),
    };
    let mut best: Option<(f64, Route)> = None;
    let mut last_err = None;
    for (node_x, backhaul) in candidates {
        let distance = (node_x - ue.position_m).hypot(ue.node_height_m);
        let route = Route {
            backhaul,
            access: Some(b.access(distance, access_threshold)?),
        };
        match route.closed() {
            Ok(p) if best.as_ref().is_none_or(|(q, _)| p < *q) => best = Some((p, route)),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    match (best, last_err) {
        (Some((_, route)), _) => Ok(route),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("every deployment has a node"),
    }
}

fn series(bh: f64, acc: f64) -> f64 {
    bh + acc - bh * acc
}

impl Route {
    fn closed(&self) -> Result<f64> {
        let bh = match &self.backhaul {
            Some(b) => backhaul_outage(b, CombiningBackend::Series)?.value,
            None => 0.0,
        };
        let acc = self.access.as_ref().map_or(Ok(0.0), |a| a.cdf())?;
        Ok(series(bh, acc).clamp(0.0, 1.0))
    }

    /// Leading-order terms composed exactly; not clamped, so the low-SNR
    /// end shows where the expansion stops applying.
    fn asymptotic(&self) -> Result<f64> {
        let bh = match &self.backhaul {
            Some(b) => asymptotic_backhaul_outage(b)?.value,
            None => 0.0,
        };
        let acc = self
            .access
            .as_ref()
            .map_or(Ok(0.0), |a| a.link.cdf_asymptotic(a.threshold))?;
        Ok(series(bh, acc))
    }

    fn check(&self) -> Result<()> {
        self.backhaul.as_ref().map_or(Ok(()), Backhaul::validate)
    }

    fn fails(&self, rng: &mut ChaCha8Rng, spec: &SampleSpec) -> bool {
        let bh = self.backhaul.as_ref().is_some_and(|b| backhaul_fails(rng, b, spec));
        let acc = self
            .access
            .as_ref()
            .is_some_and(|a| sample_access_snr(rng, &a.link) < a.threshold);
        bh | acc
    }
}

impl Evaluation {
    pub fn run(&self, engine: Engine, seed: u64) -> Result<OutageEstimate> {
        match engine {
            Engine::Closed => self.analytic(Route::closed, Method::Closed),
            Engine::Asymptotic => self.analytic(Route::asymptotic, Method::Asymptotic),
            Engine::Mc => self.simulate(seed),
        }
    }

    fn analytic(&self, f: fn(&Route) -> Result<f64>, method: Method) -> Result<OutageEstimate> {
        let per_route = self.routes.iter().map(f).collect::<Result<Vec<_>>>()?;
        let value = match self.combine {
            Combine::Single => per_route[0],
            Combine::Mesh(q) => per_route[0].powi(q as i32),
            Combine::Average => per_route.iter().sum::<f64>() / per_route.len() as f64,
        };
        Ok(OutageEstimate {
            value,
            method,
            ci_halfwidth: 0.0,
            wide_ci: false,
        })
    }

    fn simulate(&self, seed: u64) -> Result<OutageEstimate> {
        for r in &self.routes {
            r.check()?;
        }
        let spec = &self.spec;
        match self.combine {
            Combine::Single => montecarlo::estimate(seed, spec, |rng| self.routes[0].fails(rng, spec)),
            Combine::Mesh(q) => {
                let r = &self.routes[0];
                montecarlo::estimate(seed, spec, |rng| (0..q).fold(true, |all, _| r.fails(rng, spec) & all))
            }
            Combine::Average => {
                let per_node = self
                    .routes
                    .iter()
                    .enumerate()
                    .map(|(k, r)| montecarlo::estimate(derive_seed(seed, k), spec, |rng| r.fails(rng, spec)))
                    .collect::<Result<Vec<_>>>()?;
                let n = per_node.len() as f64;
                Ok(OutageEstimate {
                    value: per_node.iter().map(|e| e.value).sum::<f64>() / n,
                    method: Method::MonteCarlo,
                    // independent node estimates
                    ci_halfwidth: per_node.iter().map(|e| e.ci_halfwidth.powi(2)).sum::<f64>().sqrt() / n,
                    wide_ci: per_node.iter().any(|e| e.wide_ci),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{IabBlock, SweepBlock};
    use backhaul_core::network::{e2e_outage_of, iab_node_outages, Topology};

    fn base() -> Scenario {
        let mut s = Scenario::parse("schema_version = 1").unwrap();
        s.sweep = Some(SweepBlock {
            variable: SweepVariable::PowerDb,
            start: 20.0,
            stop: 30.0,
            points: 2,
        });
        s
    }

    fn direct() -> AbsorptionModel {
        AbsorptionModel::Direct { k_abs: 5e-4 }
    }

    fn closed(s: &Scenario) -> f64 {
        build(s, &direct()).unwrap().run(Engine::Closed, 0).unwrap().value
    }

    #[test]
    fn sweep_substitution() {
        let s = base();
        assert_eq!(at_point(&s, 25.0).topology.power_db, 25.0);
        let mut j = s.clone();
        j.sweep.as_mut().unwrap().variable = SweepVariable::JitterStd;
        let p = at_point(&j, 0.3);
        assert_eq!((p.fso.jitter_std_m, p.thz.jitter_std_m), (0.3, 0.3));
    }

    #[test]
    fn e2e_matches_core_composition() {
        let mut s = base();
        s.topology.hops = 2;
        s.topology.access = true;
        let e = build(&s, &direct()).unwrap();
        let r = &e.routes[0];
        let t = Topology {
            backhaul: r.backhaul.clone().unwrap(),
            access: r.access.clone(),
        };
        let want = e2e_outage_of(&t, CombiningBackend::Series).unwrap().value;
        assert!((closed(&s) - want).abs() <= 1e-15 * want);
    }

    #[test]
    fn mesh_is_power_of_single_route() {
        let mut s = base();
        s.topology.access = true;
        let p1 = closed(&s);
        s.topology.routes = 3;
        assert!((closed(&s) - p1.powi(3)).abs() <= 1e-12 * p1.powi(3));
    }

    #[test]
    fn iab_average_matches_node_outages() {
        let mut s = base();
        s.topology.hops = 2;
        s.topology.access = true;
        s.topology.iab = Some(IabBlock {
            average: true,
            donor_serves: true,
            ..Default::default()
        });
        let e = build(&s, &direct()).unwrap();
        let last = e.routes.last().unwrap();
        let t = Topology {
            backhaul: last.backhaul.clone().unwrap(),
            access: last.access.clone(),
        };
        let nodes = iab_node_outages(&t, true, CombiningBackend::Series).unwrap();
        let want = nodes.iter().sum::<f64>() / 3.0;
        assert!((closed(&s) - want).abs() <= 1e-12 * want);
        // 20 UEs on the first hop, 10 on the second
        match t.backhaul {
            Backhaul::System1 { hops } => assert_eq!((hops[0].threshold, hops[1].threshold), (3.0, 1.0)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn ue_association() {
        let mut s = base();
        s.topology.ue = Some(UeBlock::default());
        let serving = |scenario: u32, x: f64| {
            let mut s = s.clone();
            let ue = s.topology.ue.as_mut().unwrap();
            ue.scenario = scenario;
            ue.position_m = x;
            let e = build(&s, &direct()).unwrap();
            let r = e.routes.into_iter().next().unwrap();
            (r.backhaul.map(|b| b.n_hops()), r.access.unwrap().link.config().length)
        };
        assert_eq!(serving(1, 0.0), (None, 30.0));
        assert_eq!(serving(2, 0.0), (Some(1), 200f64.hypot(30.0)));
        assert_eq!(serving(4, 0.0), (Some(1), 400f64.hypot(30.0)));
        assert_eq!(serving(5, 0.0), (None, 30.0));
        assert_eq!(serving(5, 400.0), (Some(2), 30.0));
        assert_eq!(serving(7, 400.0), (Some(1), 30.0));
    }

    #[test]
    fn ue_takes_the_best_serving_node() {
        let mut s = base();
        s.topology.power_db = 20.0;
        let at = |s: &mut Scenario, scenario: u32, x: f64| {
            s.topology.ue = Some(UeBlock {
                scenario,
                position_m: x,
                ..Default::default()
            });
            closed(s)
        };
        for x in [0.0, 120.0, 200.0, 280.0, 400.0] {
            // the donor's direct link is a candidate in 5 to 7
            let donor = at(&mut s, 1, x);
            let final_only = at(&mut s, 4, x);
            for scenario in 5..=7 {
                assert!(at(&mut s, scenario, x) <= donor, "scenario {scenario} at {x}");
            }
            assert!(at(&mut s, 7, x) <= final_only, "scenario 7 at {x}");
        }
    }

    #[test]
    fn s2_without_thz_is_one_long_fso_link() {
        let mut s = base();
        s.topology.system = System::S2;
        s.topology.hops = 3;
        s.topology.links = Links::Fso;
        match &build(&s, &direct()).unwrap().routes[0].backhaul {
            Some(Backhaul::System1 { hops }) => {
                assert_eq!(hops.len(), 1);
                assert_eq!(hops[0].fso.as_ref().unwrap().config().length, 600.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mc_agrees_with_closed_form() {
        let mut s = base();
        s.topology.power_db = 20.0;
        s.topology.access = true;
        s.mc.samples = 400_000;
        let e = build(&s, &direct()).unwrap();
        let c = e.run(Engine::Closed, 0).unwrap().value;
        let m = e.run(Engine::Mc, 9).unwrap();
        let se = montecarlo::binomial_se(c, s.mc.samples);
        assert!((m.value - c).abs() <= 4.0 * se, "{} vs {c}", m.value);
    }
}
