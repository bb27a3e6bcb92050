//! Every constraint violation in a parsed scenario, each anchored to the
//! line that set (or should set) the offending field.

use crate::model::{at_point, build};
use crate::scenario::{locate, Engine, Scenario, SweepVariable, SCHEMA_VERSION};
use backhaul_core::channels::{parse_absorption_table, AbsorptionModel, AbsorptionTable, Environment};
use backhaul_core::montecarlo::{MAX_SAMPLES, MIN_SAMPLES};
use std::fmt;
use std::path::Path;

/// Largest chain or route count a sweep may request.
pub const MAX_COUNT: u32 = 64;
pub const MAX_POINTS: u32 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based; `None` when neither the key nor its table appears
    pub line: Option<usize>,
    /// dotted path, e.g. `fso.jitter_std_m`
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

struct Checker<'a> {
    text: &'a str,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn report(&mut self, table: &str, key: &str, message: impl Into<String>) {
        let field = if table.is_empty() {
            key.to_string()
        } else {
            format!("{table}.{key}")
        };
        let diag = Diagnostic {
            line: locate(self.text, table, Some(key)),
            field,
            message: message.into(),
        };
        if !self.out.contains(&diag) {
            self.out.push(diag);
        }
    }

    fn positive(&mut self, table: &str, key: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.report(table, key, format!("must be positive and finite, got {v}"));
        }
    }

    fn non_negative(&mut self, table: &str, key: &str, v: f64) {
        if !(v >= 0.0 && v.is_finite()) {
            self.report(table, key, format!("must be non-negative and finite, got {v}"));
        }
    }

    fn finite(&mut self, table: &str, key: &str, v: f64) {
        if !v.is_finite() {
            self.report(table, key, format!("must be finite, got {v}"));
        }
    }

    fn count(&mut self, table: &str, key: &str, v: u32) {
        if !(1..=MAX_COUNT).contains(&v) {
            self.report(table, key, format!("must lie in [1, {MAX_COUNT}], got {v}"));
        }
    }
}

/// Resolves the absorption model; `base` is the directory the scenario's
/// relative paths start from.
pub fn load_absorption(s: &Scenario, base: &Path) -> Result<AbsorptionModel, String> {
    let Some(file) = &s.thz.absorption_file else {
        return Ok(AbsorptionModel::Direct {
            k_abs: s.thz.k_abs_per_m,
        });
    };
    let path = base.join(file);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let rows = parse_absorption_table(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(AbsorptionModel::Polynomial(AbsorptionTable {
        rows,
        environment: Environment {
            pressure_pa: s.thz.pressure_pa,
            temperature_k: s.thz.temperature_k,
            relative_humidity: s.thz.relative_humidity,
        },
    }))
}

pub fn validate(s: &Scenario, text: &str, base: &Path) -> Vec<Diagnostic> {
    let mut c = Checker { text, out: Vec::new() };
    if s.schema_version != SCHEMA_VERSION {
        c.report(
            "",
            "schema_version",
            format!("unsupported version {} (expected {SCHEMA_VERSION})", s.schema_version),
        );
    }
    if s.engines.is_empty() {
        c.report("", "engines", "at least one engine is required");
    }
    for (i, e) in s.engines.iter().enumerate() {
        if s.engines[..i].contains(e) {
            c.report("", "engines", format!("engine `{}` listed twice", e.as_str()));
        }
    }

    let f = &s.fso;
    c.positive("fso", "wavelength_nm", f.wavelength_nm);
    c.positive("fso", "cn2", f.cn2);
    c.positive("fso", "visibility_km", f.visibility_km);
    if !(f.eta > 0.0 && f.eta <= 1.0) {
        c.report("fso", "eta", format!("must lie in (0, 1], got {}", f.eta));
    }
    c.positive("fso", "aperture_radius_m", f.aperture_radius_m);
    c.positive("fso", "beamwidth_m", f.beamwidth_m);
    c.non_negative("fso", "jitter_std_m", f.jitter_std_m);
    c.finite("fso", "boresight_m", f.boresight_m[0]);
    c.finite("fso", "boresight_m", f.boresight_m[1]);
    if f.boresight_m != [0.0, 0.0] && s.engines.iter().any(|e| e.is_analytic()) {
        c.report("fso", "boresight_m", "boresight requires engine mc");
    }

    let t = &s.thz;
    c.positive("thz", "frequency_ghz", t.frequency_ghz);
    c.finite("thz", "gt_dbi", t.gt_dbi);
    c.finite("thz", "gr_dbi", t.gr_dbi);
    c.positive("thz", "alpha", t.alpha);
    c.positive("thz", "mu", t.mu);
    if t.nr == 0 {
        c.report("thz", "nr", "at least one receive antenna is required");
    }
    c.positive("thz", "omega", t.omega);
    c.non_negative("thz", "k_abs_per_m", t.k_abs_per_m);
    if let Some(a) = t.aperture_radius_m {
        c.positive("thz", "aperture_radius_m", a);
    }
    c.positive("thz", "beamwidth_m", t.beamwidth_m);
    c.non_negative("thz", "jitter_std_m", t.jitter_std_m);
    let absorption = load_absorption(s, base);
    if let Err(e) = &absorption {
        c.report("thz", "absorption_file", e.clone());
    }

    let a = &s.access;
    if !(a.m >= 0.5 && a.m.is_finite()) {
        c.report("access", "m", format!("must be at least 0.5, got {}", a.m));
    }
    if a.nt == 0 {
        c.report("access", "nt", "at least one transmit antenna is required");
    }
    c.positive("access", "omega", a.omega);
    c.positive("access", "frequency_ghz", a.frequency_ghz);
    c.positive("access", "length_m", a.length_m);
    c.finite("access", "gt_dbi", a.gt_dbi);
    c.finite("access", "gr_dbi", a.gr_dbi);
    c.non_negative("access", "rho_ox_db_per_km", a.rho_ox_db_per_km);
    c.non_negative("access", "rho_rain_db_per_km", a.rho_rain_db_per_km);

    let tp = &s.topology;
    c.count("topology", "hops", tp.hops);
    c.count("topology", "routes", tp.routes);
    c.positive("topology", "hop_length_m", tp.hop_length_m);
    c.finite("topology", "power_db", tp.power_db);
    c.finite("topology", "threshold_db", tp.threshold_db);
    if let Some(db) = tp.access_threshold_db {
        c.finite("topology", "access_threshold_db", db);
    }
    if let Some(i) = &tp.iab {
        if i.ues_per_node == 0 {
            c.report("topology.iab", "ues_per_node", "at least one UE per node is required");
        }
        c.positive("topology.iab", "rate_bps_hz", i.rate_bps_hz);
        if i.average && !tp.access && tp.ue.is_none() {
            c.report(
                "topology.iab",
                "average",
                "averaging over serving nodes needs `topology.access = true`",
            );
        }
        if i.average && tp.routes > 1 {
            c.report("topology.iab", "average", "cannot be combined with several routes");
        }
    }
    if let Some(ue) = &tp.ue {
        if !(1..=7).contains(&ue.scenario) {
            c.report(
                "topology.ue",
                "scenario",
                format!("must be 1 to 7, got {}", ue.scenario),
            );
        }
        c.positive("topology.ue", "spacing_m", ue.spacing_m);
        c.non_negative("topology.ue", "node_height_m", ue.node_height_m);
        c.finite("topology.ue", "position_m", ue.position_m);
        if tp.routes > 1 {
            c.report("topology", "routes", "UE scenarios have a single route");
        }
    }

    let mc = &s.mc;
    if s.engines.contains(&Engine::Mc) {
        if !(MIN_SAMPLES..=MAX_SAMPLES).contains(&mc.samples) {
            c.report(
                "mc",
                "samples",
                format!("must lie in [{MIN_SAMPLES}, {MAX_SAMPLES}], got {}", mc.samples),
            );
        }
        if !(mc.confidence > 0.0 && mc.confidence < 1.0) {
            c.report("mc", "confidence", format!("must lie in (0, 1), got {}", mc.confidence));
        }
    }

    match &s.sweep {
        None => c.report("", "sweep", "missing block [sweep]"),
        Some(w) => {
            c.finite("sweep", "start", w.start);
            c.finite("sweep", "stop", w.stop);
            if !(1..=MAX_POINTS).contains(&w.points) {
                c.report(
                    "sweep",
                    "points",
                    format!("must lie in [1, {MAX_POINTS}], got {}", w.points),
                );
            }
            if w.start.is_finite() && w.stop.is_finite() {
                if w.start > w.stop || (w.points > 1 && w.start == w.stop) {
                    c.report(
                        "sweep",
                        "stop",
                        format!("range must be ordered, got {} to {}", w.start, w.stop),
                    );
                } else if w.variable.is_integer() {
                    let bad = w
                        .values()
                        .into_iter()
                        .find(|v| (v - v.round()).abs() > 1e-9 || !(1.0..=MAX_COUNT as f64).contains(&v.round()));
                    if let Some(v) = bad {
                        c.report(
                            "sweep",
                            "points",
                            format!("{v} is not an integer in [1, {MAX_COUNT}]; choose start, stop and points to land on integers"),
                        );
                    }
                }
            }
            match w.variable {
                SweepVariable::UePosition if tp.ue.is_none() => {
                    c.report("sweep", "variable", "ue_position needs a [topology.ue] block")
                }
                SweepVariable::ThresholdDb if tp.iab.is_some() => c.report(
                    "sweep",
                    "variable",
                    "threshold_db has no effect when [topology.iab] sets thresholds",
                ),
                SweepVariable::NRoutes if tp.ue.is_some() => {
                    c.report("sweep", "variable", "UE scenarios have a single route")
                }
                _ => {}
            }
        }
    }

    // construct every point only once the fields themselves are sound, so a
    // bad field is reported once
    if c.out.is_empty() {
        if let (Some(w), Ok(absorption)) = (&s.sweep, &absorption) {
            for v in w.values() {
                if let Err(e) = build(&at_point(s, v), absorption) {
                    c.report("sweep", "variable", format!("at {} = {v}: {e}", sweep_name(w.variable)));
                }
            }
        }
    }
    c.out
}

pub fn sweep_name(v: SweepVariable) -> &'static str {
    match v {
        SweepVariable::PowerDb => "power_db",
        SweepVariable::ThresholdDb => "threshold_db",
        SweepVariable::JitterStd => "jitter_std",
        SweepVariable::NHops => "n_hops",
        SweepVariable::NRoutes => "n_routes",
        SweepVariable::UePosition => "ue_position",
    }
}
