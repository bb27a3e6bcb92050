//! Scenario files: a versioned TOML schema with every unit in the key name.
//!
//! Omitted keys take the baseline link parameters, so a scenario only states
//! what it changes. `to_toml` emits the fully resolved form, which parses
//! back to an identical `Scenario`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Closed,
    Asymptotic,
    Mc,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Closed => "closed",
            Engine::Asymptotic => "asymptotic",
            Engine::Mc => "mc",
        }
    }

    pub fn is_analytic(self) -> bool {
        self != Engine::Mc
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "closed" => Ok(Engine::Closed),
            "asymptotic" => Ok(Engine::Asymptotic),
            "mc" => Ok(Engine::Mc),
            other => Err(format!("unknown engine `{other}` (expected closed, asymptotic or mc)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    ImDd,
    Heterodyne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KruseSign {
    Physical,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThzSum {
    Exact,
    AlphaMu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    S1,
    S2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Switching,
    Combining,
}

/// Which backhaul links are deployed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Links {
    Hybrid,
    Thz,
    Fso,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    PowerDb,
    ThresholdDb,
    JitterStd,
    NHops,
    NRoutes,
    UePosition,
}

impl SweepVariable {
    pub fn is_integer(self) -> bool {
        matches!(self, SweepVariable::NHops | SweepVariable::NRoutes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FsoBlock {
    pub wavelength_nm: f64,
    pub cn2: f64,
    pub visibility_km: f64,
    pub detection: Detection,
    pub eta: f64,
    pub aperture_radius_m: f64,
    pub beamwidth_m: f64,
    pub jitter_std_m: f64,
    /// pointing offset (x, y); nonzero is simulated only
    pub boresight_m: [f64; 2],
    pub kruse_sign: KruseSign,
}

impl Default for FsoBlock {
    fn default() -> Self {
        FsoBlock {
            wavelength_nm: 1550.0,
            cn2: 1e-12,
            visibility_km: 10.0,
            detection: Detection::ImDd,
            eta: 1.0,
            aperture_radius_m: 0.2,
            beamwidth_m: 0.4,
            jitter_std_m: 0.05,
            boresight_m: [0.0, 0.0],
            kruse_sign: KruseSign::Physical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThzBlock {
    pub frequency_ghz: f64,
    pub gt_dbi: f64,
    pub gr_dbi: f64,
    pub alpha: f64,
    pub mu: f64,
    pub nr: u32,
    pub omega: f64,
    /// total absorption coefficient, used when no table is given
    pub k_abs_per_m: f64,
    /// coefficient table, relative to the scenario file
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absorption_file: Option<String>,
    pub pressure_pa: f64,
    pub temperature_k: f64,
    pub relative_humidity: f64,
    /// omitted: effective aperture of the receive antenna
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aperture_radius_m: Option<f64>,
    pub beamwidth_m: f64,
    pub jitter_std_m: f64,
}

impl Default for ThzBlock {
    fn default() -> Self {
        ThzBlock {
            frequency_ghz: 119.0,
            gt_dbi: 55.0,
            gr_dbi: 55.0,
            alpha: 2.0,
            mu: 3.0,
            nr: 2,
            omega: 1.0,
            k_abs_per_m: 5e-4,
            absorption_file: None,
            pressure_pa: 101_325.0,
            temperature_k: 298.0,
            relative_humidity: 0.5,
            aperture_radius_m: None,
            beamwidth_m: 0.5,
            jitter_std_m: 0.06,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AccessBlock {
    pub m: f64,
    pub nt: u32,
    pub omega: f64,
    pub frequency_ghz: f64,
    /// ignored when the UE position is swept; the geometry sets it
    pub length_m: f64,
    pub gt_dbi: f64,
    pub gr_dbi: f64,
    pub rho_ox_db_per_km: f64,
    pub rho_rain_db_per_km: f64,
}

impl Default for AccessBlock {
    fn default() -> Self {
        AccessBlock {
            m: 2.0,
            nt: 3,
            omega: 1.0,
            frequency_ghz: 28.0,
            length_m: 100.0,
            gt_dbi: 44.0,
            gr_dbi: 44.0,
            rho_ox_db_per_km: 15.1,
            rho_rain_db_per_km: 0.0,
        }
    }
}

/// Per-hop thresholds from a UE rate: hop n carries the UEs of node n and
/// every node after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IabBlock {
    pub ues_per_node: u32,
    pub rate_bps_hz: f64,
    /// report the mean E2E outage over the serving nodes
    pub average: bool,
    /// the donor also serves UEs over a direct access link
    pub donor_serves: bool,
}

impl Default for IabBlock {
    fn default() -> Self {
        IabBlock {
            ues_per_node: 10,
            rate_bps_hz: 0.1,
            average: false,
            donor_serves: false,
        }
    }
}

/// A UE on the line from the donor (x = 0) through the middle node to the
/// final node, served according to one of seven deployments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UeBlock {
    pub scenario: u32,
    pub position_m: f64,
    pub node_height_m: f64,
    pub spacing_m: f64,
}

impl Default for UeBlock {
    fn default() -> Self {
        UeBlock {
            scenario: 5,
            position_m: 100.0,
            node_height_m: 30.0,
            spacing_m: 200.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyBlock {
    pub system: System,
    pub hops: u32,
    /// THz hops and System 1 FSO links; the System 2 FSO link spans the chain
    pub hop_length_m: f64,
    pub mode: Mode,
    pub links: Links,
    /// transmit power of every link over unit noise variance
    pub power_db: f64,
    pub threshold_db: f64,
    pub access: bool,
    /// omitted: `threshold_db`, or 2^R - 1 under IAB
    #[serde(skip_serializing_if = "Option::is_none")]
    pub access_threshold_db: Option<f64>,
    /// independent identical routes
    pub routes: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iab: Option<IabBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ue: Option<UeBlock>,
}

impl Default for TopologyBlock {
    fn default() -> Self {
        TopologyBlock {
            system: System::S1,
            hops: 1,
            hop_length_m: 200.0,
            mode: Mode::Switching,
            links: Links::Hybrid,
            power_db: 30.0,
            threshold_db: 1.0,
            access: false,
            access_threshold_db: None,
            routes: 1,
            iab: None,
            ue: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: u32,
}

impl SweepBlock {
    /// Evenly spaced, `start` first.
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McBlock {
    pub samples: u64,
    pub confidence: f64,
    pub thz_sum: ThzSum,
}

impl Default for McBlock {
    fn default() -> Self {
        McBlock {
            samples: 1_000_000,
            confidence: 0.95,
            thz_sum: ThzSum::Exact,
        }
    }
}

fn default_engines() -> Vec<Engine> {
    vec![Engine::Closed]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_engines")]
    pub engines: Vec<Engine>,
    #[serde(default)]
    pub fso: FsoBlock,
    #[serde(default)]
    pub thz: ThzBlock,
    #[serde(default)]
    pub access: AccessBlock,
    #[serde(default)]
    pub topology: TopologyBlock,
    /// required; optional here so its absence is reported with the rest
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub mc: McBlock,
}

/// A syntax or schema error at a 1-based line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn line_of_offset(text: &str, offset: usize) -> usize {
    let end = offset.min(text.len());
    text.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() + 1
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ParseError> {
        toml::from_str(text).map_err(|e: toml::de::Error| ParseError {
            line: e.span().map_or(1, |s| line_of_offset(text, s.start)),
            message: e.message().trim().to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        // every field is a plain number, string, enum or table
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn metric(&self) -> &'static str {
        let t = &self.topology;
        let swept = |v| self.sweep.as_ref().is_some_and(|s| s.variable == v);
        if t.ue.is_some() {
            "ue_outage"
        } else if t.routes > 1 || swept(SweepVariable::NRoutes) {
            "mesh_outage"
        } else if t.iab.as_ref().is_some_and(|i| i.average) {
            "iab_average_outage"
        } else if t.access {
            "e2e_outage"
        } else {
            "backhaul_outage"
        }
    }
}

/// Line of `key` inside `[table]` (dotted for nested tables), or of the
/// table header when the key is absent. `None` when neither appears.
pub fn locate(text: &str, table: &str, key: Option<&str>) -> Option<usize> {
    let mut header_line = None;
    let mut inside = table.is_empty();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.starts_with('[') {
            let name = line.trim_matches(|c| c == '[' || c == ']').trim();
            inside = name == table;
            if inside {
                header_line = Some(i + 1);
            }
            continue;
        }
        if inside {
            if let Some(k) = key {
                let lhs = line.split('=').next().unwrap_or("").trim().trim_matches('"');
                if line.contains('=') && lhs == k {
                    return Some(i + 1);
                }
            }
        }
    }
    header_line
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "schema_version = 1\n[sweep]\nvariable = \"power_db\"\nstart = 0.0\nstop = 10.0\npoints = 3\n";

    #[test]
    fn minimal_file_takes_defaults() {
        let s = Scenario::parse(MINIMAL).unwrap();
        assert_eq!(s.engines, vec![Engine::Closed]);
        assert_eq!(s.fso, FsoBlock::default());
        assert_eq!(s.sweep.unwrap().values(), vec![0.0, 5.0, 10.0]);
    }

    #[test]
    fn resolved_form_round_trips() {
        let mut s = Scenario::parse(MINIMAL).unwrap();
        s.topology.iab = Some(IabBlock::default());
        s.topology.ue = Some(UeBlock::default());
        s.thz.aperture_radius_m = Some(0.1);
        s.fso.cn2 = 3.3e-15;
        let text = s.to_toml();
        assert_eq!(Scenario::parse(&text).unwrap(), s);
    }

    #[test]
    fn unknown_key_is_anchored() {
        let text = "schema_version = 1\n\n[fso]\ncn2 = 1e-13\njiter_std_m = 0.1\n";
        let e = Scenario::parse(text).unwrap_err();
        assert_eq!(e.line, 5, "{e}");
        assert!(e.message.contains("jiter_std_m"), "{e}");
    }

    #[test]
    fn locate_finds_keys_and_headers() {
        let text = "schema_version = 1\n[fso]\ncn2 = 1\n[topology.iab]\nrate_bps_hz = 2 # note\n";
        assert_eq!(locate(text, "fso", Some("cn2")), Some(3));
        assert_eq!(locate(text, "fso", Some("eta")), Some(2));
        assert_eq!(locate(text, "topology.iab", Some("rate_bps_hz")), Some(5));
        assert_eq!(locate(text, "", Some("schema_version")), Some(1));
        assert_eq!(locate(text, "mc", Some("samples")), None);
    }
}
