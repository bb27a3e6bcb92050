//! Scenario files shipped inside the binary.

pub struct Preset {
    pub name: &'static str,
    pub text: &'static str,
}

impl Preset {
    /// First comment line of the file.
    pub fn summary(&self) -> &'static str {
        self.text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .map_or("", str::trim)
    }
}

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        &[$(Preset { name: $name, text: include_str!(concat!("../presets/", $name, ".toml")) }),*]
    };
}

pub const PRESETS: &[Preset] = presets![
    "table2",
    "hops-s1",
    "hops-s2",
    "mesh-s1",
    "mesh-s2",
    "threshold-s1-switching",
    "threshold-s1-combining",
    "threshold-s2-switching",
    "threshold-s2-combining",
    "jitter-hybrid",
    "jitter-thz",
    "jitter-fso",
    "ue-scenario-1",
    "ue-scenario-2",
    "ue-scenario-3",
    "ue-scenario-4",
    "ue-scenario-5",
    "ue-scenario-6",
    "ue-scenario-7",
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
