#![no_main]

use backhaul_lab::scenario::Scenario;
use backhaul_lab::validate::validate;
use libfuzzer_sys::fuzz_target;
use std::path::Path;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(mut s) = Scenario::parse(text) else {
        return;
    };
    // resolved text is a fixed point (NaN fields defeat struct equality)
    let resolved = s.to_toml();
    let again = Scenario::parse(&resolved).expect("resolved scenario re-parses");
    assert_eq!(again.to_toml(), resolved);

    // keep the filesystem out of it and the per-point construction cheap
    s.thz.absorption_file = None;
    if s.sweep.as_ref().is_some_and(|w| w.points > 64) {
        return;
    }
    let _ = validate(&s, text, Path::new("."));
});
