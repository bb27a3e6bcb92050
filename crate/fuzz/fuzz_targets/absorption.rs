#![no_main]

use backhaul_core::channels::{parse_absorption_table, AbsorptionTable, Environment};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    match parse_absorption_table(text) {
        Ok(rows) => {
            assert!(!rows.is_empty());
            for r in &rows {
                assert!(r.center_ghz > 0.0 && r.center_ghz.is_finite());
                assert!(!r.coeffs.is_empty() && r.coeffs.iter().all(|c| c.is_finite()));
            }
            let table = AbsorptionTable {
                rows,
                environment: Environment::default(),
            };
            let (lo, hi) = table.coverage_ghz();
            for f in [lo, 0.5 * (lo + hi), hi, hi * 2.0] {
                let _ = table.k_abs(f * 1e9);
            }
        }
        Err(e) => assert!(e.line >= 1 && e.line <= text.lines().count().max(1)),
    }
});
