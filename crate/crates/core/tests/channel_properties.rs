use backhaul_core::channels::{
    db_to_linear, AccessConfig, AccessLinkParams, Detection, FsoConfig, FsoLinkParams, ThzConfig, ThzLinkParams,
};
use backhaul_core::quad;
use proptest::prelude::*;

fn fso_strategy() -> impl Strategy<Value = FsoLinkParams> {
    (-15.0f64..-12.0, 0.03f64..0.2, -10.0f64..50.0, any::<bool>()).prop_map(|(cn2, jitter, db, het)| {
        FsoLinkParams::new(FsoConfig {
            cn2: 10f64.powf(cn2),
            jitter_std: jitter,
            power: db_to_linear(db),
            detection: if het {
                Detection::Heterodyne
            } else {
                Detection::IntensityModulation
            },
            ..Default::default()
        })
        .unwrap()
    })
}

fn thz_strategy() -> impl Strategy<Value = ThzLinkParams> {
    (1.5f64..3.0, 1.0f64..4.0, 1u32..5, 0.02f64..0.1, -10.0f64..50.0).prop_map(|(alpha, mu, nr, jitter, db)| {
        ThzLinkParams::new(ThzConfig {
            alpha,
            mu,
            nr,
            jitter_std: jitter,
            power: db_to_linear(db),
            ..Default::default()
        })
        .unwrap()
    })
}

fn access_strategy() -> impl Strategy<Value = AccessLinkParams> {
    (0.5f64..5.0, 1u32..9, -10.0f64..50.0).prop_map(|(m, nt, db)| {
        AccessLinkParams::new(AccessConfig {
            m,
            nt,
            power: db_to_linear(db),
            ..Default::default()
        })
        .unwrap()
    })
}

/// 10³ points spanning nine decades around `scale`.
fn log_grid(scale: f64) -> impl Iterator<Item = f64> {
    (0..1000).map(move |i| scale * 10f64.powf(-6.0 + 9.0 * i as f64 / 999.0))
}

fn monotone_in_unit_interval(cdf: impl Fn(f64) -> f64, scale: f64) -> Result<(), TestCaseError> {
    let mut prev = 0.0;
    for g in log_grid(scale) {
        let f = cdf(g);
        prop_assert!((0.0..=1.0).contains(&f), "cdf({g}) = {f}");
        // the closed forms are evaluated independently per point, so allow rounding
        prop_assert!(f >= prev * (1.0 - 1e-9), "cdf({g}) = {f} after {prev}");
        prev = prev.max(f);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fso_cdf_monotone(link in fso_strategy()) {
        monotone_in_unit_interval(|g| link.cdf(g).unwrap(), link.delta())?;
    }

    #[test]
    fn thz_cdf_monotone(link in thz_strategy()) {
        monotone_in_unit_interval(|g| link.cdf(g).unwrap(), link.gamma_hat())?;
    }

    #[test]
    fn access_cdf_monotone(link in access_strategy()) {
        monotone_in_unit_interval(|g| link.cdf(g).unwrap(), link.gamma_bar())?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn fso_pdf_integrates_to_one(link in fso_strategy()) {
        let total = quad::integrate_to_infinity(|g| link.pdf(g).unwrap(), 0.0, 1e-10).value;
        prop_assert!((total - 1.0).abs() <= 1e-6, "{total}");
    }

    #[test]
    fn thz_pdf_integrates_to_one(link in thz_strategy()) {
        let total = quad::integrate_to_infinity(|g| link.pdf(g).unwrap(), 0.0, 1e-10).value;
        prop_assert!((total - 1.0).abs() <= 1e-6, "{total}");
    }

    #[test]
    fn fso_meijer_matches_quadrature(link in fso_strategy()) {
        for g in log_grid(link.delta()).step_by(50) {
            let direct = link.cdf_quadrature(g).unwrap();
            if direct < 1e-12 {
                continue;
            }
            let closed = link.cdf(g).unwrap();
            prop_assert!((closed - direct).abs() <= 1e-6 * direct, "γ={g}: {closed} vs {direct}");
        }
    }

    #[test]
    fn thz_meijer_matches_incomplete_gamma_form(link in thz_strategy()) {
        for g in log_grid(link.gamma_hat()).step_by(50) {
            let b = link.cdf_meijer(g).unwrap();
            if b < 1e-12 {
                continue;
            }
            let a = link.cdf(g).unwrap();
            prop_assert!((a - b).abs() <= 1e-6 * a, "γ={g}: {a} vs {b}");
        }
    }
}
