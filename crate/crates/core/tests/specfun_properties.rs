use backhaul_core::channels::{Detection, FsoConfig, FsoLinkParams};
use backhaul_core::specfun::{
    gamma, incomplete_gamma, lower_gamma_series, meijer_g_contour, meijer_g_slater, GammaKind, MeijerGSpec,
};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Slater residue sums need the m-block poles apart from integer spacings.
fn poles_separated(b: &[f64], gap: f64) -> bool {
    b.iter().enumerate().all(|(i, x)| {
        b[i + 1..].iter().all(|y| {
            let d = (x - y).abs();
            (d - d.round()).abs() > gap
        })
    })
}

fn agree(spec: &MeijerGSpec, z: f64) -> Result<(), TestCaseError> {
    prop_assume!(poles_separated(&spec.b[..spec.m], 0.02));
    let slater = meijer_g_slater(spec, z);
    prop_assume!(slater.is_ok());
    let s = slater.unwrap();
    let c = meijer_g_contour(spec, z).unwrap();
    // compared in scaled form: weak turbulence puts the values past f64 range
    let err = (s.mantissa.signum() * c.mantissa.signum() * (s.ln_abs() - c.ln_abs()).exp() - 1.0).abs();
    prop_assert!(err <= 1e-8, "{spec:?} z={z}: slater {s:?} contour {c:?}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn slater_matches_contour_g3013(a in 1.0f64..4.0, b0 in 0.0f64..3.0, b1 in 0.0f64..3.0, b2 in 0.0f64..3.0, z in 0.01f64..5.0) {
        agree(&MeijerGSpec::new(3, 0, vec![a], vec![b0, b1, b2]).unwrap(), z)?;
    }

    #[test]
    fn slater_matches_contour_fso_shape(
        cn2 in -15.0f64..-12.0,
        jitter in 0.03f64..0.2,
        heterodyne in any::<bool>(),
        ln_z in -6.0f64..1.5,
    ) {
        let link = FsoLinkParams::new(FsoConfig {
            cn2: 10f64.powf(cn2),
            jitter_std: jitter,
            detection: if heterodyne { Detection::Heterodyne } else { Detection::IntensityModulation },
            ..Default::default()
        }).unwrap();
        agree(&link.cdf_spec(0.0), 10f64.powf(ln_z))?;
    }

    #[test]
    fn slater_matches_contour_thz_shape(s in 0.2f64..5.0, k in 1.0f64..8.0, x in 0.01f64..8.0) {
        let spec = MeijerGSpec::new(2, 1, vec![1.0 - s, 1.0], vec![0.0, k - s, -s]).unwrap();
        agree(&spec, x)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn incomplete_gammas_sum_to_gamma(a in 0.01f64..50.0, x in 0.0f64..100.0) {
        let lo = incomplete_gamma(GammaKind::Lower, a, x).unwrap();
        let up = incomplete_gamma(GammaKind::Upper, a, x).unwrap();
        let g = gamma(a).unwrap();
        prop_assert!(rel(lo + up, g) <= 1e-12, "a={a} x={x}: {lo} + {up} vs {g}");
    }

    #[test]
    fn truncated_lower_series_inside_radius(a in 0.05f64..20.0, x in 0.0f64..5.0) {
        let series = lower_gamma_series(a, x, 50);
        let exact = incomplete_gamma(GammaKind::Lower, a, x).unwrap();
        prop_assert!((series - exact).abs() <= 1e-10 * exact.max(f64::MIN_POSITIVE), "a={a} x={x}: {series} vs {exact}");
    }
}
