use microcavity::cqed::implied_branching_ratio;
use microcavity::*;
use proptest::prelude::*;

#[test]
fn finesse_from_mirror_transmission() {
    let f = finesse_from_losses(&[1000.0_f64, 1000.0]).unwrap();
    assert!((f - 3142.0).abs() < 1.0, "{f}");
    let f = finesse_from_losses(&[160.0_f64]).unwrap();
    assert!((f - 39_270.0).abs() < 1.0);
    assert!((f - 40_000.0).abs() / 40_000.0 < 0.05);
}

#[test]
fn quality_factor_example() {
    let q = quality_factor(29, 3142.0_f64);
    assert!((q - 91_118.0).abs() < 1e-9);
    assert_eq!(quality_factor(58, 3142.0_f64), 2.0 * q);
}

#[test]
fn theoretical_purcell_example() {
    let f = purcell_theoretical(2.417_f64, 91_100.0, 50.0).unwrap();
    assert!((f - 9.8).abs() < 0.05, "{f}");
}

#[test]
fn lifetime_ratio_gives_cooperativity_near_1_2() {
    let e = purcell_effective(1.72_f64, 0.78).unwrap();
    assert!((e.purcell_effective - 2.21).abs() < 0.01);
    assert!((e.cooperativity - 1.21).abs() < 0.01);
    assert!((e.beta - 0.546).abs() < 0.005);
    // back-solved lifetime for C = 1.2
    let tau_cav: f64 = 1.72 / 2.2;
    assert!((tau_cav - 0.78).abs() < 0.005);
    let e = purcell_effective(1.72_f64, tau_cav).unwrap();
    assert!((e.beta - 1.2 / 2.2).abs() < 1e-12);
}

#[test]
fn coupling_example() {
    let gamma = GammaConvention::AngularRate.gamma_over_2pi_ghz(1.72_f64);
    assert!((gamma - 0.0925).abs() < 1e-4);
    let g = coupling_from_cooperativity(1.2_f64, 4.5, 0.0925).unwrap();
    assert!((g - 0.35).abs() < 0.005, "{g}");
    let g4 = coupling_from_cooperativity(1.2_f64, 18.0, 0.0925).unwrap();
    assert!((g4 / g - 2.0).abs() < 1e-12);
}

fn inputs(tau_cav: f64, finesse: f64) -> ReportInputs {
    ReportInputs {
        geometry: CavityGeometry::spherical(10.7, 20.3, 737.0).unwrap(),
        mode_number: 29,
        mirror_transmission_ppm: [1000.0, 1000.0],
        finesse_experimental: finesse,
        tau_free_ns: 1.72,
        tau_cavity_ns: tau_cav,
        refractive_index: 2.417,
        branching_ratio: 0.1,
        gamma_convention: GammaConvention::AngularRate,
    }
}

#[test]
fn report_rows_carry_origins() {
    let r = CqedReport::assemble(&inputs(0.78, 820.0)).unwrap();
    let keys: Vec<&str> = r.rows.iter().map(|row| row.key).collect();
    for k in [
        "quality_factor",
        "kappa_over_2pi",
        "beam_waist",
        "mode_volume",
        "purcell_theoretical",
        "purcell_effective",
        "cooperativity",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert!(r.rows.iter().all(|row| !row.origin.is_empty()));
    let origin = |k: &str| r.rows.iter().find(|row| row.key == k).unwrap().origin.clone();
    assert_eq!(origin("finesse_experimental"), "cavity length scan");
    assert_eq!(origin("tau_cavity"), "fitted lifetime data");
    let table = r.to_table();
    assert!(table.contains("Cooperativity") && table.contains("Origin"));
}

#[test]
fn report_reproduces_cooperativity() {
    let r = CqedReport::assemble(&inputs(1.72 / 2.2, 820.0)).unwrap();
    assert!((r.cooperativity - 1.2).abs() < 1e-9);
    assert_eq!(r.quality_factor, 29.0 * 820.0);
    assert!((r.purcell_effective - (1.0 + r.cooperativity)).abs() <= 4.0 * f64::EPSILON * r.purcell_effective);
    assert!((r.beta - r.cooperativity / (1.0 + r.cooperativity)).abs() < 1e-15);

    let r = CqedReport::assemble(&inputs(1.72, 820.0)).unwrap();
    let c = r.rows.iter().find(|row| row.key == "cooperativity").unwrap();
    assert_eq!(c.value, 0.0);
    assert_eq!(r.coupling_g_over_2pi_ghz, 0.0);
}

#[test]
fn report_rejects_bad_branching_ratio() {
    let mut i = inputs(0.78, 820.0);
    i.branching_ratio = 1.5;
    assert!(CqedReport::assemble(&i).is_err());
}

/// Purcell factor evaluated with absolute volume and (λ/n)³ spelled out.
fn purcell_oracle(lambda_um: f64, n: f64, q: f64, v_cubic_wavelengths: f64) -> f64 {
    let v_um3 = v_cubic_wavelengths * lambda_um.powi(3);
    3.0 / (4.0 * std::f64::consts::PI.powi(2)) * (lambda_um / n).powi(3) * q / v_um3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn purcell_matches_formula(
        lam in 0.4f64..1.6, n in 1.0f64..3.5, q in 1.0f64..1e6, v in 0.5f64..500.0
    ) {
        let f = purcell_theoretical(n, q, v).unwrap();
        let o = purcell_oracle(lam, n, q, v);
        prop_assert!(((f - o) / o).abs() < 1e-12);
    }

    #[test]
    fn coupling_round_trip(c in 0.0f64..100.0, kappa in 0.01f64..100.0, gamma in 0.001f64..10.0) {
        let g = coupling_from_cooperativity(c, kappa, gamma).unwrap();
        let back = cooperativity_from_coupling(g, kappa, gamma);
        prop_assert!((back - c).abs() <= 1e-12 * c.max(1.0));
    }

    #[test]
    fn effective_purcell_identities(tfs in 0.1f64..20.0, tcav in 0.05f64..20.0) {
        let e = purcell_effective(tfs, tcav).unwrap();
        prop_assert!((e.purcell_effective - (1.0 + e.cooperativity)).abs() <= 4.0 * f64::EPSILON * e.purcell_effective.max(1.0));
        prop_assert!((e.beta - e.cooperativity / (1.0 + e.cooperativity)).abs() < 1e-12);
        prop_assert_eq!(e.suppressed, tcav > tfs);
    }

    #[test]
    fn quality_factor_is_product(m in 1u32..10_000, f in 1.0f64..1e6) {
        prop_assert!((quality_factor(m, f) / (m as f64 * f) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purcell_linear_in_q_inverse_in_v(q in 1.0f64..1e5, v in 1.0f64..100.0, k in 0.1f64..10.0) {
        let base = purcell_theoretical(2.417, q, v).unwrap();
        prop_assert!((purcell_theoretical(2.417, k * q, v).unwrap() / base - k).abs() < 1e-12 * k);
        prop_assert!((purcell_theoretical(2.417, q, k * v).unwrap() * k / base - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branching_ratio_consistency(f_p in 1.0f64..50.0, xi in 0.01f64..1.0) {
        let f_eff = 1.0 + xi * f_p;
        prop_assert!((implied_branching_ratio(f_eff, f_p) - xi).abs() < 1e-12);
    }
}
