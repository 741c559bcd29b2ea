use microcavity::*;

const LAMBDA: f64 = 737.0;

/// Half-symmetric resonator from the q-parameter: the Rayleigh range obeys
/// z_R² = L(R − L) and ω0² = λ z_R / π.
fn waist_oracle_um(length_um: f64, roc_um: f64, wavelength_nm: f64) -> f64 {
    let z_r = (length_um * (roc_um - length_um)).sqrt();
    (wavelength_nm * 1e-3 * z_r / std::f64::consts::PI).sqrt()
}

#[test]
fn waist_matches_gaussian_beam_oracle() {
    for &(l, r) in &[(10.0, 40.0), (10.7, 20.3), (3.0, 8.0), (25.0, 26.0)] {
        let g = CavityGeometry::spherical(l, r, LAMBDA).unwrap();
        let w = beam_waist(&g).unwrap();
        assert!((w - waist_oracle_um(l, r, LAMBDA)).abs() < 1e-12, "L={l} R={r}");
    }
    let w = beam_waist(&CavityGeometry::spherical(10.0, 40.0, LAMBDA).unwrap()).unwrap();
    assert!((w - 2.02).abs() < 0.005, "{w}");
}

#[test]
fn astigmatic_mirror_uses_geometric_mean() {
    let g = CavityGeometry::new(10.7, 18.0, 24.0, LAMBDA, 0.55).unwrap();
    let w = beam_waist(&g).unwrap();
    let oracle = (waist_oracle_um(10.7, 18.0, LAMBDA) * waist_oracle_um(10.7, 24.0, LAMBDA)).sqrt();
    assert!((w - oracle).abs() < 1e-12);
}

#[test]
fn unstable_geometry_is_rejected() {
    assert!(matches!(
        CavityGeometry::spherical(20.0, 20.0, LAMBDA),
        Err(Error::Unstable { .. })
    ));
    assert!(CavityGeometry::new(10.0, 40.0, 9.0, LAMBDA, 0.55).is_err());
}

#[test]
fn mode_volume_examples() {
    let lam_um = LAMBDA * 1e-3;
    let g = CavityGeometry::spherical(10.0, 40.0, LAMBDA).unwrap();
    let v = mode_volume(&g).unwrap();
    let w = waist_oracle_um(10.0, 40.0, LAMBDA);
    let oracle = std::f64::consts::FRAC_PI_4 * 10.0 * w * w;
    assert!((v.cubic_um - oracle).abs() < 1e-9);
    assert!((v.cubic_wavelengths - oracle / lam_um.powi(3)).abs() < 1e-9);
    assert!((v.cubic_wavelengths - 80.0).abs() < 1.0, "{}", v.cubic_wavelengths);

    let g = CavityGeometry::spherical(10.7, 20.3, LAMBDA).unwrap();
    let v = mode_volume(&g).unwrap().cubic_wavelengths;
    assert!((v - 50.0).abs() < 0.5, "{v}");
}

#[test]
fn some_radius_in_range_gives_reported_volume() {
    let length = resonant_length(29);
    assert!((length - 10.69).abs() < 0.01);
    let hit = (0..=600)
        .map(|i| 18.0 + i as f64 * 0.01)
        .filter_map(|r| CavityGeometry::spherical(10.7, r, LAMBDA).ok())
        .map(|g| mode_volume(&g).unwrap().cubic_wavelengths)
        .any(|v| (45.0..=53.0).contains(&v));
    assert!(hit);
}

fn resonant_length(m: u32) -> f64 {
    microcavity::geometry::resonant_length_um(m, LAMBDA)
}

#[test]
fn confocal_and_cavity_areas() {
    let w_fs = confocal_waist(LAMBDA, 0.55).unwrap();
    let oracle = 2.0 * LAMBDA * 1e-3 / (std::f64::consts::PI * 0.55);
    assert!((w_fs - oracle).abs() < 1e-12);
    assert!((w_fs - 0.85).abs() < 0.005);
    assert!((w_fs - 0.8).abs() / 0.8 < 0.1);

    let g = CavityGeometry::spherical(10.7, 20.3, LAMBDA).unwrap();
    let a_cav = mode_area(&g).unwrap();
    let w = beam_waist(&g).unwrap();
    assert!((a_cav - std::f64::consts::PI * w * w / 4.0).abs() < 1e-12);
    let a_fs = microcavity::geometry::area_from_waist(w_fs);
    assert!(a_cav / a_fs > 3.0, "{}", a_cav / a_fs);
}

#[test]
fn free_spectral_range_and_linewidth() {
    let fsr = free_spectral_range_ghz(10.7_f64).unwrap();
    assert!((fsr - 299_792_458.0 / (2.0 * 10.7e-6) * 1e-9).abs() < 1e-6);
    assert!((fsr / 1e3 - 14.0).abs() < 0.05);
    let kappa = linewidth_from_finesse(10.7_f64, 3142.0).unwrap();
    assert!((kappa - fsr / 3142.0).abs() < 1e-12);
    assert!((kappa - 4.46).abs() < 0.01);
}

fn mirror(pairs: usize) -> LayerStack {
    QuarterWaveDesign::new(2.1, 1.45, 1.45, LAMBDA).stack(pairs).unwrap()
}

#[test]
fn bare_cavity_branches_are_half_wave_apart() {
    let cav = HybridCavity::new(mirror(8), None);
    let opts = DispersionOptions::new((730.0, 745.0), 1.0, (2000.0, 4500.0));
    let chart = resonance_dispersion(&cav, &opts).unwrap();
    assert!(chart.diagnostics.is_empty(), "{:?}", chart.diagnostics);
    assert!(chart.branch_count() >= 5);
    let mut checked = 0;
    for i in 0..=15 {
        let w = 730.0 + i as f64;
        let mut gaps: Vec<(u32, f64)> = chart
            .points
            .iter()
            .filter(|p| (p.wavelength_nm - w).abs() < 1e-9)
            .map(|p| (p.mode_number, p.air_gap_nm))
            .collect();
        gaps.sort_by(|a, b| a.1.total_cmp(&b.1));
        for pair in gaps.windows(2) {
            assert!((pair[1].1 - pair[0].1 - w / 2.0).abs() < 1e-5, "at {w}: {pair:?}");
            assert_eq!(pair[1].0, pair[0].0 + 1);
            checked += 1;
        }
    }
    assert!(checked > 50);
    assert!(chart.points.iter().all(|p| p.class == ModeClass::AirLike));
}

/// Circulating-power share in the gap from a sampled intensity profile.
fn sampled_air_fraction(cav: &HybridCavity, wavelength: f64, gap: f64) -> f64 {
    let stack = cav.stack(gap).unwrap();
    let (diamond, air) = cav.region_indices();
    let diamond = diamond.unwrap();
    let profile = field_profile(&stack, wavelength, ProfileOptions::new(1.0)).unwrap();
    let region_mean = |layer: usize| {
        let (lo, hi) = (profile.interfaces_nm[layer - 1], profile.interfaces_nm[layer]);
        let inside: Vec<f64> = profile
            .depth_nm
            .iter()
            .zip(&profile.intensity)
            .filter(|(d, _)| **d > lo && **d < hi)
            .map(|(_, i)| *i)
            .collect();
        inside.iter().sum::<f64>() / inside.len() as f64
    };
    let n_d = stack.layers()[diamond].index_at(wavelength).re;
    let air_power = region_mean(air);
    let diamond_power = n_d * region_mean(diamond);
    air_power / (air_power + diamond_power)
}

#[test]
fn membrane_branches_alternate_and_match_sampled_fields() {
    let cav = HybridCavity::new(
        mirror(8),
        Some(Membrane {
            index: 2.417,
            thickness_nm: 3000.0,
        }),
    );
    let opts = DispersionOptions::new((720.0, 770.0), 1.0, (2500.0, 4500.0));
    let chart = resonance_dispersion(&cav, &opts).unwrap();
    assert!(chart.diagnostics.is_empty(), "{:?}", chart.diagnostics);

    let mut alternating = 0;
    let mut families = std::collections::BTreeSet::new();
    for id in 0..chart.branch_count() {
        let b = chart.branch(id);
        if b.len() < 40 {
            continue;
        }
        assert!(b.windows(2).all(|w| w[1].air_gap_nm > w[0].air_gap_nm));
        let switches = b.windows(2).filter(|w| w[0].class != w[1].class).count();
        if switches >= 2 {
            alternating += 1;
        }
        for p in &b {
            families.insert(p.class.as_str());
        }
        // diamond-like stretches disperse more steeply in gap length
        let slope = |class: ModeClass| {
            let s: Vec<f64> = b
                .windows(2)
                .filter(|w| w[0].class == class && w[1].class == class)
                .map(|w| (w[1].air_gap_nm - w[0].air_gap_nm) / (w[1].wavelength_nm - w[0].wavelength_nm))
                .collect();
            s.iter().sum::<f64>() / s.len() as f64
        };
        assert!(slope(ModeClass::DiamondLike) > slope(ModeClass::AirLike));
    }
    assert!(alternating >= 3, "{alternating} alternating branches");
    assert_eq!(families.len(), 2);

    // threshold-crossing consistency against sampled fields on three branches
    let mut compared = 0;
    for id in 2..5 {
        for p in chart.branch(id).iter().step_by(2) {
            let oracle = sampled_air_fraction(&cav, p.wavelength_nm, p.air_gap_nm);
            assert!((oracle - p.air_fraction).abs() < 0.01, "{p:?} vs {oracle}");
            if (oracle - 0.5).abs() > 0.02 {
                assert_eq!(oracle > 0.5, p.class == ModeClass::AirLike, "{p:?} vs {oracle}");
                compared += 1;
            }
        }
    }
    assert!(compared > 50);
}

#[test]
fn membrane_mode_number_matches_length() {
    let cav = HybridCavity::new(
        mirror(8),
        Some(Membrane {
            index: 2.417,
            thickness_nm: 3000.0,
        }),
    );
    let opts = DispersionOptions::new((736.0, 738.0), 1.0, (3000.0, 3800.0));
    let chart = resonance_dispersion(&cav, &opts).unwrap();
    let p = chart
        .points
        .iter()
        .find(|p| p.mode_number == 29 && p.wavelength_nm == 737.0)
        .expect("m = 29 near 737 nm");
    let l_eff_um = (p.air_gap_nm + 2.417 * 3000.0) * 1e-3;
    assert!((l_eff_um - 10.7).abs() < 0.1, "{l_eff_um}");
}
