use microcavity::*;
use num_complex::Complex;
use proptest::prelude::*;

/// Independent closed form: admittance of `(H L)^N` on a substrate at the
/// design wavelength is `(nH/nL)^{2N} ns`.
fn quarter_wave_reflectance_oracle(n0: f64, nh: f64, nl: f64, ns: f64, pairs: i32) -> f64 {
    let y = (nh / nl).powi(2 * pairs) * ns;
    ((n0 - y) / (n0 + y)).powi(2)
}

#[test]
fn quarter_wave_stack_matches_closed_form() {
    for pairs in 1..=15 {
        let design = QuarterWaveDesign::new(2.1, 1.45, 1.45, 737.0);
        let r = stack_response(&design.stack(pairs).unwrap(), 737.0).unwrap();
        let oracle = quarter_wave_reflectance_oracle(1.0, 2.1, 1.45, 1.45, pairs as i32);
        assert!(
            (r.reflectance - oracle).abs() < 1e-10,
            "N={pairs}: {} vs {oracle}",
            r.reflectance
        );
        assert!((r.transmittance - (1.0 - oracle)).abs() < 1e-10);
    }
}

#[test]
fn dbr_design_picks_smallest_pair_count() {
    let design = QuarterWaveDesign::new(2.1, 1.45, 1.45, 737.0);
    let result = design_quarter_wave_dbr(design, 1e-3).unwrap();
    // sweep oracle
    let sweep: Vec<f64> = (0..20)
        .map(|n| stack_response(&design.stack(n).unwrap(), 737.0).unwrap().transmittance)
        .collect();
    let expected = sweep.iter().position(|&t| t <= 1e-3).unwrap();
    assert_eq!(result.pairs, expected);
    assert!(sweep[expected - 1] > 1e-3);
    assert!(result.transmission <= 1e-3);
}

#[test]
fn dbr_stopband_is_wide() {
    let design = QuarterWaveDesign::new(2.1, 1.45, 1.45, 737.0);
    let mirror = design_quarter_wave_dbr(design, 1e-3).unwrap().stack;
    let grid = linear_grid(550.0, 950.0, 0.5);
    let sp = spectrum(&mirror, &grid).unwrap();
    let centre = grid.iter().position(|&w| w == 737.0).unwrap();
    let low = (0..centre).rev().find(|&i| sp.transmittance[i] >= 1e-2).unwrap();
    let high = (centre..grid.len()).find(|&i| sp.transmittance[i] >= 1e-2).unwrap();
    let width = grid[high] - grid[low];
    assert!(width >= 100.0, "stopband {} - {} nm", grid[low], grid[high]);
}

#[test]
fn reciprocity_under_layer_reversal() {
    let s = LayerStack::new(
        vec![
            OpticalLayer::semi_infinite_dielectric(1.0),
            OpticalLayer::dielectric(2.3, 93.0),
            OpticalLayer::dielectric(1.4, 211.0),
            OpticalLayer::dielectric(1.9, 57.0),
            OpticalLayer::semi_infinite_dielectric(1.0),
        ],
        "asym",
    )
    .unwrap();
    let f = stack_response(&s, 640.0).unwrap();
    let b = stack_response(&s.reversed().unwrap(), 640.0).unwrap();
    assert!((f.transmittance - b.transmittance).abs() < 1e-10);
}

#[test]
fn field_continuous_across_interfaces() {
    let design = QuarterWaveDesign::new(2.1, 1.45, 1.45, 737.0);
    let mirror = design.stack(6).unwrap();
    let (stack, _) = membrane_on_mirror(
        &mirror,
        Membrane {
            index: 2.417,
            thickness_nm: 1234.0,
        },
        0.0,
    )
    .unwrap();
    let field = StackField::solve(&stack, 720.0).unwrap();
    for j in 0..stack.len() - 1 {
        let left = if j == 0 {
            field.field_in_layer(0, 0.0)
        } else {
            field.field_in_layer(j, field.layer_thickness_nm(j))
        };
        let right = field.field_in_layer(j + 1, 0.0);
        let scale = left.norm_sqr().max(right.norm_sqr()).max(1e-300);
        assert!(
            (left.norm_sqr() - right.norm_sqr()).abs() / scale < 1e-8,
            "interface {j}: {left} vs {right}"
        );
    }
}

#[test]
fn perfect_reflector_has_node_at_surface() {
    let s = LayerStack::new(
        vec![
            OpticalLayer::semi_infinite_dielectric(1.0),
            OpticalLayer::dielectric(1.0, 500.0),
            OpticalLayer::semi_infinite_dielectric(1e7),
        ],
        "mirror",
    )
    .unwrap();
    let step = 0.5;
    let p = field_profile(&s, 737.0, ProfileOptions::new(step)).unwrap();
    let at_surface = p.interpolate(500.0).unwrap();
    assert!(at_surface < 1e-5, "{at_surface}");
    // nodes every λ/2 back from the mirror
    let near = p.interpolate(500.0 - 368.5).unwrap();
    assert!(near < 1e-5);
}

#[test]
fn matched_boundaries_give_flat_profile() {
    let s = LayerStack::new(
        vec![
            OpticalLayer::semi_infinite_dielectric(1.45),
            OpticalLayer::dielectric(1.45, 300.0),
            OpticalLayer::semi_infinite_dielectric(1.45),
        ],
        "matched",
    )
    .unwrap();
    let p = field_profile(&s, 737.0, ProfileOptions::new(1.0).padding(2000.0)).unwrap();
    let min = p.intensity.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(1.0 - min < 1e-9);
}

#[test]
fn standing_wave_period_in_diamond() {
    let design = QuarterWaveDesign::new(2.1, 1.45, 1.45, 737.0);
    let mirror = design_quarter_wave_dbr(design, 1e-3).unwrap().stack;
    let (stack, iface) = membrane_on_mirror(
        &mirror,
        Membrane {
            index: 2.417,
            thickness_nm: 3000.0,
        },
        0.0,
    )
    .unwrap();
    let p = field_profile(
        &stack,
        737.0,
        ProfileOptions::new(0.05).reference(iface, DepthDirection::TowardIncidence),
    )
    .unwrap()
    .restrict(0.0, 3000.0)
    .unwrap();
    let peaks = p.peak_depths();
    assert!(peaks.len() > 10);
    let period = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;
    let expected = 737.0 / (2.0 * 2.417);
    assert!((period - expected).abs() < 0.1, "{period} vs {expected}");
    assert!((expected - 152.5).abs() < 0.1);
}

#[test]
fn implantation_overlap_on_default_mirror() {
    let design = QuarterWaveDesign::new(2.1, 1.45, 1.45, 737.0);
    let mirror = design_quarter_wave_dbr(design, 1e-3).unwrap().stack;
    let (stack, iface) = membrane_on_mirror(
        &mirror,
        Membrane {
            index: 2.417,
            thickness_nm: 3000.0,
        },
        0.0,
    )
    .unwrap();
    let p = field_profile(
        &stack,
        737.0,
        ProfileOptions::new(0.1).reference(iface, DepthDirection::TowardIncidence),
    )
    .unwrap()
    .restrict(0.0, 3000.0)
    .unwrap();
    let ions = DepthDistribution::uniform(25.0, 75.0, 0.1).unwrap();
    let o = field_overlap(&p, &ions).unwrap();
    assert!(o.overlap > 0.0 && o.overlap <= 1.0);
    assert_eq!(o.density_mode_depth_nm, 50.0);
    let fraction = o.intensity_at_density_mode;
    assert!(
        (fraction - 0.80).abs() <= 0.15,
        "intensity at density mode = {fraction}"
    );
}

fn arb_layer() -> impl Strategy<Value = OpticalLayer> {
    (1.0..3.5f64, 0.0..0.5f64, 1.0..400.0f64).prop_map(|(n, k, d)| OpticalLayer::new(Complex::new(n, k), d))
}

fn arb_stack() -> impl Strategy<Value = LayerStack> {
    (
        1.0..2.0f64,
        prop::collection::vec(arb_layer(), 1..12),
        1.0..3.0f64,
        0.0..0.2f64,
    )
        .prop_map(|(n0, interior, ns, ks)| {
            let mut layers = vec![OpticalLayer::semi_infinite_dielectric(n0)];
            layers.extend(interior);
            layers.push(OpticalLayer::semi_infinite(Complex::new(ns, ks)));
            LayerStack::new(layers, "random").unwrap()
        })
}

fn arb_lossless_stack() -> impl Strategy<Value = LayerStack> {
    (1.0..2.0f64, prop::collection::vec((1.0..3.5f64, 1.0..400.0f64), 1..12)).prop_map(|(n0, interior)| {
        let mut layers = vec![OpticalLayer::semi_infinite_dielectric(n0)];
        layers.extend(interior.into_iter().map(|(n, d)| OpticalLayer::dielectric(n, d)));
        layers.push(OpticalLayer::semi_infinite_dielectric(n0));
        LayerStack::new(layers, "random").unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn energy_is_conserved(stack in arb_stack(), wl in 400.0..1000.0f64) {
        let r = stack_response(&stack, wl).unwrap();
        prop_assert!((r.reflectance + r.transmittance + r.absorptance - 1.0).abs() < 1e-9);
        for v in [r.reflectance, r.transmittance, r.absorptance] {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn reversal_preserves_transmission(stack in arb_lossless_stack(), wl in 400.0..1000.0f64) {
        let f = stack_response(&stack, wl).unwrap();
        let b = stack_response(&stack.reversed().unwrap(), wl).unwrap();
        prop_assert!((f.transmittance - b.transmittance).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn half_wave_layer_is_invisible(
        stack in arb_stack(),
        n in 1.0..3.5f64,
        m in 1usize..4,
        pos in 0usize..12,
        wl in 400.0..1000.0f64,
    ) {
        let before = stack_response(&stack, wl).unwrap();
        let layer = OpticalLayer::dielectric(n, m as f64 * wl / (2.0 * n));
        let after = stack_response(&stack.with_inserted(pos, layer).unwrap(), wl).unwrap();
        prop_assert!((before.reflectance - after.reflectance).abs() < 1e-9);
    }
}
