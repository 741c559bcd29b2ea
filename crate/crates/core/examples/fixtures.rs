//! Regenerates the CLI test fixtures: `cargo run --example fixtures -- <dir>`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use microcavity::analysis::synth::{decay_trace, finesse_scan};
use microcavity::scalar::{nm_to_thz, thz_to_nm};
use microcavity::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

fn save(trace: &ScanTrace, path: &Path) -> Result<()> {
    trace.write_csv(BufWriter::new(
        File::create(path).map_err(|e| Error::Parse(e.to_string()))?,
    ))
}

fn with_noise(trace: &ScanTrace, mut noise: impl FnMut(f64) -> f64) -> Result<ScanTrace> {
    let y = trace.ordinate().iter().map(|&v| noise(v)).collect();
    ScanTrace::new(trace.abscissa().to_vec(), y, trace.meta.clone())
}

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "crates/cli/fixtures".into());
    let dir = Path::new(&dir);
    fs::create_dir_all(dir.join("ple"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let gauss = Normal::new(0.0, 0.002)?;
    let scan = finesse_scan(820.0, 400.0, 0.6, 1.0, Channel::Reflection, 6.0)?;
    let mut scan = with_noise(&scan, |v| v + gauss.sample(&mut rng))?;
    scan.meta.extra.insert("generator_finesse".into(), "820".into());
    save(&scan, &dir.join("scan.csv"))?;

    let decay = decay_trace(0.78, 1000.0, 2.0, 2.0, (0.0, 15.0, 0.02))?;
    let mut decay = with_noise(&decay, |m| Poisson::new(m).expect("positive mean").sample(&mut rng))?;
    decay.meta.extra.insert("pulse_end_ns".into(), "2".into());
    decay.meta.extra.insert("generator_tau_ns".into(), "0.78".into());
    save(&decay, &dir.join("lifetime.csv"))?;

    let levels = GroupIVLevels::silicon_vacancy();
    let strain = StrainState::with_ratio(12.0, 150.0, 2.0, OrientationClass::One)?;
    let fs = splittings_from_strain(&levels, &strain);
    let spec = EnsembleSpec::new(100.0, 4.0, 20.0);
    let sp = synthesize_zpl_spectrum(&levels, &[strain], &spec, &linear_grid(735.5, 738.5, 0.002))?;
    let mut meta = TraceMeta::new(AbscissaUnit::WavelengthNm, Channel::Fluorescence);
    meta.temperature_k = Some(20.0);
    meta.extra
        .insert("generator_delta_gs_ghz".into(), fs.delta_gs_ghz.to_string());
    meta.extra
        .insert("generator_delta_es_ghz".into(), fs.delta_es_ghz.to_string());
    save(
        &ScanTrace::new(sp.wavelength_nm, sp.intensity, meta)?,
        &dir.join("spectrum.csv"),
    )?;

    // cavity-filtered excitation scans over a Gaussian ensemble, σ = 9 GHz
    let counts = Normal::new(0.0, 0.5)?;
    for k in -20..=20 {
        let detuning_ghz = 2.0 * k as f64;
        let response = (-0.5 * (detuning_ghz / 9.0_f64).powi(2)).exp();
        let x = linear_grid(0.0, 39.9, 0.1);
        let y = x
            .iter()
            .map(|&xi| {
                let u = 2.0 * (xi - 20.0) / 0.8;
                3.0 + 200.0 * response / (1.0 + u * u) + counts.sample(&mut rng)
            })
            .collect();
        let mut meta = TraceMeta::new(AbscissaUnit::Arbitrary, Channel::Fluorescence);
        meta.excitation_nm = Some(thz_to_nm(nm_to_thz(737.0) + detuning_ghz * 1e-3));
        save(
            &ScanTrace::new(x, y, meta)?,
            &dir.join(format!("ple/scan_{:02}.csv", k + 20)),
        )?;
    }

    let mut map = BufWriter::new(File::create(dir.join("strain_map.csv"))?);
    writeln!(map, "position_um,class,axial_ghz,transverse_ghz")?;
    for (p, a1, t1, a2, t2) in [
        (0.0, -40.0, 60.0, 30.0, 20.0),
        (10.0, 0.0, 150.0, 0.0, 80.0),
        (20.0, 40.0, 260.0, -30.0, 140.0),
    ] {
        writeln!(map, "{p},1,{a1},{t1}")?;
        writeln!(map, "{p},2,{a2},{t2}")?;
    }
    Ok(())
}
