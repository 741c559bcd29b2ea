use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use microcavity::analysis::fit_lifetime_with_guard;
use microcavity::geometry::{area_from_waist, mode_area};
use microcavity::optics::field_profile;
use microcavity::*;
use serde::Serialize;

use crate::config::{range_grid, ProjectConfig};
use crate::output::{strings, Format, Sink};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StackOutput {
    Spectrum,
    Field,
    Overlap,
}

/// Mirror alone, or the membrane bonded on it when one is configured.
fn probed_stack(cfg: &ProjectConfig) -> Result<(LayerStack, Option<usize>)> {
    let mirror = cfg.mirror()?;
    Ok(match cfg.membrane {
        Some(m) => {
            let (stack, iface) = membrane_on_mirror(&mirror, m.membrane(), m.bonding_gap_nm)?;
            (stack, Some(iface))
        }
        None => (mirror, None),
    })
}

/// |E|² profile; with a membrane, depth runs from the bonded (implanted)
/// face up into the diamond.
fn membrane_profile(cfg: &ProjectConfig) -> Result<FieldProfile> {
    let (stack, iface) = probed_stack(cfg)?;
    let o = &cfg.optics;
    let options = ProfileOptions::new(o.field_step_nm);
    Ok(match (iface, cfg.membrane) {
        (Some(iface), Some(m)) => field_profile(
            &stack,
            o.field_wavelength_nm,
            options.reference(iface, DepthDirection::TowardIncidence),
        )?
        .restrict(0.0, m.thickness_nm)?,
        _ => field_profile(&stack, o.field_wavelength_nm, options.padding(o.field_wavelength_nm))?,
    })
}

pub fn stack(cfg: &ProjectConfig, what: StackOutput, format: Option<Format>, sink: &Sink) -> Result<PathBuf> {
    let o = &cfg.optics;
    match what {
        StackOutput::Spectrum => {
            let (stack, _) = probed_stack(cfg)?;
            let grid = range_grid(o.spectrum_start_nm, o.spectrum_stop_nm, o.spectrum_step_nm, "spectrum")?;
            let sp = spectrum(&stack, &grid)?;
            match format.unwrap_or(Format::Csv) {
                Format::Json => sink.json("spectrum", &sp),
                Format::Csv => sink.columns(
                    "spectrum",
                    &[
                        ("wavelength_nm", strings(&sp.wavelength_nm)),
                        ("reflectance", strings(&sp.reflectance)),
                        ("transmittance", strings(&sp.transmittance)),
                        ("absorptance", strings(&sp.absorptance)),
                    ],
                ),
            }
        }
        StackOutput::Field => {
            let p = membrane_profile(cfg)?;
            match format.unwrap_or(Format::Csv) {
                Format::Json => sink.json("field", &p),
                Format::Csv => sink.columns(
                    "field",
                    &[("depth_nm", strings(&p.depth_nm)), ("intensity", strings(&p.intensity))],
                ),
            }
        }
        StackOutput::Overlap => {
            ensure!(cfg.membrane.is_some(), "--overlap needs a membrane in the config");
            let p = membrane_profile(cfg)?;
            let ions = DepthDistribution::uniform(o.implantation_lower_nm, o.implantation_upper_nm, o.field_step_nm)?;
            let overlap = field_overlap(&p, &ions)?;
            match format.unwrap_or(Format::Json) {
                Format::Json => sink.json("overlap", &overlap),
                Format::Csv => sink.scalars("overlap", &overlap),
            }
        }
    }
}

pub fn dispersion(cfg: &ProjectConfig, format: Option<Format>, sink: &Sink) -> Result<PathBuf> {
    let d = &cfg.dispersion;
    ensure!(
        d.wavelength_start_nm < d.wavelength_stop_nm,
        "empty wavelength range [{}, {}] nm",
        d.wavelength_start_nm,
        d.wavelength_stop_nm
    );
    let cavity = HybridCavity {
        bonding_gap_nm: cfg.membrane.map_or(0.0, |m| m.bonding_gap_nm),
        ..HybridCavity::new(cfg.mirror()?, cfg.membrane.map(|m| m.membrane()))
    };
    let chart = resonance_dispersion(&cavity, &d.options())?;
    for msg in &chart.diagnostics {
        log::warn!("{msg}");
    }
    log::info!("{} branches, {} points", chart.branch_count(), chart.points.len());
    match format.unwrap_or(Format::Csv) {
        Format::Json => sink.json("dispersion", &chart),
        Format::Csv => {
            let col = |f: &dyn Fn(&ModePoint) -> String| chart.points.iter().map(f).collect::<Vec<_>>();
            sink.columns(
                "dispersion",
                &[
                    ("branch", col(&|p| p.branch.to_string())),
                    ("mode_number", col(&|p| p.mode_number.to_string())),
                    ("wavelength_nm", col(&|p| p.wavelength_nm.to_string())),
                    ("air_gap_nm", col(&|p| p.air_gap_nm.to_string())),
                    ("air_fraction", col(&|p| p.air_fraction.to_string())),
                    ("class", col(&|p| p.class.as_str().to_string())),
                ],
            )
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ReportOverrides {
    pub finesse_experimental: Option<f64>,
    pub tau_free_ns: Option<f64>,
    pub tau_cavity_ns: Option<f64>,
    pub branching_ratio: Option<f64>,
    pub mode_number: Option<u32>,
}

pub fn report(cfg: &ProjectConfig, over: ReportOverrides, format: Option<Format>, sink: &Sink) -> Result<PathBuf> {
    let r = &cfg.report;
    let branching_ratio = over
        .branching_ratio
        .or(r.branching_ratio)
        .context("the branching ratio has no default: set report.branching_ratio or pass --branching-ratio")?;
    let inputs = ReportInputs {
        geometry: cfg.geometry.geometry()?,
        mode_number: over.mode_number.unwrap_or(r.mode_number),
        mirror_transmission_ppm: r.mirror_transmission_ppm,
        finesse_experimental: over.finesse_experimental.unwrap_or(r.finesse_experimental),
        tau_free_ns: over.tau_free_ns.unwrap_or(r.tau_free_ns),
        tau_cavity_ns: over.tau_cavity_ns.unwrap_or(r.tau_cavity_ns),
        refractive_index: r.refractive_index,
        branching_ratio,
        gamma_convention: r.gamma_convention,
    };
    let report = CqedReport::assemble(&inputs)?;
    print!("{}", report.to_table());
    match format.unwrap_or(Format::Json) {
        Format::Json => sink.json("report", &report),
        Format::Csv => sink.columns(
            "report",
            &[
                ("key", report.rows.iter().map(|r| r.key.to_string()).collect()),
                ("label", report.rows.iter().map(|r| r.label.to_string()).collect()),
                ("symbol", report.rows.iter().map(|r| r.symbol.to_string()).collect()),
                ("value", report.rows.iter().map(|r| r.value.to_string()).collect()),
                ("unit", report.rows.iter().map(|r| r.unit.to_string()).collect()),
                ("origin", report.rows.iter().map(|r| r.origin.clone()).collect()),
            ],
        ),
    }
}

fn read_trace(path: &Path) -> Result<ScanTrace> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    ScanTrace::from_csv(BufReader::new(file)).with_context(|| format!("cannot read trace {}", path.display()))
}

fn emit<T: Serialize>(stem: &str, value: &T, format: Option<Format>, sink: &Sink) -> Result<PathBuf> {
    match format.unwrap_or(Format::Json) {
        Format::Json => sink.json(stem, value),
        Format::Csv => sink.scalars(stem, value),
    }
}

pub fn analyze_scan(
    cfg: &ProjectConfig,
    file: &Path,
    wavelength_nm: Option<f64>,
    format: Option<Format>,
    sink: &Sink,
) -> Result<PathBuf> {
    let trace = read_trace(file)?;
    let result = extract_finesse(&trace, wavelength_nm.unwrap_or(cfg.analysis.wavelength_nm))?;
    for w in result
        .resonance_pair
        .0
        .warnings
        .iter()
        .chain(&result.resonance_pair.1.warnings)
    {
        log::warn!("{w}");
    }
    println!("finesse {:.2} ± {:.2}", result.finesse, result.finesse_uncertainty);
    emit("finesse", &result, format, sink)
}

pub fn analyze_lifetime(
    cfg: &ProjectConfig,
    file: &Path,
    pulse_end_ns: Option<f64>,
    guard_samples: Option<usize>,
    format: Option<Format>,
    sink: &Sink,
) -> Result<PathBuf> {
    let trace = read_trace(file)?;
    let from_meta = match trace.meta.extra.get("pulse_end_ns") {
        Some(v) => Some(
            v.parse::<f64>()
                .with_context(|| format!("#meta pulse_end_ns={v} is not a number"))?,
        ),
        None => None,
    };
    let pulse_end = pulse_end_ns
        .or(from_meta)
        .or(cfg.analysis.pulse_end_ns)
        .context("pulse end unknown: pass --pulse-end-ns, set analysis.pulse_end_ns or #meta pulse_end_ns")?;
    let fit = fit_lifetime_with_guard(&trace, pulse_end, guard_samples.unwrap_or(cfg.analysis.guard_samples))?;
    for w in &fit.warnings {
        log::warn!("{w}");
    }
    println!("tau {:.4} ± {:.4} ns", fit.tau_ns, fit.tau_uncertainty_ns);
    emit("lifetime", &fit, format, sink)
}

/// Files given directly, or every `*.csv` in a given directory, sorted.
fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("cannot list {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "csv"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    ensure!(!files.is_empty(), "no PLE scan files found");
    Ok(files)
}

pub fn analyze_ple(
    cfg: &ProjectConfig,
    inputs: &[PathBuf],
    window_fwhm: Option<f64>,
    format: Option<Format>,
    sink: &Sink,
) -> Result<PathBuf> {
    let scans = expand_inputs(inputs)?
        .iter()
        .map(|f| PleScan::from_trace(read_trace(f)?).with_context(|| format!("in {}", f.display())))
        .collect::<Result<Vec<_>>>()?;
    let result = aggregate_ple(&scans, window_fwhm.unwrap_or(cfg.analysis.ple_window_fwhm))?;
    println!(
        "inhomogeneous FWHM {:.3} ± {:.3} GHz",
        result.fwhm_ghz, result.fwhm_uncertainty_ghz
    );
    match format.unwrap_or(Format::Json) {
        Format::Json => sink.json("ple", &result),
        Format::Csv => sink.columns(
            "ple",
            &[
                ("excitation_nm", strings(&result.excitation_nm)),
                ("detuning_ghz", strings(&result.detuning_ghz)),
                ("counts", strings(&result.counts)),
                ("normalized", strings(&result.normalized)),
            ],
        ),
    }
}

#[derive(Debug, Serialize)]
struct SpectrumAnalysis {
    #[serde(flatten)]
    fit: FineStructureFit,
    transverse_ground_ghz: f64,
    transverse_excited_ghz: f64,
}

pub fn analyze_spectrum(cfg: &ProjectConfig, file: &Path, format: Option<Format>, sink: &Sink) -> Result<PathBuf> {
    let trace = read_trace(file)?;
    let fit = fit_fine_structure(&trace)?;
    let levels = cfg.emitter.levels()?;
    let analysis = SpectrumAnalysis {
        transverse_ground_ghz: strain_from_splitting(&levels, Manifold::Ground, fit.delta_gs_ghz)?,
        transverse_excited_ghz: strain_from_splitting(&levels, Manifold::Excited, fit.delta_es_ghz)?,
        fit,
    };
    println!(
        "ground splitting {:.2} GHz, excited splitting {:.2} GHz",
        analysis.fit.delta_gs_ghz, analysis.fit.delta_es_ghz
    );
    emit("fine_structure", &analysis, format, sink)
}

#[derive(Debug, Serialize)]
struct EmitterSummary {
    lines: Vec<EmitterLines>,
    emitter_density_per_cm2: Option<f64>,
    mode_area_um2: f64,
    confocal_area_um2: f64,
    emitters_in_mode: Option<f64>,
    spectrum: Spectrum,
}

#[derive(Debug, Serialize)]
struct EmitterLines {
    class: OrientationClass,
    lines_nm: [f64; 4],
    delta_gs_ghz: f64,
    delta_es_ghz: f64,
    t2_phonon_limit_ns: f64,
}

pub fn emitter_spectrum(cfg: &ProjectConfig, format: Option<Format>, sink: &Sink) -> Result<PathBuf> {
    let e = &cfg.emitter;
    let levels = e.levels()?;
    let spec = e.ensemble()?;
    let strains = e.strain_states()?;
    ensure!(!strains.is_empty(), "emitter.strains is empty");
    let sp = synthesize_zpl_spectrum(&levels, &strains, &spec, &e.grid_nm()?)?;
    match format.unwrap_or(Format::Csv) {
        Format::Csv => sink.columns(
            "zpl_spectrum",
            &[
                ("wavelength_nm", strings(&sp.wavelength_nm)),
                ("intensity", strings(&sp.intensity)),
            ],
        ),
        Format::Json => {
            let geometry = cfg.geometry.geometry()?;
            let area = mode_area(&geometry)?;
            let density = e.density_per_cm2()?;
            let cal = PhononCalibration::placeholder();
            let lines = strains
                .iter()
                .map(|s| {
                    let fs = splittings_from_strain(&levels, s);
                    Ok(EmitterLines {
                        class: s.class,
                        lines_nm: Line::ALL.map(|l| fs.line_nm(l)),
                        delta_gs_ghz: fs.delta_gs_ghz,
                        delta_es_ghz: fs.delta_es_ghz,
                        t2_phonon_limit_ns: t2_phonon_limit(fs.delta_gs_ghz, e.temperature_k, &cal)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let summary = EmitterSummary {
                lines,
                emitter_density_per_cm2: density,
                mode_area_um2: area,
                confocal_area_um2: area_from_waist(confocal_waist(
                    cfg.geometry.wavelength_nm,
                    cfg.geometry.numerical_aperture,
                )?),
                emitters_in_mode: density.map(|d| emitter_count(d, area)).transpose()?,
                spectrum: sp,
            };
            sink.json("zpl_spectrum", &summary)
        }
    }
}

pub fn emitter_linescan(
    cfg: &ProjectConfig,
    strain_map: Option<&Path>,
    format: Option<Format>,
    sink: &Sink,
) -> Result<PathBuf> {
    let e = &cfg.emitter;
    let path = match (strain_map, &e.strain_map) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => cfg.resolve(p),
        (None, None) => bail!("no strain map: pass --strain-map or set emitter.strain_map"),
    };
    let file = File::open(&path).with_context(|| format!("cannot open strain map {}", path.display()))?;
    let field = StrainField::from_csv(BufReader::new(file), e.excited_strain_ratio)
        .with_context(|| format!("cannot read strain map {}", path.display()))?;
    let positions = field.positions_um();
    let (first, last) = (positions[0], positions[positions.len() - 1]);
    let mut route = linear_grid(first, last, e.path_step_um);
    if route.is_empty() {
        route.push(first);
    }
    let scan = synthesize_linescan(&e.levels()?, &field, &route, &e.ensemble()?, &e.grid_nm()?)?;
    match format.unwrap_or(Format::Csv) {
        Format::Json => sink.json("linescan", &scan),
        Format::Csv => sink.write_with("linescan.csv", |w| Ok(scan.write_csv(w)?)),
    }
}
