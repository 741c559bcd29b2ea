//! Project configuration. Every quantity carries its unit in the key name and
//! unknown keys are rejected, so a unitless `"wavelength": 737` fails to load.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use microcavity::cqed::GammaConvention;
use microcavity::{
    design_quarter_wave_dbr, CavityGeometry, DispersionOptions, EnsembleSpec, GroupIVLevels, LayerStack, Membrane,
    OpticalLayer, OrientationClass, QuarterWaveDesign, StrainState,
};
use num_complex::Complex;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectConfig {
    pub stack: StackSource,
    pub membrane: Option<MembraneConfig>,
    pub optics: OpticsConfig,
    pub geometry: GeometryConfig,
    pub dispersion: DispersionConfig,
    pub emitter: EmitterConfig,
    pub report: ReportConfig,
    pub analysis: AnalysisConfig,
    pub output_dir: Option<PathBuf>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        Self {
            stack: StackSource::Inline(StackSpec::default()),
            membrane: Some(MembraneConfig::default()),
            optics: OpticsConfig::default(),
            geometry: GeometryConfig::default(),
            dispersion: DispersionConfig::default(),
            emitter: EmitterConfig::default(),
            report: ReportConfig::default(),
            analysis: AnalysisConfig::default(),
            output_dir: None,
            base_dir: PathBuf::from("."),
        }
    }
}

/// Either `{"file": "mirror.json"}` or an inline stack description.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StackSource {
    File { file: PathBuf },
    Inline(StackSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StackSpec {
    /// `air | (H L)^N | substrate`; `pairs` fixed or chosen for `max_transmission`.
    QuarterWaveDbr {
        n_high: f64,
        n_low: f64,
        n_substrate: f64,
        design_wavelength_nm: f64,
        #[serde(default)]
        pairs: Option<usize>,
        #[serde(default = "default_max_transmission")]
        max_transmission: f64,
    },
    /// Explicit layers between two semi-infinite media.
    Layers {
        incidence_index: f64,
        layers: Vec<LayerSpec>,
        exit_index: f64,
        #[serde(default)]
        exit_extinction: f64,
        #[serde(default)]
        label: Option<String>,
    },
}

fn default_max_transmission() -> f64 {
    1e-3
}

impl Default for StackSpec {
    fn default() -> Self {
        StackSpec::QuarterWaveDbr {
            n_high: 2.1,
            n_low: 1.45,
            n_substrate: 1.45,
            design_wavelength_nm: 737.0,
            pairs: None,
            max_transmission: default_max_transmission(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub index: f64,
    #[serde(default)]
    pub extinction: f64,
    pub thickness_nm: f64,
}

impl StackSpec {
    pub fn build(&self) -> Result<LayerStack> {
        match *self {
            StackSpec::QuarterWaveDbr {
                n_high,
                n_low,
                n_substrate,
                design_wavelength_nm,
                pairs,
                max_transmission,
            } => {
                let design = QuarterWaveDesign::new(n_high, n_low, n_substrate, design_wavelength_nm);
                Ok(match pairs {
                    Some(n) => design.stack(n)?,
                    None => design_quarter_wave_dbr(design, max_transmission)?.stack,
                })
            }
            StackSpec::Layers {
                incidence_index,
                ref layers,
                exit_index,
                exit_extinction,
                ref label,
            } => {
                let mut all = vec![OpticalLayer::semi_infinite_dielectric(incidence_index)];
                all.extend(
                    layers
                        .iter()
                        .map(|l| OpticalLayer::new(Complex::new(l.index, l.extinction), l.thickness_nm)),
                );
                all.push(OpticalLayer::semi_infinite(Complex::new(exit_index, exit_extinction)));
                Ok(LayerStack::new(all, label.clone().unwrap_or_else(|| "stack".into()))?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MembraneConfig {
    pub index: f64,
    pub thickness_nm: f64,
    pub bonding_gap_nm: f64,
}

impl Default for MembraneConfig {
    fn default() -> Self {
        Self {
            index: 2.417,
            thickness_nm: 3000.0,
            bonding_gap_nm: 0.0,
        }
    }
}

impl MembraneConfig {
    pub fn membrane(&self) -> Membrane {
        Membrane {
            index: self.index,
            thickness_nm: self.thickness_nm,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticsConfig {
    pub spectrum_start_nm: f64,
    pub spectrum_stop_nm: f64,
    pub spectrum_step_nm: f64,
    pub field_wavelength_nm: f64,
    pub field_step_nm: f64,
    pub implantation_lower_nm: f64,
    pub implantation_upper_nm: f64,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        Self {
            spectrum_start_nm: 550.0,
            spectrum_stop_nm: 850.0,
            spectrum_step_nm: 0.5,
            field_wavelength_nm: 737.0,
            field_step_nm: 0.5,
            implantation_lower_nm: 25.0,
            implantation_upper_nm: 75.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub effective_length_um: f64,
    pub roc_x_um: f64,
    pub roc_y_um: f64,
    pub wavelength_nm: f64,
    pub numerical_aperture: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            effective_length_um: 10.7,
            roc_x_um: 20.3,
            roc_y_um: 20.3,
            wavelength_nm: 737.0,
            numerical_aperture: 0.55,
        }
    }
}

impl GeometryConfig {
    pub fn geometry(&self) -> Result<CavityGeometry> {
        Ok(CavityGeometry::new(
            self.effective_length_um,
            self.roc_x_um,
            self.roc_y_um,
            self.wavelength_nm,
            self.numerical_aperture,
        )?)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub wavelength_start_nm: f64,
    pub wavelength_stop_nm: f64,
    pub wavelength_step_nm: f64,
    pub gap_min_nm: f64,
    pub gap_max_nm: f64,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            wavelength_start_nm: 720.0,
            wavelength_stop_nm: 770.0,
            wavelength_step_nm: 1.0,
            gap_min_nm: 2500.0,
            gap_max_nm: 4500.0,
        }
    }
}

impl DispersionConfig {
    pub fn options(&self) -> DispersionOptions {
        DispersionOptions::new(
            (self.wavelength_start_nm, self.wavelength_stop_nm),
            self.wavelength_step_nm,
            (self.gap_min_nm, self.gap_max_nm),
        )
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrainConfig {
    pub class: u8,
    #[serde(default)]
    pub axial_shift_ghz: f64,
    #[serde(default)]
    pub transverse_ground_ghz: f64,
    /// Defaults to `excited_strain_ratio × transverse_ground_ghz`.
    #[serde(default)]
    pub transverse_excited_ghz: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmitterConfig {
    pub c_line_thz: Option<f64>,
    pub spin_orbit_ground_ghz: Option<f64>,
    pub spin_orbit_excited_ghz: Option<f64>,
    pub homogeneous_linewidth_mhz: f64,
    pub inhomogeneous_sigma_ghz: f64,
    pub temperature_k: f64,
    pub class_mix: f64,
    pub broadening_mhz_per_k3: f64,
    pub line_amplitudes: [f64; 4],
    pub fluence_per_cm2: Option<f64>,
    pub conversion_yield: Option<f64>,
    pub emitter_density_per_cm2: Option<f64>,
    pub excited_strain_ratio: f64,
    pub strains: Vec<StrainConfig>,
    pub strain_map: Option<PathBuf>,
    pub path_step_um: f64,
    pub spectrum_start_nm: f64,
    pub spectrum_stop_nm: f64,
    pub spectrum_step_nm: f64,
}

impl Default for EmitterConfig {
    fn default() -> Self {
        Self {
            c_line_thz: None,
            spin_orbit_ground_ghz: None,
            spin_orbit_excited_ghz: None,
            homogeneous_linewidth_mhz: 100.0,
            inhomogeneous_sigma_ghz: 5.0,
            temperature_k: 4.0,
            class_mix: 0.5,
            broadening_mhz_per_k3: 0.1,
            line_amplitudes: [1.0; 4],
            fluence_per_cm2: None,
            conversion_yield: None,
            emitter_density_per_cm2: None,
            excited_strain_ratio: 2.0,
            strains: vec![
                StrainConfig {
                    class: 1,
                    axial_shift_ghz: 0.0,
                    transverse_ground_ghz: 0.0,
                    transverse_excited_ghz: None,
                },
                StrainConfig {
                    class: 2,
                    axial_shift_ghz: 0.0,
                    transverse_ground_ghz: 0.0,
                    transverse_excited_ghz: None,
                },
            ],
            strain_map: None,
            path_step_um: 1.0,
            spectrum_start_nm: 735.5,
            spectrum_stop_nm: 738.5,
            spectrum_step_nm: 0.002,
        }
    }
}

impl EmitterConfig {
    pub fn levels(&self) -> Result<GroupIVLevels> {
        let siv = GroupIVLevels::silicon_vacancy();
        Ok(GroupIVLevels::new(
            self.c_line_thz.unwrap_or(siv.c_line_thz),
            self.spin_orbit_ground_ghz.unwrap_or(siv.spin_orbit_ground_ghz),
            self.spin_orbit_excited_ghz.unwrap_or(siv.spin_orbit_excited_ghz),
        )?)
    }

    pub fn ensemble(&self) -> Result<EnsembleSpec> {
        let mut spec = EnsembleSpec::new(
            self.homogeneous_linewidth_mhz,
            self.inhomogeneous_sigma_ghz,
            self.temperature_k,
        );
        spec.class_mix = self.class_mix;
        spec.broadening_mhz_per_k3 = self.broadening_mhz_per_k3;
        spec.line_amplitudes = self.line_amplitudes;
        spec.emitter_density_per_cm2 = self.density_per_cm2()?.unwrap_or(0.0);
        spec.validate()?;
        Ok(spec)
    }

    /// Explicit density, else fluence × yield.
    pub fn density_per_cm2(&self) -> Result<Option<f64>> {
        match (
            self.emitter_density_per_cm2,
            self.fluence_per_cm2,
            self.conversion_yield,
        ) {
            (Some(d), _, _) => Ok(Some(d)),
            (None, Some(f), Some(y)) => Ok(Some(microcavity::density_from_fluence(f, y)?)),
            (None, Some(_), None) | (None, None, Some(_)) => {
                bail!("emitter.fluence_per_cm2 and emitter.conversion_yield must be given together")
            }
            (None, None, None) => Ok(None),
        }
    }

    pub fn strain_states(&self) -> Result<Vec<StrainState>> {
        self.strains
            .iter()
            .map(|s| {
                let class = OrientationClass::try_from(s.class)?;
                let excited = s
                    .transverse_excited_ghz
                    .unwrap_or(self.excited_strain_ratio * s.transverse_ground_ghz);
                Ok(StrainState::new(
                    s.axial_shift_ghz,
                    s.transverse_ground_ghz,
                    excited,
                    class,
                )?)
            })
            .collect()
    }

    pub fn grid_nm(&self) -> Result<Vec<f64>> {
        range_grid(
            self.spectrum_start_nm,
            self.spectrum_stop_nm,
            self.spectrum_step_nm,
            "emitter spectrum",
        )
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    pub mode_number: u32,
    pub mirror_transmission_ppm: [f64; 2],
    pub finesse_experimental: f64,
    pub tau_free_ns: f64,
    pub tau_cavity_ns: f64,
    pub refractive_index: f64,
    /// Required: no default exists.
    pub branching_ratio: Option<f64>,
    pub gamma_convention: GammaConvention,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            mode_number: 29,
            mirror_transmission_ppm: [1000.0, 1000.0],
            finesse_experimental: 820.0,
            tau_free_ns: 1.72,
            tau_cavity_ns: 0.78,
            refractive_index: 2.417,
            branching_ratio: None,
            gamma_convention: GammaConvention::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub wavelength_nm: f64,
    pub pulse_end_ns: Option<f64>,
    pub guard_samples: usize,
    pub ple_window_fwhm: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            wavelength_nm: 737.0,
            pulse_end_ns: None,
            guard_samples: microcavity::analysis::GUARD_SAMPLES,
            ple_window_fwhm: 1.0,
        }
    }
}

/// Inclusive grid, rejecting empty or reversed ranges up front.
pub fn range_grid(start: f64, stop: f64, step: f64, what: &str) -> Result<Vec<f64>> {
    ensure!(
        start.is_finite() && stop.is_finite() && start < stop,
        "empty {what} range [{start}, {stop}] nm"
    );
    ensure!(
        step > 0.0 && step.is_finite(),
        "{what} step must be positive, got {step}"
    );
    Ok(microcavity::linear_grid(start, stop, step))
}

impl ProjectConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: ProjectConfig =
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn validate(&self) -> Result<()> {
        if let StackSource::File { file } = &self.stack {
            let path = self.resolve(file);
            ensure!(path.is_file(), "stack file {} does not exist", path.display());
        }
        if let Some(map) = &self.emitter.strain_map {
            let path = self.resolve(map);
            ensure!(path.is_file(), "strain map {} does not exist", path.display());
        }
        if let Some(m) = &self.membrane {
            ensure!(m.index >= 1.0, "membrane.index must be >= 1, got {}", m.index);
            ensure!(m.thickness_nm > 0.0, "membrane.thickness_nm must be positive");
            ensure!(m.bonding_gap_nm >= 0.0, "membrane.bonding_gap_nm must be >= 0");
        }
        let o = &self.optics;
        ensure!(o.field_step_nm > 0.0, "optics.field_step_nm must be positive");
        ensure!(
            o.field_wavelength_nm > 0.0,
            "optics.field_wavelength_nm must be positive"
        );
        ensure!(
            o.implantation_upper_nm > o.implantation_lower_nm && o.implantation_lower_nm >= 0.0,
            "optics implantation window must satisfy 0 <= lower < upper"
        );
        ensure!(self.emitter.path_step_um > 0.0, "emitter.path_step_um must be positive");
        ensure!(
            self.emitter.excited_strain_ratio >= 0.0,
            "emitter.excited_strain_ratio must be >= 0"
        );
        if let Some(xi) = self.report.branching_ratio {
            ensure!(
                xi > 0.0 && xi <= 1.0,
                "report.branching_ratio must lie in (0, 1], got {xi}"
            );
        }
        ensure!(
            self.analysis.wavelength_nm > 0.0,
            "analysis.wavelength_nm must be positive"
        );
        ensure!(
            self.analysis.ple_window_fwhm > 0.0,
            "analysis.ple_window_fwhm must be positive"
        );
        Ok(())
    }

    pub fn stack_spec(&self) -> Result<StackSpec> {
        match &self.stack {
            StackSource::Inline(spec) => Ok(spec.clone()),
            StackSource::File { file } => {
                let path = self.resolve(file);
                let text =
                    fs::read_to_string(&path).with_context(|| format!("cannot read stack file {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("invalid stack file {}", path.display()))
            }
        }
    }

    /// The mirror as seen from air.
    pub fn mirror(&self) -> Result<LayerStack> {
        self.stack_spec()?.build()
    }
}
