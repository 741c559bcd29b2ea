//! Open Fabry-Perot microcavities with a colour-centre-doped diamond membrane:
//! layered optics, cavity mode geometry, emitter fine structure, cavity-QED
//! figures of merit and analysis of measured scans.
//!
//! Every routine is generic over the scalar through [`Real`]; the aliases at
//! the crate root fix it to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cqed;
pub mod emitter;
pub mod error;
pub mod geometry;
pub mod optics;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub use analysis::{
    aggregate_ple, emitter_loss_ppm, ensemble_cross_section_cm2, extract_finesse, fit_fine_structure, fit_lifetime,
    fit_lorentzian, single_cross_section_cm2, thickness_from_fringes_nm, AbscissaUnit, Channel, TraceMeta,
};
pub use cqed::{
    cooperativity_from_coupling, coupling_from_cooperativity, finesse_from_losses, purcell_effective,
    purcell_theoretical, quality_factor, GammaConvention,
};
pub use emitter::{
    density_from_fluence, emitter_count, splittings_from_strain, strain_from_splitting, synthesize_linescan,
    synthesize_zpl_spectrum, t2_phonon_limit, Line, Manifold, OrientationClass,
};
pub use geometry::{
    beam_waist, confocal_waist, free_spectral_range_ghz, linewidth_from_finesse, mode_area, mode_volume,
    resonance_dispersion, ModeClass,
};
pub use optics::{
    design_quarter_wave_dbr, field_overlap, field_profile, linear_grid, membrane_on_mirror, spectrum, stack_response,
    DepthDirection,
};

pub type OpticalLayer = optics::OpticalLayer<f64>;
pub type LayerStack = optics::LayerStack<f64>;
pub type Response = optics::Response<f64>;
pub type SpectralResponse = optics::SpectralResponse<f64>;
pub type StackField = optics::StackField<f64>;
pub type QuarterWaveDesign = optics::QuarterWaveDesign<f64>;
pub type DbrDesign = optics::DbrDesign<f64>;
pub type Membrane = optics::Membrane<f64>;
pub type HybridCavity = optics::HybridCavity<f64>;
pub type ProfileOptions = optics::ProfileOptions<f64>;
pub type FieldProfile = optics::FieldProfile<f64>;
pub type DepthDistribution = optics::DepthDistribution<f64>;
pub type OverlapResult = optics::OverlapResult<f64>;

pub type CavityGeometry = geometry::CavityGeometry<f64>;
pub type ModeVolume = geometry::ModeVolume<f64>;
pub type ModePoint = geometry::ModePoint<f64>;
pub type ModeChart = geometry::ModeChart<f64>;
pub type DispersionOptions = geometry::DispersionOptions<f64>;

pub type GroupIVLevels = emitter::GroupIVLevels<f64>;
pub type StrainState = emitter::StrainState<f64>;
pub type FineStructure = emitter::FineStructure<f64>;
pub type EnsembleSpec = emitter::EnsembleSpec<f64>;
pub type Spectrum = emitter::Spectrum<f64>;
pub type StrainField = emitter::StrainField<f64>;
pub type LineScan = emitter::LineScan<f64>;
pub type PhononCalibration = emitter::PhononCalibration<f64>;

pub type Enhancement = cqed::Enhancement<f64>;
pub type ReportInputs = cqed::ReportInputs<f64>;
pub type CqedReport = cqed::CqedReport<f64>;

pub type ScanTrace = analysis::ScanTrace<f64>;
pub type ResonanceFit = analysis::ResonanceFit<f64>;
pub type FinesseResult = analysis::FinesseResult<f64>;
pub type LifetimeFit = analysis::LifetimeFit<f64>;
pub type PleScan = analysis::PleScan<f64>;
pub type PleResult = analysis::PleResult<f64>;
pub type FineStructureFit = analysis::FineStructureFit<f64>;
