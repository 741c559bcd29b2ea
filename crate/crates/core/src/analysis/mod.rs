//! Ingestion and fitting of measured scans: finesse, emitter losses,
//! lifetimes, PLE line shapes and fine structure.

mod absorption;
mod fit;
mod lifetime;
mod ple;
mod resonance;
mod spectral;
pub mod synth;
mod trace;

pub use absorption::{
    emitter_loss_ppm, ensemble_cross_section_cm2, single_cross_section_cm2, thickness_from_fringes_nm,
};
pub use fit::EVALUATIONS_PER_PARAMETER;
pub use lifetime::{fit_lifetime, fit_lifetime_with_guard, LifetimeFit, GUARD_SAMPLES};
pub use ple::{aggregate_ple, ple_window_sums, PleResult, PleScan, GAUSSIAN_FWHM_PER_SIGMA};
pub use resonance::{extract_finesse, fit_lorentzian, FinesseResult, ResonanceFit};
pub use spectral::{fit_fine_structure, FineStructureFit};
pub use trace::{AbscissaUnit, Channel, ScanTrace, TraceMeta, MIN_SAMPLES};
