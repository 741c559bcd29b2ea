//! Group-IV colour-centre fine structure under strain and ensemble spectra.

mod coherence;
mod levels;
mod spectrum;
pub mod voigt;

pub use coherence::{density_from_fluence, emitter_count, phonon_occupation, t2_phonon_limit, PhononCalibration};
pub use levels::{
    splittings_from_strain, strain_from_splitting, FineStructure, GroupIVLevels, Line, Manifold, OrientationClass,
    StrainProjection, StrainState, StrainSusceptibility, StrainTensor,
};
pub use spectrum::{
    line_weights, synthesize_linescan, synthesize_zpl_spectrum, EnsembleSpec, LineContribution, LineScan, Spectrum,
    StrainField, StrainNode,
};
