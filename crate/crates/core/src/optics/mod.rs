//! Planar multilayer optics at normal incidence: reflectance and
//! transmittance spectra, standing-wave profiles, and ion/field overlap.

pub mod dbr;
pub mod field;
pub mod layer;
pub mod overlap;
pub mod transfer;

pub use dbr::{design_quarter_wave_dbr, membrane_on_mirror, DbrDesign, HybridCavity, Membrane, QuarterWaveDesign};
pub use field::{field_profile, DepthDirection, FieldProfile, ProfileOptions};
pub use layer::{IndexModel, IndexSample, LayerStack, OpticalLayer};
pub use overlap::{field_overlap, DepthDistribution, OverlapResult};
pub use transfer::{linear_grid, spectrum, stack_response, Response, SpectralResponse, StackField};
