//! Gaussian-mode geometry of the hemispherical cavity and resonator
//! frequency bookkeeping.

pub mod dispersion;

pub use dispersion::{resonance_dispersion, resonances_at, DispersionOptions, ModeChart, ModeClass, ModePoint};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{consts, Real};

/// Plano-concave cavity. Lengths in µm, wavelength in nm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry<T> {
    pub effective_length_um: T,
    pub roc_x_um: T,
    pub roc_y_um: T,
    pub wavelength_nm: T,
    /// Objective NA used for confocal comparisons.
    pub numerical_aperture: T,
}

impl<T: Real> CavityGeometry<T> {
    pub fn new(
        effective_length_um: T,
        roc_x_um: T,
        roc_y_um: T,
        wavelength_nm: T,
        numerical_aperture: T,
    ) -> Result<Self> {
        let g = Self {
            effective_length_um,
            roc_x_um,
            roc_y_um,
            wavelength_nm,
            numerical_aperture,
        };
        g.validate()?;
        Ok(g)
    }

    /// Rotationally symmetric mirror.
    pub fn spherical(effective_length_um: T, roc_um: T, wavelength_nm: T) -> Result<Self> {
        Self::new(effective_length_um, roc_um, roc_um, wavelength_nm, T::lit(0.55))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength_nm > T::zero()) {
            return Err(Error::InvalidInput("wavelength must be positive".into()));
        }
        if !(self.effective_length_um > T::zero()) {
            return Err(Error::InvalidInput("effective length must be positive".into()));
        }
        let roc = self.roc_x_um.min(self.roc_y_um);
        if !(self.effective_length_um < roc) {
            return Err(Error::Unstable {
                length_um: self.effective_length_um.as_f64(),
                roc_um: roc.as_f64(),
            });
        }
        Ok(())
    }
}

fn waist_for_roc<T: Real>(wavelength_um: T, length_um: T, roc_um: T) -> T {
    (wavelength_um / T::PI()).sqrt() * (length_um * roc_um - length_um * length_um).powf(T::lit(0.25))
}

/// Per-axis waists (µm) for the x and y radii of curvature.
pub fn beam_waist_axes<T: Real>(geometry: &CavityGeometry<T>) -> Result<(T, T)> {
    geometry.validate()?;
    let lambda_um = geometry.wavelength_nm / T::lit(1000.0);
    let l = geometry.effective_length_um;
    Ok((
        waist_for_roc(lambda_um, l, geometry.roc_x_um),
        waist_for_roc(lambda_um, l, geometry.roc_y_um),
    ))
}

/// Scalar waist ω₀ (µm): geometric mean of the per-axis waists.
pub fn beam_waist<T: Real>(geometry: &CavityGeometry<T>) -> Result<T> {
    let (wx, wy) = beam_waist_axes(geometry)?;
    Ok((wx * wy).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeVolume<T> {
    pub cubic_um: T,
    pub cubic_wavelengths: T,
}

/// V = (π/4) L_eff ω₀².
pub fn mode_volume<T: Real>(geometry: &CavityGeometry<T>) -> Result<ModeVolume<T>> {
    let w0 = beam_waist(geometry)?;
    let cubic_um = T::PI() / T::lit(4.0) * geometry.effective_length_um * w0 * w0;
    let lambda_um = geometry.wavelength_nm / T::lit(1000.0);
    Ok(ModeVolume {
        cubic_um,
        cubic_wavelengths: cubic_um / (lambda_um * lambda_um * lambda_um),
    })
}

/// A = π ω₀² / 4 (µm²).
pub fn mode_area<T: Real>(geometry: &CavityGeometry<T>) -> Result<T> {
    let w0 = beam_waist(geometry)?;
    Ok(area_from_waist(w0))
}

pub fn area_from_waist<T: Real>(waist_um: T) -> T {
    T::PI() * waist_um * waist_um / T::lit(4.0)
}

/// Focused confocal spot ω_fs ≈ 2λ/(π NA), in µm.
pub fn confocal_waist<T: Real>(wavelength_nm: T, numerical_aperture: T) -> Result<T> {
    if !(wavelength_nm > T::zero()) || !(numerical_aperture > T::zero() && numerical_aperture <= T::one()) {
        return Err(Error::InvalidInput(format!(
            "need wavelength > 0 and NA in (0, 1], got {wavelength_nm} nm, NA {numerical_aperture}"
        )));
    }
    Ok(T::lit(2.0) * wavelength_nm / T::lit(1000.0) / (T::PI() * numerical_aperture))
}

/// Free spectral range c/(2L) in GHz.
pub fn free_spectral_range_ghz<T: Real>(effective_length_um: T) -> Result<T> {
    if !(effective_length_um > T::zero()) {
        return Err(Error::InvalidInput("cavity length must be positive".into()));
    }
    Ok(consts::c::<T>() / (T::lit(2.0) * effective_length_um * T::lit(1e-6)) / T::lit(1e9))
}

/// Cavity linewidth κ/2π = FSR / F in GHz.
pub fn linewidth_from_finesse<T: Real>(effective_length_um: T, finesse: T) -> Result<T> {
    if !(finesse > T::zero()) {
        return Err(Error::InvalidInput("finesse must be positive".into()));
    }
    Ok(free_spectral_range_ghz(effective_length_um)? / finesse)
}

/// Resonator length L = mλ/2 in µm.
pub fn resonant_length_um<T: Real>(mode_number: u32, wavelength_nm: T) -> T {
    T::from_u32(mode_number).expect("mode number representable") * wavelength_nm / T::lit(2000.0)
}
