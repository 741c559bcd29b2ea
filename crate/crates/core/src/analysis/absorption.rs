use crate::error::{Error, Result};
use crate::scalar::Real;

/// Round-trip loss added by emitters, L = π(1/F_emitters − 1/F_bare), in ppm.
pub fn emitter_loss_ppm<T: Real>(finesse_with_emitters: T, finesse_bare: T) -> Result<T> {
    if !(finesse_with_emitters > T::one() && finesse_bare > T::one()) {
        return Err(Error::InvalidInput("finesse values must exceed 1".into()));
    }
    if finesse_with_emitters > finesse_bare {
        return Err(Error::NegativeAbsorption {
            with_emitters: finesse_with_emitters.as_f64(),
            bare: finesse_bare.as_f64(),
        });
    }
    Ok(T::PI() * (T::one() / finesse_with_emitters - T::one() / finesse_bare) * T::lit(1e6))
}

/// σ_ens = L·A in cm², with A in µm².
pub fn ensemble_cross_section_cm2<T: Real>(loss_ppm: T, mode_area_um2: T) -> Result<T> {
    if !(loss_ppm >= T::zero() && mode_area_um2 > T::zero()) {
        return Err(Error::InvalidInput("need loss >= 0 and positive mode area".into()));
    }
    Ok(loss_ppm * T::lit(1e-6) * mode_area_um2 * T::lit(1e-8))
}

/// σ_single = σ_ens / N.
pub fn single_cross_section_cm2<T: Real>(ensemble_cm2: T, emitters: T) -> Result<T> {
    if !(emitters > T::zero()) {
        return Err(Error::InvalidInput("emitter number must be positive".into()));
    }
    Ok(ensemble_cm2 / emitters)
}

/// Thickness change for a number of interference fringes, N·λ/(2n).
pub fn thickness_from_fringes_nm<T: Real>(fringes: T, wavelength_nm: T, refractive_index: T) -> Result<T> {
    if !(wavelength_nm > T::zero() && refractive_index > T::zero()) {
        return Err(Error::InvalidInput("wavelength and index must be positive".into()));
    }
    Ok(fringes * wavelength_nm / (T::lit(2.0) * refractive_index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_finesse_means_no_loss() {
        assert_eq!(emitter_loss_ppm(820.0_f64, 820.0).unwrap(), 0.0);
        assert!(matches!(
            emitter_loss_ppm(900.0_f64, 820.0),
            Err(Error::NegativeAbsorption { .. })
        ));
        assert!(emitter_loss_ppm(0.5_f64, 820.0).is_err());
    }

    #[test]
    fn single_emitter_limit() {
        assert_eq!(single_cross_section_cm2(5.3e-11_f64, 1.0).unwrap(), 5.3e-11);
        assert!(single_cross_section_cm2(5.3e-11_f64, 0.0).is_err());
        assert_eq!(thickness_from_fringes_nm(0.0_f64, 737.0, 2.417).unwrap(), 0.0);
    }
}
