use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{consts, Real};

/// Calibration of the one-phonon T₂ estimate T₂ = K / (Δ³ n̄).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhononCalibration<T> {
    /// K in ns·GHz³.
    pub k_ns_ghz3: T,
    /// Value returned once T₂ exceeds this or diverges.
    pub cap_ns: T,
}

impl<T: Real> PhononCalibration<T> {
    /// Placeholder: K chosen so that Δ = 48 GHz at 4 K gives T₂ ≈ 50 ns.
    /// Not a fitted value.
    pub fn placeholder() -> Self {
        Self {
            k_ns_ghz3: T::lit(7.1e6),
            cap_ns: T::lit(1e15),
        }
    }
}

/// Bose-Einstein occupation at frequency `delta_ghz` and temperature `temperature_k`.
pub fn phonon_occupation<T: Real>(delta_ghz: T, temperature_k: T) -> T {
    let x = consts::h_over_kb::<T>() * delta_ghz * T::lit(1e9) / temperature_k;
    T::one() / x.exp_m1()
}

/// Order-of-magnitude T₂ (ns) set by a direct phonon process between the ground branches.
pub fn t2_phonon_limit<T: Real>(delta_gs_ghz: T, temperature_k: T, cal: &PhononCalibration<T>) -> Result<T> {
    if !(delta_gs_ghz > T::zero() && temperature_k >= T::zero() && cal.k_ns_ghz3 > T::zero() && cal.cap_ns > T::zero())
    {
        return Err(Error::InvalidInput(
            "need splitting > 0, temperature >= 0 and positive calibration".into(),
        ));
    }
    if temperature_k == T::zero() {
        return Ok(cal.cap_ns);
    }
    let x = consts::h_over_kb::<T>() * delta_gs_ghz * T::lit(1e9) / temperature_k;
    let t2 = cal.k_ns_ghz3 * x.exp_m1() / delta_gs_ghz.powi(3);
    Ok(if t2.is_finite() && t2 < cal.cap_ns {
        t2
    } else {
        cal.cap_ns
    })
}

/// Emitters within `area_um2` at areal density `density_per_cm2`.
pub fn emitter_count<T: Real>(density_per_cm2: T, area_um2: T) -> Result<T> {
    if !(density_per_cm2 >= T::zero() && area_um2 >= T::zero()) {
        return Err(Error::InvalidInput("density and area must be >= 0".into()));
    }
    Ok(density_per_cm2 * area_um2 * T::lit(1e-8))
}

/// Areal emitter density from implantation fluence and conversion yield.
pub fn density_from_fluence<T: Real>(fluence_per_cm2: T, conversion_yield: T) -> Result<T> {
    if !(fluence_per_cm2 >= T::zero()) {
        return Err(Error::InvalidInput("fluence must be >= 0".into()));
    }
    if !(conversion_yield >= T::zero() && conversion_yield <= T::one()) {
        return Err(Error::InvalidInput(format!(
            "yield must lie in [0, 1], got {conversion_yield}"
        )));
    }
    Ok(fluence_per_cm2 * conversion_yield)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_temperature_hits_cap() {
        let cal = PhononCalibration::<f64>::placeholder();
        assert_eq!(t2_phonon_limit(48.0, 0.0, &cal).unwrap(), cal.cap_ns);
        assert_eq!(t2_phonon_limit(48.0, 1e-3, &cal).unwrap(), cal.cap_ns);
    }

    #[test]
    fn placeholder_scale() {
        let t2 = t2_phonon_limit(48.0, 4.0, &PhononCalibration::<f64>::placeholder()).unwrap();
        assert!((t2 - 50.0).abs() < 2.0, "{t2}");
    }

    #[test]
    fn counting() {
        assert_eq!(emitter_count(3e10, 0.0).unwrap(), 0.0);
        assert!((density_from_fluence(3e11_f64, 0.1).unwrap() - 3e10).abs() < 1.0);
        assert!(density_from_fluence(3e11, 1.5).is_err());
    }
}
