//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All physics is written against [`Real`], which is satisfied by `f32` and
//! `f64`. Unit conversions and physical constants are exposed as generic
//! helpers so the same code path serves both precisions.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Conversion from a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    /// Widening conversion for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// CODATA exact SI constants.
pub mod consts {
    use super::Real;

    /// Speed of light in vacuum (m/s).
    pub fn c<T: Real>() -> T {
        T::lit(299_792_458.0)
    }

    /// Planck constant (J s).
    pub fn h<T: Real>() -> T {
        T::lit(6.626_070_15e-34)
    }

    /// Boltzmann constant (J/K).
    pub fn k_b<T: Real>() -> T {
        T::lit(1.380_649e-23)
    }

    /// h / k_B in kelvin per hertz, so that `h_over_kb * f` is a temperature.
    pub fn h_over_kb<T: Real>() -> T {
        T::lit(6.626_070_15e-34 / 1.380_649e-23)
    }
}

/// Frequency (THz) of light with vacuum wavelength `wavelength_nm`.
pub fn nm_to_thz<T: Real>(wavelength_nm: T) -> T {
    consts::c::<T>() / (wavelength_nm * T::lit(1e-9)) * T::lit(1e-12)
}

/// Vacuum wavelength (nm) of light at `frequency_thz`.
pub fn thz_to_nm<T: Real>(frequency_thz: T) -> T {
    consts::c::<T>() / (frequency_thz * T::lit(1e12)) * T::lit(1e9)
}

/// Wavelength interval (nm) spanned by a frequency interval `delta_ghz` at
/// `wavelength_nm`, to first order: Δλ = λ²Δν/c.
pub fn ghz_interval_to_nm<T: Real>(delta_ghz: T, wavelength_nm: T) -> T {
    let lambda_m = wavelength_nm * T::lit(1e-9);
    lambda_m * lambda_m * delta_ghz * T::lit(1e9) / consts::c::<T>() * T::lit(1e9)
}

/// Median of a slice (NaN-free input assumed); `None` for an empty slice.
pub(crate) fn median<T: Real>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wavelength_frequency_round_trip() {
        let f = nm_to_thz(737.0_f64);
        assert_relative_eq!(f, 406.7736, epsilon = 1e-3);
        assert_relative_eq!(thz_to_nm(f), 737.0, epsilon = 1e-10);
    }

    #[test]
    fn splitting_to_wavelength_interval() {
        // 528 GHz at 737 nm is just under 1 nm.
        let d = ghz_interval_to_nm(528.0_f64, 737.0);
        assert!((d - 0.956).abs() < 1e-3, "{d}");
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0_f64, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0_f64, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median::<f64>(&[]), None);
    }

    #[test]
    fn single_precision_helpers() {
        let f = nm_to_thz(737.0_f32);
        assert!((f - 406.77).abs() < 0.01);
    }
}
