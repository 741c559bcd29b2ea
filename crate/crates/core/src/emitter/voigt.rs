//! Normalised Voigt profile via Weideman's rational approximation of the
//! Faddeeva function.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::scalar::Real;

const TERMS: usize = 32;

struct Weideman {
    l: f64,
    coeffs: [f64; TERMS],
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let m = 2 * TERMS;
        let l = (TERMS as f64 / 2f64.sqrt()).sqrt();
        // f(θ_k) on the 2M-point circle; the k = -M sample (t → ∞) is zero.
        let samples: Vec<f64> = (0..2 * m)
            .map(|j| {
                let k = if j < m { j as f64 } else { j as f64 - 2.0 * m as f64 };
                if k == -(m as f64) {
                    return 0.0;
                }
                let theta = k * std::f64::consts::PI / m as f64;
                let t = l * (theta / 2.0).tan();
                (-t * t).exp() * (l * l + t * t)
            })
            .collect();
        let mut coeffs = [0.0; TERMS];
        for (n, c) in coeffs.iter_mut().enumerate() {
            let n = n + 1;
            let sum: f64 = samples
                .iter()
                .enumerate()
                .map(|(j, f)| f * (std::f64::consts::PI * (j * n) as f64 / m as f64).cos())
                .sum();
            *c = sum / (2 * m) as f64;
        }
        Weideman { l, coeffs }
    })
}

/// w(z) = exp(−z²) erfc(−iz) for Im z ≥ 0.
pub fn faddeeva<T: Real>(z: Complex<T>) -> Complex<T> {
    let table = weideman();
    let l = T::lit(table.l);
    let i = Complex::new(T::zero(), T::one());
    let denom = Complex::new(l, T::zero()) - i * z;
    let zz = (Complex::new(l, T::zero()) + i * z) / denom;
    let mut p = Complex::new(T::zero(), T::zero());
    for &c in table.coeffs.iter().rev() {
        p = p * zz + Complex::new(T::lit(c), T::zero());
    }
    let inv_sqrt_pi = T::one() / T::PI().sqrt();
    p * T::lit(2.0) / (denom * denom) + Complex::new(inv_sqrt_pi, T::zero()) / denom
}

/// Unit-area Voigt density at offset `x` for Gaussian standard deviation
/// `sigma` and Lorentzian half width `gamma` (same units as `x`).
pub fn voigt<T: Real>(x: T, sigma: T, gamma: T) -> T {
    let pi = T::PI();
    if sigma <= T::zero() {
        return gamma / (pi * (x * x + gamma * gamma));
    }
    let s2 = sigma * T::lit(2.0).sqrt();
    if gamma <= T::zero() {
        let u = x / s2;
        return (-u * u).exp() / (s2 * pi.sqrt());
    }
    faddeeva(Complex::new(x / s2, gamma / s2)).re / (sigma * (T::two_pi()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(x: f64, sigma: f64, gamma: f64) -> f64 {
        // Direct convolution on a grid much finer than either width.
        let h = sigma.min(gamma) / 200.0;
        let span = 12.0 * sigma;
        let n = (2.0 * span / h) as i64;
        let mut s = 0.0;
        for k in 0..=n {
            let u = -span + k as f64 * h;
            let g = (-(u * u) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
            let l = gamma / (std::f64::consts::PI * ((x - u).powi(2) + gamma * gamma));
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            s += w * g * l;
        }
        s * h
    }

    #[test]
    fn matches_direct_convolution() {
        for &(sigma, gamma) in &[(1.0, 0.05), (1.0, 1.0), (0.3, 2.0), (2.0, 0.4)] {
            for &x in &[0.0, 0.3, 1.0, 2.5, 5.0] {
                let v = voigt(x, sigma, gamma);
                let b = brute(x, sigma, gamma);
                assert!(
                    ((v - b) / b).abs() < 1e-6,
                    "sigma {sigma} gamma {gamma} x {x}: {v} vs {b}"
                );
            }
        }
    }

    #[test]
    fn limits() {
        assert!((voigt(0.0, 0.0, 1.0) - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        let g = voigt(0.0, 1.0, 0.0);
        assert!((g - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        let near_gauss = voigt(0.5, 1.0, 1e-9);
        let gauss = (-0.125f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((near_gauss - gauss).abs() < 1e-8);
    }
}
