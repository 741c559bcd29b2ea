use serde::Serialize;

use super::field::FieldProfile;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance on the unit normalisation of a depth density.
pub const NORMALISATION_TOLERANCE: f64 = 1e-6;

/// Probability density of implanted ions (1/nm) on an ascending depth grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthDistribution<T> {
    depth_nm: Vec<T>,
    density: Vec<T>,
}

fn trapezoid<T: Real>(x: &[T], y: &[T]) -> T {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| (xw[1] - xw[0]) * (yw[0] + yw[1]) / T::lit(2.0))
        .sum()
}

impl<T: Real> DepthDistribution<T> {
    /// Validates ascending depths, non-negative density and unit integral.
    pub fn new(depth_nm: Vec<T>, density: Vec<T>) -> Result<Self> {
        if depth_nm.len() != density.len() || depth_nm.len() < 2 {
            return Err(Error::InvalidInput(
                "depth distribution needs at least two (depth, density) pairs".into(),
            ));
        }
        if depth_nm.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("depth grid must be strictly ascending".into()));
        }
        if density.iter().any(|&d| !(d >= T::zero()) || !d.is_finite()) {
            return Err(Error::InvalidInput("density must be finite and non-negative".into()));
        }
        let total = trapezoid(&depth_nm, &density);
        if (total - T::one()).abs() > T::lit(NORMALISATION_TOLERANCE) {
            return Err(Error::InvalidInput(format!(
                "density integrates to {total}, expected 1"
            )));
        }
        Ok(Self { depth_nm, density })
    }

    /// Rescales arbitrary non-negative weights to unit integral.
    pub fn normalized(depth_nm: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if depth_nm.len() != weights.len() || depth_nm.len() < 2 {
            return Err(Error::InvalidInput("mismatched depth/weight lengths".into()));
        }
        let total = trapezoid(&depth_nm, &weights);
        if !(total > T::zero()) {
            return Err(Error::InvalidInput("weights integrate to zero".into()));
        }
        Self::new(depth_nm, weights.into_iter().map(|w| w / total).collect())
    }

    /// Uniform density on `[lo, hi]` sampled every `step_nm`.
    pub fn uniform(lo: T, hi: T, step_nm: T) -> Result<Self> {
        if !(hi > lo && step_nm > T::zero()) {
            return Err(Error::InvalidInput("uniform range needs hi > lo and step > 0".into()));
        }
        let n = ((hi - lo) / step_nm).ceil().to_usize().unwrap_or(1).max(1);
        let dx = (hi - lo) / T::from_count(n);
        let depth: Vec<T> = (0..=n).map(|i| lo + dx * T::from_count(i)).collect();
        let density = vec![T::one() / (hi - lo); depth.len()];
        Self::new(depth, density)
    }

    /// Gaussian of mean `mean_nm` and deviation `sigma_nm`, sampled over ±6σ
    /// (clipped at depth 0) and renormalised.
    pub fn gaussian(mean_nm: T, sigma_nm: T, step_nm: T) -> Result<Self> {
        if !(sigma_nm > T::zero() && step_nm > T::zero()) {
            return Err(Error::InvalidInput("sigma and step must be positive".into()));
        }
        let six = T::lit(6.0);
        let lo = (mean_nm - six * sigma_nm).max(T::zero());
        let hi = mean_nm + six * sigma_nm;
        let n = ((hi - lo) / step_nm).ceil().to_usize().unwrap_or(1).max(2);
        let dx = (hi - lo) / T::from_count(n);
        let depth: Vec<T> = (0..=n).map(|i| lo + dx * T::from_count(i)).collect();
        let weights = depth
            .iter()
            .map(|&z| {
                let u = (z - mean_nm) / sigma_nm;
                (-(u * u) / T::lit(2.0)).exp()
            })
            .collect();
        Self::normalized(depth, weights)
    }

    pub fn depth_nm(&self) -> &[T] {
        &self.depth_nm
    }

    pub fn density(&self) -> &[T] {
        &self.density
    }

    /// Depth of maximum density; for a flat top, the centre of the plateau.
    pub fn mode_depth_nm(&self) -> T {
        let peak = self.density.iter().copied().fold(T::zero(), T::max);
        let tol = peak * T::lit(1e-12);
        let at_peak: Vec<T> = self
            .depth_nm
            .iter()
            .zip(&self.density)
            .filter(|(_, &d)| peak - d <= tol)
            .map(|(&z, _)| z)
            .collect();
        (at_peak[0] + at_peak[at_peak.len() - 1]) / T::lit(2.0)
    }

    fn support(&self) -> Option<(T, T)> {
        let first = self.density.iter().position(|&d| d > T::zero())?;
        let last = self.density.iter().rposition(|&d| d > T::zero())?;
        Some((self.depth_nm[first], self.depth_nm[last]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapResult<T> {
    /// ∫ density · normalised intensity dz.
    pub overlap: T,
    /// Normalised intensity at the depth of maximum ion density.
    pub intensity_at_density_mode: T,
    pub density_mode_depth_nm: T,
}

/// Overlap of an ion depth distribution with a normalised field profile.
/// Ion depths outside the profile contribute zero.
pub fn field_overlap<T: Real>(profile: &FieldProfile<T>, ions: &DepthDistribution<T>) -> Result<OverlapResult<T>> {
    let (p_lo, p_hi) = profile.range();
    let (s_lo, s_hi) = ions
        .support()
        .ok_or_else(|| Error::InvalidInput("ion density is identically zero".into()))?;
    if s_hi < p_lo || s_lo > p_hi {
        return Err(Error::DisjointSupport(format!(
            "ions occupy [{s_lo}, {s_hi}] nm, field sampled on [{p_lo}, {p_hi}] nm"
        )));
    }
    let weighted: Vec<T> = ions
        .depth_nm
        .iter()
        .zip(&ions.density)
        .map(|(&z, &rho)| rho * profile.interpolate(z).unwrap_or(T::zero()))
        .collect();
    let overlap = trapezoid(&ions.depth_nm, &weighted);
    let mode = ions.mode_depth_nm();
    Ok(OverlapResult {
        overlap,
        intensity_at_density_mode: profile.interpolate(mode).unwrap_or(T::zero()),
        density_mode_depth_nm: mode,
    })
}
