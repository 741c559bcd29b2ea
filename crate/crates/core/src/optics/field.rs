use serde::Serialize;

use super::layer::LayerStack;
use super::transfer::StackField;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Finest-grid ceiling accepted by [`field_profile`] (nm).
pub const MAX_GRID_STEP_NM: f64 = 5.0;

/// Sign convention of the depth axis relative to the reference interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DepthDirection {
    /// Depth grows in the propagation direction (toward the exit medium).
    TowardExit,
    /// Depth grows back toward the incidence medium.
    TowardIncidence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions<T> {
    pub grid_step_nm: T,
    /// Extent sampled inside each boundary medium.
    pub padding_nm: T,
    /// Interface index (0 = between the incidence medium and the first
    /// interior layer) that defines depth zero.
    pub reference_interface: usize,
    pub direction: DepthDirection,
}

impl<T: Real> ProfileOptions<T> {
    pub fn new(grid_step_nm: T) -> Self {
        Self {
            grid_step_nm,
            padding_nm: T::zero(),
            reference_interface: 0,
            direction: DepthDirection::TowardExit,
        }
    }

    pub fn padding(mut self, padding_nm: T) -> Self {
        self.padding_nm = padding_nm;
        self
    }

    pub fn reference(mut self, interface: usize, direction: DepthDirection) -> Self {
        self.reference_interface = interface;
        self.direction = direction;
        self
    }
}

/// |E|² on an ascending depth grid, normalised to a peak of exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldProfile<T> {
    pub depth_nm: Vec<T>,
    pub intensity: Vec<T>,
    /// Interface positions on the same depth axis.
    pub interfaces_nm: Vec<T>,
}

impl<T: Real> FieldProfile<T> {
    fn from_raw(depth_nm: Vec<T>, raw: Vec<T>, interfaces_nm: Vec<T>) -> Result<Self> {
        let peak = raw.iter().copied().fold(T::zero(), T::max);
        if !(peak > T::zero() && peak.is_finite()) {
            return Err(Error::InvalidInput("field vanishes on the sampled range".into()));
        }
        Ok(Self {
            depth_nm,
            intensity: raw.into_iter().map(|v| v / peak).collect(),
            interfaces_nm,
        })
    }

    pub fn len(&self) -> usize {
        self.depth_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth_nm.is_empty()
    }

    pub fn range(&self) -> (T, T) {
        (self.depth_nm[0], self.depth_nm[self.depth_nm.len() - 1])
    }

    /// Linear interpolation; `None` outside the sampled range.
    pub fn interpolate(&self, depth_nm: T) -> Option<T> {
        let (lo, hi) = self.range();
        if depth_nm < lo || depth_nm > hi {
            return None;
        }
        let i = self.depth_nm.partition_point(|&d| d <= depth_nm);
        if i == 0 {
            return Some(self.intensity[0]);
        }
        if i >= self.depth_nm.len() {
            return Some(self.intensity[self.intensity.len() - 1]);
        }
        let (d0, d1) = (self.depth_nm[i - 1], self.depth_nm[i]);
        let w = (depth_nm - d0) / (d1 - d0);
        Some(self.intensity[i - 1] + w * (self.intensity[i] - self.intensity[i - 1]))
    }

    /// Sub-profile over `[lo, hi]`, renormalised to a peak of 1 there.
    pub fn restrict(&self, lo: T, hi: T) -> Result<Self> {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.depth_nm[i] >= lo && self.depth_nm[i] <= hi)
            .collect();
        if keep.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "restriction [{lo}, {hi}] keeps fewer than two samples"
            )));
        }
        Self::from_raw(
            keep.iter().map(|&i| self.depth_nm[i]).collect(),
            keep.iter().map(|&i| self.intensity[i]).collect(),
            self.interfaces_nm
                .iter()
                .copied()
                .filter(|&x| x >= lo && x <= hi)
                .collect(),
        )
    }

    /// Depths of interior local maxima.
    pub fn peak_depths(&self) -> Vec<T> {
        (1..self.len().saturating_sub(1))
            .filter(|&i| self.intensity[i] > self.intensity[i - 1] && self.intensity[i] >= self.intensity[i + 1])
            .map(|i| self.depth_nm[i])
            .collect()
    }
}

/// Normalised |E|² through `stack` at `wavelength_nm`.
pub fn field_profile<T: Real>(
    stack: &LayerStack<T>,
    wavelength_nm: T,
    options: ProfileOptions<T>,
) -> Result<FieldProfile<T>> {
    let step = options.grid_step_nm;
    if !(step > T::zero() && step <= T::lit(MAX_GRID_STEP_NM)) {
        return Err(Error::InvalidInput(format!(
            "grid step must lie in (0, {MAX_GRID_STEP_NM}] nm, got {step}"
        )));
    }
    if let Some(thinnest) = stack.thinnest_interior_nm() {
        if step > thinnest / T::lit(4.0) {
            return Err(Error::GridTooCoarse {
                step: step.as_f64(),
                thinnest: thinnest.as_f64(),
            });
        }
    }
    let interfaces = stack.interface_positions_nm();
    if options.reference_interface >= interfaces.len() {
        return Err(Error::InvalidInput(format!(
            "reference interface {} out of range (stack has {})",
            options.reference_interface,
            interfaces.len()
        )));
    }
    if options.padding_nm < T::zero() {
        return Err(Error::InvalidInput("padding must be non-negative".into()));
    }

    let field = StackField::solve(stack, wavelength_nm)?;
    let start = -options.padding_nm;
    let stop = stack.interior_thickness_nm() + options.padding_nm;
    let n = ((stop - start) / step).floor().to_usize().unwrap_or(0);
    let xs: Vec<T> = (0..=n).map(|i| start + step * T::from_count(i)).collect();
    let raw: Vec<T> = xs.iter().map(|&x| field.intensity_at(x)).collect();

    let x_ref = interfaces[options.reference_interface];
    let to_depth = |x: T| match options.direction {
        DepthDirection::TowardExit => x - x_ref,
        DepthDirection::TowardIncidence => x_ref - x,
    };
    let mut depth: Vec<T> = xs.iter().map(|&x| to_depth(x)).collect();
    let mut raw = raw;
    let mut iface: Vec<T> = interfaces.iter().map(|&x| to_depth(x)).collect();
    if options.direction == DepthDirection::TowardIncidence {
        depth.reverse();
        raw.reverse();
        iface.reverse();
    }
    FieldProfile::from_raw(depth, raw, iface)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::layer::OpticalLayer;

    fn slab() -> LayerStack<f64> {
        LayerStack::new(
            vec![
                OpticalLayer::semi_infinite_dielectric(1.0),
                OpticalLayer::dielectric(2.0, 100.0),
                OpticalLayer::semi_infinite_dielectric(1.5),
            ],
            "slab",
        )
        .unwrap()
    }

    #[test]
    fn peak_is_exactly_one_and_non_negative() {
        let p = field_profile(&slab(), 700.0, ProfileOptions::new(1.0).padding(200.0)).unwrap();
        let max = p.intensity.iter().copied().fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        assert!(p.intensity.iter().all(|&v| v >= 0.0));
        assert_eq!(p.range(), (-200.0, 300.0));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            field_profile(&slab(), 700.0, ProfileOptions::new(6.0)),
            Err(Error::InvalidInput(_))
        ));
        assert!(field_profile(&slab(), 700.0, ProfileOptions::new(0.0)).is_err());
        let thin = LayerStack::new(
            vec![
                OpticalLayer::semi_infinite_dielectric(1.0),
                OpticalLayer::dielectric(2.0, 8.0),
                OpticalLayer::semi_infinite_dielectric(1.5),
            ],
            "thin",
        )
        .unwrap();
        assert!(matches!(
            field_profile(&thin, 700.0, ProfileOptions::new(2.5)),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn reversed_axis_is_ascending() {
        let opts = ProfileOptions::new(1.0).reference(1, DepthDirection::TowardIncidence);
        let p = field_profile(&slab(), 700.0, opts).unwrap();
        assert!(p.depth_nm.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(p.range(), (0.0, 100.0));
        assert_eq!(p.interfaces_nm, vec![0.0, 100.0]);
    }

    #[test]
    fn restrict_renormalises() {
        let p = field_profile(&slab(), 700.0, ProfileOptions::new(1.0).padding(300.0)).unwrap();
        let q = p.restrict(0.0, 100.0).unwrap();
        assert_eq!(q.intensity.iter().copied().fold(0.0, f64::max), 1.0);
        assert!(p.restrict(5.0, 5.5).is_err());
    }
}
