//! Quarter-wave Bragg mirrors and the membrane/cavity stacks built from them.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::layer::{LayerStack, OpticalLayer};
use super::transfer::stack_response;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper bound on the pair count searched by [`design_quarter_wave_dbr`].
pub const MAX_PAIRS: usize = 60;

/// Indices and design wavelength of a quarter-wave mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarterWaveDesign<T> {
    pub n_high: T,
    pub n_low: T,
    pub n_substrate: T,
    pub n_incident: T,
    pub design_wavelength_nm: T,
}

impl<T: Real> QuarterWaveDesign<T> {
    /// Mirror seen from air.
    pub fn new(n_high: T, n_low: T, n_substrate: T, design_wavelength_nm: T) -> Self {
        Self {
            n_high,
            n_low,
            n_substrate,
            n_incident: T::one(),
            design_wavelength_nm,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.n_high > self.n_low && self.n_low >= T::one()) {
            return Err(Error::InvalidInput(format!(
                "need n_high > n_low >= 1, got n_high={} n_low={}",
                self.n_high, self.n_low
            )));
        }
        if !(self.design_wavelength_nm > T::zero()) {
            return Err(Error::InvalidInput("design wavelength must be positive".into()));
        }
        Ok(())
    }

    /// `incident | (H L)^pairs | substrate`, high-index layer outermost.
    pub fn stack(&self, pairs: usize) -> Result<LayerStack<T>> {
        self.validate()?;
        let mut layers = Vec::with_capacity(2 * pairs + 2);
        layers.push(OpticalLayer::semi_infinite_dielectric(self.n_incident));
        for _ in 0..pairs {
            layers.push(OpticalLayer::quarter_wave(self.n_high, self.design_wavelength_nm));
            layers.push(OpticalLayer::quarter_wave(self.n_low, self.design_wavelength_nm));
        }
        layers.push(OpticalLayer::semi_infinite_dielectric(self.n_substrate));
        LayerStack::new(layers, format!("quarter-wave DBR, {pairs} pairs"))
    }
}

/// Outcome of a pair-count search.
#[derive(Debug, Clone, PartialEq)]
pub struct DbrDesign<T> {
    pub stack: LayerStack<T>,
    pub pairs: usize,
    pub transmission: T,
}

/// Smallest quarter-wave pair count whose transmission at the design
/// wavelength does not exceed `target_transmission`.
pub fn design_quarter_wave_dbr<T: Real>(design: QuarterWaveDesign<T>, target_transmission: T) -> Result<DbrDesign<T>> {
    design.validate()?;
    if !(target_transmission > T::zero() && target_transmission <= T::one()) {
        return Err(Error::InvalidInput(format!(
            "target transmission must lie in (0, 1], got {target_transmission}"
        )));
    }
    let mut best = T::infinity();
    for pairs in 0..=MAX_PAIRS {
        let stack = design.stack(pairs)?;
        let t = stack_response(&stack, design.design_wavelength_nm)?.transmittance;
        if t <= target_transmission {
            return Ok(DbrDesign {
                stack,
                pairs,
                transmission: t,
            });
        }
        best = best.min(t);
    }
    Err(Error::TargetUnreachable {
        target: target_transmission.as_f64(),
        max_pairs: MAX_PAIRS,
        achieved: best.as_f64(),
    })
}

/// Diamond membrane parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membrane<T> {
    pub index: T,
    pub thickness_nm: T,
}

/// Open hemispherical cavity: bottom mirror carrying an optional bonded
/// membrane, a variable air gap and an identical top mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridCavity<T> {
    /// Mirror stack as seen from air (`air | coating | substrate`).
    pub mirror: LayerStack<T>,
    pub membrane: Option<Membrane<T>>,
    /// Air layer between membrane and bottom mirror (0 = bonded directly).
    pub bonding_gap_nm: T,
}

impl<T: Real> HybridCavity<T> {
    pub fn new(mirror: LayerStack<T>, membrane: Option<Membrane<T>>) -> Self {
        Self {
            mirror,
            membrane,
            bonding_gap_nm: T::zero(),
        }
    }

    fn coating(&self) -> Vec<OpticalLayer<T>> {
        self.mirror.interior().to_vec()
    }

    /// `substrate | coating | [bond gap] | [diamond] | air gap | coating | substrate`.
    pub fn stack(&self, air_gap_nm: T) -> Result<LayerStack<T>> {
        let coating = self.coating();
        let substrate = self.mirror.exit().clone();
        let mut layers = vec![substrate.clone()];
        layers.extend(coating.iter().rev().cloned());
        if let Some(m) = self.membrane {
            if self.bonding_gap_nm > T::zero() {
                layers.push(OpticalLayer::dielectric(T::one(), self.bonding_gap_nm));
            }
            layers.push(OpticalLayer::dielectric(m.index, m.thickness_nm));
        }
        layers.push(OpticalLayer::dielectric(T::one(), air_gap_nm));
        layers.extend(coating);
        layers.push(substrate);
        LayerStack::new(layers, "hybrid cavity")
    }

    /// Layer indices of the membrane (if any) and the air gap in [`Self::stack`].
    pub fn region_indices(&self) -> (Option<usize>, usize) {
        let coating = self.mirror.interior().len();
        let mut next = 1 + coating;
        let diamond = self.membrane.map(|_| {
            if self.bonding_gap_nm > T::zero() {
                next += 1;
            }
            let d = next;
            next += 1;
            d
        });
        (diamond, next)
    }
}

/// `air | diamond | [bond gap] | coating | substrate`, i.e. the membrane on
/// the flat mirror probed from above. Returns the stack and the index of the
/// interface between the membrane and whatever lies beneath it.
pub fn membrane_on_mirror<T: Real>(
    mirror: &LayerStack<T>,
    membrane: Membrane<T>,
    bonding_gap_nm: T,
) -> Result<(LayerStack<T>, usize)> {
    let mut layers = vec![
        OpticalLayer::semi_infinite(Complex::new(T::one(), T::zero())),
        OpticalLayer::dielectric(membrane.index, membrane.thickness_nm),
    ];
    if bonding_gap_nm > T::zero() {
        layers.push(OpticalLayer::dielectric(T::one(), bonding_gap_nm));
    }
    layers.extend(mirror.interior().iter().cloned());
    layers.push(mirror.exit().clone());
    Ok((LayerStack::new(layers, "membrane on mirror")?, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design() -> QuarterWaveDesign<f64> {
        QuarterWaveDesign::new(2.1, 1.45, 1.45, 737.0)
    }

    #[test]
    fn full_target_needs_no_pairs() {
        let d = design_quarter_wave_dbr(design(), 1.0).unwrap();
        assert_eq!(d.pairs, 0);
        assert_eq!(d.stack.len(), 2);
    }

    #[test]
    fn rejects_inverted_indices_and_bad_target() {
        let bad = QuarterWaveDesign::new(1.4, 2.0, 1.45, 737.0);
        assert!(design_quarter_wave_dbr(bad, 1e-3).is_err());
        assert!(design_quarter_wave_dbr(design(), 0.0).is_err());
        assert!(design_quarter_wave_dbr(design(), 1.5).is_err());
    }

    #[test]
    fn unreachable_target_reports_minimum() {
        let weak = QuarterWaveDesign::new(1.46, 1.45, 1.45, 737.0);
        match design_quarter_wave_dbr(weak, 1e-9) {
            Err(Error::TargetUnreachable {
                achieved, max_pairs, ..
            }) => {
                assert_eq!(max_pairs, MAX_PAIRS);
                assert!(achieved > 1e-9 && achieved < 1.0);
            }
            other => panic!("expected unreachable, got {other:?}"),
        }
    }

    #[test]
    fn hybrid_stack_layout() {
        let mirror = design().stack(3).unwrap();
        let cav = HybridCavity::new(
            mirror,
            Some(Membrane {
                index: 2.417,
                thickness_nm: 3000.0,
            }),
        );
        let s = cav.stack(4000.0).unwrap();
        // substrate + 6 + diamond + gap + 6 + substrate
        assert_eq!(s.len(), 16);
        let (diamond, gap) = cav.region_indices();
        assert_eq!(diamond, Some(7));
        assert_eq!(gap, 8);
        assert_eq!(s.layers()[7].thickness_nm, 3000.0);
        assert_eq!(s.layers()[8].thickness_nm, 4000.0);
        // high-index layers face the cavity on both sides
        assert_eq!(s.layers()[6].index_at(737.0).re, 2.1);
        assert_eq!(s.layers()[9].index_at(737.0).re, 2.1);
    }
}
