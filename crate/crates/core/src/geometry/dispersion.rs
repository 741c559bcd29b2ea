//! Resonance chart of the hybrid membrane cavity: air-gap lengths of
//! transmission maxima against wavelength, grouped into branches and
//! classified as air-like or diamond-like.
//!
//! Classification uses the layer-averaged circulating power `n·⟨|E|²⟩` in
//! the air gap and in the membrane. For an air-like mode the membrane
//! surface sits at a field node and the ratio is `n_d`; for a diamond-like
//! mode it sits at an antinode and the ratio is `1/n_d`. The air fraction is
//! therefore `n_d/(n_d+1)` or `1/(n_d+1)`, symmetric about 0.5 and
//! independent of the membrane and gap thicknesses.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optics::{HybridCavity, StackField};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModeClass {
    AirLike,
    DiamondLike,
}

impl ModeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeClass::AirLike => "air-like",
            ModeClass::DiamondLike => "diamond-like",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModePoint<T> {
    pub branch: usize,
    pub mode_number: u32,
    pub wavelength_nm: T,
    pub air_gap_nm: T,
    /// Share of circulating power in the air gap (1 for an empty cavity).
    pub air_fraction: T,
    pub class: ModeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeChart<T> {
    /// Sorted by branch, then wavelength.
    pub points: Vec<ModePoint<T>>,
    pub diagnostics: Vec<String>,
}

impl<T: Real> ModeChart<T> {
    pub fn branch_count(&self) -> usize {
        self.points.iter().map(|p| p.branch + 1).max().unwrap_or(0)
    }

    pub fn branch(&self, id: usize) -> Vec<ModePoint<T>> {
        self.points.iter().copied().filter(|p| p.branch == id).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionOptions<T> {
    pub wavelength_start_nm: T,
    pub wavelength_stop_nm: T,
    pub wavelength_step_nm: T,
    pub gap_min_nm: T,
    pub gap_max_nm: T,
    /// Coarse gap step as a fraction of the wavelength.
    pub gap_step_fraction: T,
    /// Air fraction above which a point is air-like.
    pub air_threshold: T,
}

impl<T: Real> DispersionOptions<T> {
    pub fn new(wavelength_range_nm: (T, T), wavelength_step_nm: T, gap_range_nm: (T, T)) -> Self {
        Self {
            wavelength_start_nm: wavelength_range_nm.0,
            wavelength_stop_nm: wavelength_range_nm.1,
            wavelength_step_nm,
            gap_min_nm: gap_range_nm.0,
            gap_max_nm: gap_range_nm.1,
            gap_step_fraction: T::lit(1.0 / 50.0),
            air_threshold: T::lit(0.5),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.wavelength_start_nm > T::zero() && self.wavelength_stop_nm > self.wavelength_start_nm) {
            return Err(Error::InvalidInput(format!(
                "empty or non-positive wavelength range [{}, {}]",
                self.wavelength_start_nm, self.wavelength_stop_nm
            )));
        }
        if !(self.wavelength_step_nm > T::zero()) {
            return Err(Error::InvalidInput("wavelength step must be positive".into()));
        }
        if !(self.gap_min_nm > T::zero() && self.gap_max_nm > self.gap_min_nm) {
            return Err(Error::InvalidInput(format!(
                "empty or non-positive gap range [{}, {}]",
                self.gap_min_nm, self.gap_max_nm
            )));
        }
        if !(self.gap_step_fraction > T::zero()) {
            return Err(Error::InvalidInput("gap step fraction must be positive".into()));
        }
        Ok(())
    }
}

fn transmission<T: Real>(cavity: &HybridCavity<T>, wavelength_nm: T, gap_nm: T) -> Result<T> {
    let stack = cavity.stack(gap_nm)?;
    Ok(StackField::solve(&stack, wavelength_nm)?.response().transmittance)
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
fn golden_max<T: Real, F: Fn(T) -> Result<T>>(f: F, mut a: T, mut b: T, tol: T) -> Result<T> {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok((a + b) / T::lit(2.0))
}

/// Air-gap lengths of transmission maxima at one wavelength, refined by
/// golden-section search after a coarse scan.
pub fn resonances_at<T: Real>(
    cavity: &HybridCavity<T>,
    wavelength_nm: T,
    gap_range_nm: (T, T),
    gap_step_fraction: T,
) -> Result<Vec<T>> {
    let step = wavelength_nm * gap_step_fraction;
    let (lo, hi) = gap_range_nm;
    let n = ((hi - lo) / step).floor().to_usize().unwrap_or(0);
    let gaps: Vec<T> = (0..=n).map(|i| lo + step * T::from_count(i)).collect();
    let ts: Vec<T> = gaps
        .iter()
        .map(|&g| transmission(cavity, wavelength_nm, g))
        .collect::<Result<_>>()?;
    let tol = (T::epsilon() * hi * T::lit(8.0)).max(T::lit(1e-7));
    let mut out = Vec::new();
    for i in 1..gaps.len().saturating_sub(1) {
        if ts[i] > ts[i - 1] && ts[i] >= ts[i + 1] {
            let g = golden_max(
                |g| transmission(cavity, wavelength_nm, g),
                gaps[i - 1],
                gaps[i + 1],
                tol,
            )?;
            out.push(g);
        }
    }
    Ok(out)
}

/// Share of circulating power `n⟨|E|²⟩` residing in the air gap.
pub fn air_fraction<T: Real>(cavity: &HybridCavity<T>, wavelength_nm: T, gap_nm: T) -> Result<T> {
    let (diamond, gap) = cavity.region_indices();
    let Some(diamond) = diamond else {
        return Ok(T::one());
    };
    let stack = cavity.stack(gap_nm)?;
    let field = StackField::solve(&stack, wavelength_nm)?;
    let mean_power = |j: usize| field.index(j).re * field.layer_intensity_integral(j) / field.layer_thickness_nm(j);
    let air = mean_power(gap);
    let membrane = mean_power(diamond);
    Ok(air / (air + membrane))
}

struct OpenBranch<T> {
    id: usize,
    last: (T, T),
    slope: Option<T>,
}

/// Transmission-maximum chart over a wavelength grid and air-gap range.
pub fn resonance_dispersion<T: Real>(cavity: &HybridCavity<T>, options: &DispersionOptions<T>) -> Result<ModeChart<T>> {
    options.validate()?;
    let n = ((options.wavelength_stop_nm - options.wavelength_start_nm) / options.wavelength_step_nm + T::lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0);
    let wavelengths: Vec<T> = (0..=n)
        .map(|i| options.wavelength_start_nm + options.wavelength_step_nm * T::from_count(i))
        .collect();

    let per_wavelength: Vec<Vec<(T, T)>> = wavelengths
        .par_iter()
        .map(|&w| {
            resonances_at(
                cavity,
                w,
                (options.gap_min_nm, options.gap_max_nm),
                options.gap_step_fraction,
            )?
            .into_iter()
            .map(|g| Ok((g, air_fraction(cavity, w, g)?)))
            .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    // Link resonances at consecutive wavelengths into branches.
    let mut open: Vec<OpenBranch<T>> = Vec::new();
    let mut raw: Vec<(usize, T, T, T)> = Vec::new();
    let mut next_id = 0usize;
    for (&w, found) in wavelengths.iter().zip(&per_wavelength) {
        let mut continued: Vec<OpenBranch<T>> = Vec::new();
        let mut taken = vec![false; open.len()];
        for &(g, frac) in found {
            let mut best: Option<(usize, T)> = None;
            for (bi, b) in open.iter().enumerate() {
                if taken[bi] {
                    continue;
                }
                let (w0, g0) = b.last;
                let slope = b.slope.unwrap_or(g0 / w0);
                let predicted = g0 + slope * (w - w0);
                let miss = (g - predicted).abs();
                if miss < w / T::lit(4.0) && best.is_none_or(|(_, m)| miss < m) {
                    best = Some((bi, miss));
                }
            }
            let (id, slope) = match best {
                Some((bi, _)) => {
                    taken[bi] = true;
                    let (w0, g0) = open[bi].last;
                    (open[bi].id, Some((g - g0) / (w - w0)))
                }
                None => {
                    next_id += 1;
                    (next_id - 1, None)
                }
            };
            continued.push(OpenBranch {
                id,
                last: (w, g),
                slope,
            });
            raw.push((id, w, g, frac));
        }
        open = continued;
    }

    let mut diagnostics = Vec::new();
    if raw.is_empty() {
        diagnostics.push(format!(
            "no transmission maxima for gaps in [{}, {}] nm between {} and {} nm",
            options.gap_min_nm, options.gap_max_nm, options.wavelength_start_nm, options.wavelength_stop_nm
        ));
        return Ok(ModeChart {
            points: Vec::new(),
            diagnostics,
        });
    }

    // Renumber branches by their first gap so ids follow mode order.
    let optical_extra = match cavity.membrane {
        Some(m) => m.index * m.thickness_nm + cavity.bonding_gap_nm,
        None => T::zero(),
    };
    let mut branch_ids: Vec<usize> = (0..next_id).collect();
    let first_gap = |id: usize| {
        raw.iter()
            .find(|r| r.0 == id)
            .map(|r| (r.1, r.2))
            .expect("every branch has a point")
    };
    branch_ids.sort_by(|&a, &b| {
        let (wa, ga) = first_gap(a);
        let (wb, gb) = first_gap(b);
        // compare at a common reference: gap scaled to the start wavelength
        let ka = ga * options.wavelength_start_nm / wa;
        let kb = gb * options.wavelength_start_nm / wb;
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut points = Vec::with_capacity(raw.len());
    for (new_id, &old_id) in branch_ids.iter().enumerate() {
        let members: Vec<&(usize, T, T, T)> = raw.iter().filter(|r| r.0 == old_id).collect();
        let mid = members[members.len() / 2];
        let m = (T::lit(2.0) * (mid.2 + optical_extra) / mid.1)
            .round()
            .to_u32()
            .unwrap_or(1)
            .max(1);
        for r in members {
            points.push(ModePoint {
                branch: new_id,
                mode_number: m,
                wavelength_nm: r.1,
                air_gap_nm: r.2,
                air_fraction: r.3,
                class: if r.3 > options.air_threshold {
                    ModeClass::AirLike
                } else {
                    ModeClass::DiamondLike
                },
            });
        }
    }
    for id in 0..branch_ids.len() {
        let b: Vec<&ModePoint<T>> = points.iter().filter(|p| p.branch == id).collect();
        if b.windows(2).any(|w| !(w[1].air_gap_nm > w[0].air_gap_nm)) {
            diagnostics.push(format!("branch {id} is not monotone in wavelength"));
        }
    }
    Ok(ModeChart { points, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{Membrane, QuarterWaveDesign};

    fn mirror() -> crate::optics::LayerStack<f64> {
        QuarterWaveDesign::new(2.1, 1.45, 1.45, 737.0).stack(8).unwrap()
    }

    #[test]
    fn bare_cavity_resonances_are_half_wave_spaced() {
        let cav = HybridCavity::new(mirror(), None);
        let r = resonances_at(&cav, 737.0, (2000.0, 4000.0), 1.0 / 50.0).unwrap();
        assert!(r.len() >= 5);
        for w in r.windows(2) {
            assert!((w[1] - w[0] - 368.5).abs() < 1e-5, "{:?}", w);
        }
        // node at the high-index surface: resonances at multiples of λ/2
        assert!(((r[0] / 368.5) - (r[0] / 368.5).round()).abs() < 1e-7);
    }

    #[test]
    fn empty_cavity_is_air_like() {
        let cav = HybridCavity::new(mirror(), None);
        assert_eq!(air_fraction(&cav, 737.0, 3000.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_empty_ranges() {
        let cav = HybridCavity::new(mirror(), None);
        let o = DispersionOptions::new((740.0, 730.0), 1.0, (1000.0, 2000.0));
        assert!(resonance_dispersion(&cav, &o).is_err());
        let o = DispersionOptions::new((730.0, 740.0), 1.0, (2000.0, 1000.0));
        assert!(resonance_dispersion(&cav, &o).is_err());
    }

    #[test]
    fn no_resonance_gives_empty_chart_with_diagnostic() {
        let cav = HybridCavity::new(mirror(), None);
        // window narrower than one free spectral range, positioned between resonances
        let o = DispersionOptions::new((737.0, 737.5), 0.5, (3700.0, 3800.0));
        let chart = resonance_dispersion(&cav, &o).unwrap();
        assert!(chart.is_empty());
        assert_eq!(chart.diagnostics.len(), 1);
    }

    #[test]
    fn membrane_fractions_are_bimodal() {
        let cav = HybridCavity::new(
            mirror(),
            Some(Membrane {
                index: 2.417,
                thickness_nm: 3000.0,
            }),
        );
        let n: f64 = 2.417;
        let mut seen = Vec::new();
        // node/antinode at the membrane surface near 725.1, 743.7 and 763.3 nm
        for i in 0..=100 {
            let w = 720.0 + 0.5 * i as f64;
            for g in resonances_at(&cav, w, (3000.0, 3400.0), 1.0 / 50.0).unwrap() {
                seen.push(air_fraction(&cav, w, g).unwrap());
            }
        }
        let max = seen.iter().copied().fold(0.0, f64::max);
        let min = seen.iter().copied().fold(1.0, f64::min);
        assert!((max - n / (n + 1.0)).abs() < 0.02, "max {max}");
        assert!((min - 1.0 / (n + 1.0)).abs() < 0.02, "min {min}");
    }
}
