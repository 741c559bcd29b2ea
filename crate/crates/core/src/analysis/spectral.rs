use serde::Serialize;

use super::fit::{least_squares, GaussianSum};
use super::ple::GAUSSIAN_FWHM_PER_SIGMA;
use super::trace::{AbscissaUnit, ScanTrace};
use crate::emitter::FineStructure;
use crate::error::{Error, Result};
use crate::scalar::{median, nm_to_thz, thz_to_nm, Real};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FineStructureFit<T> {
    /// Lines A to D (descending frequency).
    pub lines_thz: [T; 4],
    pub lines_nm: [T; 4],
    pub line_uncertainty_ghz: [T; 4],
    pub line_fwhm_ghz: [T; 4],
    pub delta_gs_ghz: T,
    pub delta_es_ghz: T,
    pub goodness: T,
}

/// Indices of local maxima, strongest first, at least `min_gap` samples apart.
fn strongest_maxima(y: &[f64], count: usize, min_gap: usize) -> Vec<usize> {
    let mut cand: Vec<usize> = (1..y.len() - 1)
        .filter(|&i| y[i] >= y[i - 1] && y[i] > y[i + 1])
        .collect();
    cand.sort_by(|&a, &b| y[b].total_cmp(&y[a]));
    let mut chosen: Vec<usize> = Vec::with_capacity(count);
    for i in cand {
        if chosen.iter().all(|&c| c.abs_diff(i) >= min_gap) {
            chosen.push(i);
            if chosen.len() == count {
                break;
            }
        }
    }
    chosen
}

/// Fit four Gaussian lines to a zero-phonon spectrum (abscissa in nm) and
/// recover the ground- and excited-state splittings.
pub fn fit_fine_structure<T: Real>(spectrum: &ScanTrace<T>) -> Result<FineStructureFit<T>> {
    if spectrum.meta.units == AbscissaUnit::TimeNs || spectrum.meta.units == AbscissaUnit::DisplacementNm {
        return Err(Error::InvalidTrace(
            "fine-structure fit needs a wavelength abscissa".into(),
        ));
    }
    // Work in GHz detuning, ascending.
    let mut pts: Vec<(f64, f64)> = spectrum
        .abscissa()
        .iter()
        .zip(spectrum.ordinate())
        .map(|(l, y)| (nm_to_thz(l.as_f64()), y.as_f64()))
        .collect();
    pts.reverse();
    let reference = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let x: Vec<f64> = pts.iter().map(|p| (p.0 - reference) * 1e3).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let base = median(&y)
        .expect("non-empty")
        .min(y.iter().copied().fold(f64::INFINITY, f64::min));
    let top = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let peaks = strongest_maxima(&y, 4, 3);
    let significant = peaks.iter().filter(|&&i| y[i] - base > 0.01 * (top - base)).count();
    if significant < 4 {
        return Err(Error::PeakCount {
            expected: 4,
            found: significant,
        });
    }
    let mut peaks = peaks;
    peaks.sort_unstable();
    let min_sep = peaks
        .windows(2)
        .map(|w| x[w[1]] - x[w[0]])
        .fold(f64::INFINITY, f64::min);
    let scale = top - base;
    let mut p0 = Vec::with_capacity(13);
    for &i in &peaks {
        p0.extend_from_slice(&[(y[i] - base) / scale, x[i], min_sep / 6.0]);
    }
    p0.push(0.0);
    let yn: Vec<f64> = y.iter().map(|v| (v - base) / scale).collect();
    let out = least_squares(&GaussianSum { peaks: 4 }, &x, &yn, &p0)?;
    let mut lines: Vec<(f64, f64, f64)> = (0..4)
        .map(|k| {
            (
                out.params[3 * k + 1],
                out.std_errors[3 * k + 1],
                out.params[3 * k + 2].abs(),
            )
        })
        .collect();
    lines.sort_by(|a, b| b.0.total_cmp(&a.0));
    let thz: [f64; 4] = std::array::from_fn(|k| reference + lines[k].0 * 1e-3);
    let fs = FineStructure::from_lines(thz);
    let peak_amp = (0..4).map(|k| out.params[3 * k]).fold(f64::NEG_INFINITY, f64::max);
    Ok(FineStructureFit {
        lines_thz: thz.map(T::lit),
        lines_nm: thz.map(|f| T::lit(thz_to_nm(f))),
        line_uncertainty_ghz: std::array::from_fn(|k| T::lit(lines[k].1)),
        line_fwhm_ghz: std::array::from_fn(|k| T::lit(lines[k].2 * GAUSSIAN_FWHM_PER_SIGMA)),
        delta_gs_ghz: T::lit(fs.delta_gs_ghz),
        delta_es_ghz: T::lit(fs.delta_es_ghz),
        goodness: T::lit(out.reduced_residual.sqrt() / peak_amp),
    })
}
