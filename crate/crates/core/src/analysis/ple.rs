use serde::Serialize;

use super::fit::{least_squares, Gaussian};
use super::resonance::fit_lorentzian;
use super::trace::ScanTrace;
use crate::error::{Error, Result};
use crate::scalar::{median, nm_to_thz, Real};

/// FWHM of a Gaussian per unit standard deviation.
pub const GAUSSIAN_FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// One cavity-length scan at a fixed excitation wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct PleScan<T> {
    pub excitation_nm: T,
    pub fluorescence: ScanTrace<T>,
    /// Laser reflection/transmission used to locate the resonance; the
    /// fluorescence trace itself is used when absent.
    pub laser: Option<ScanTrace<T>>,
}

impl<T: Real> PleScan<T> {
    /// Excitation wavelength taken from the trace metadata.
    pub fn from_trace(fluorescence: ScanTrace<T>) -> Result<Self> {
        let excitation_nm = fluorescence
            .meta
            .excitation_nm
            .ok_or_else(|| Error::InvalidTrace("PLE trace lacks #meta excitation_nm".into()))?;
        Ok(Self {
            excitation_nm: T::lit(excitation_nm),
            fluorescence,
            laser: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PleResult<T> {
    pub excitation_nm: Vec<T>,
    /// Excitation frequency relative to `reference_thz`.
    pub detuning_ghz: Vec<T>,
    pub reference_thz: T,
    pub counts: Vec<T>,
    pub normalized: Vec<T>,
    pub center_nm: T,
    pub fwhm_ghz: T,
    pub fwhm_uncertainty_ghz: T,
    pub goodness: T,
}

/// Fluorescence summed within ±`window_fwhm` fitted FWHM of each scan's resonance.
///
/// Scans located on their own fluorescence that show no resonance (excitation
/// far off the ensemble) reuse the median resonance of the scans that do.
pub fn ple_window_sums<T: Real>(scans: &[PleScan<T>], window_fwhm: T) -> Result<Vec<T>> {
    if !(window_fwhm > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "PLE window must be positive, got {window_fwhm} FWHM"
        )));
    }
    let located: Vec<Option<(T, T)>> = scans
        .iter()
        .map(|s| {
            match (
                &s.laser,
                fit_lorentzian(s.laser.as_ref().unwrap_or(&s.fluorescence), None),
            ) {
                (_, Ok(res)) => Ok(Some((res.center, res.fwhm))),
                (None, Err(e)) if e.is_analysis_failure() => Ok(None),
                (_, Err(e)) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let found: Vec<(f64, f64)> = located
        .iter()
        .flatten()
        .map(|(c, w)| (c.as_f64(), w.as_f64()))
        .collect();
    if found.is_empty() {
        return Err(Error::NonConvergence {
            iterations: 0,
            residual: f64::NAN,
            reason: "no PLE scan shows a cavity resonance".into(),
        });
    }
    let fallback = (
        T::lit(median(&found.iter().map(|f| f.0).collect::<Vec<_>>()).expect("non-empty")),
        T::lit(median(&found.iter().map(|f| f.1).collect::<Vec<_>>()).expect("non-empty")),
    );
    let missing = located.iter().filter(|l| l.is_none()).count();
    if missing > 0 {
        log::debug!("{missing} PLE scans without a resonance use the median window");
    }
    Ok(scans
        .iter()
        .zip(&located)
        .map(|(s, l)| {
            let (center, fwhm) = l.unwrap_or(fallback);
            let half = fwhm * window_fwhm;
            let r = s.fluorescence.index_range(center - half, center + half);
            s.fluorescence.ordinate()[r].iter().copied().sum()
        })
        .collect())
}

/// Peak-normalised inhomogeneous line with a Gaussian FWHM in GHz.
pub fn aggregate_ple<T: Real>(scans: &[PleScan<T>], window_fwhm: T) -> Result<PleResult<T>> {
    if scans.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "{} PLE scans, at least 5 required",
            scans.len()
        )));
    }
    let mut order: Vec<usize> = (0..scans.len()).collect();
    order.sort_by(|&a, &b| {
        scans[a]
            .excitation_nm
            .partial_cmp(&scans[b].excitation_nm)
            .expect("finite")
    });
    let sorted: Vec<PleScan<T>> = order.iter().map(|&i| scans[i].clone()).collect();
    let counts = ple_window_sums(&sorted, window_fwhm)?;
    let top = counts.iter().copied().fold(T::neg_infinity(), T::max);
    if !(top > T::zero()) {
        return Err(Error::InvalidInput(
            "PLE window collected no counts; widen the window".into(),
        ));
    }
    let normalized: Vec<T> = counts.iter().map(|&c| c / top).collect();
    let freqs: Vec<f64> = sorted.iter().map(|s| nm_to_thz(s.excitation_nm.as_f64())).collect();
    let reference = freqs.iter().sum::<f64>() / freqs.len() as f64;
    let detuning: Vec<f64> = freqs.iter().map(|f| (f - reference) * 1e3).collect();
    let y: Vec<f64> = normalized.iter().map(|v| v.as_f64()).collect();

    let q = (y.len() / 4).max(1);
    let outer: Vec<f64> = y[..q].iter().chain(&y[y.len() - q..]).copied().collect();
    let off0 = median(&outer).expect("non-empty");
    let peak = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty");
    let amp0 = y[peak] - off0;
    let level = off0 + amp0 / 2.0;
    let above: Vec<f64> = detuning
        .iter()
        .zip(&y)
        .filter(|(_, &v)| v >= level)
        .map(|(d, _)| *d)
        .collect();
    let spread =
        above.iter().copied().fold(f64::NEG_INFINITY, f64::max) - above.iter().copied().fold(f64::INFINITY, f64::min);
    let step = (detuning[detuning.len() - 1] - detuning[0]).abs() / (detuning.len() - 1) as f64;
    let sigma0 = (spread.abs().max(step)) / GAUSSIAN_FWHM_PER_SIGMA;
    let out = least_squares(&Gaussian, &detuning, &y, &[amp0, detuning[peak], sigma0, off0])?;
    let sigma = out.params[2].abs();
    let center_thz = reference + out.params[1] * 1e-3;
    Ok(PleResult {
        excitation_nm: sorted.iter().map(|s| s.excitation_nm).collect(),
        detuning_ghz: detuning.into_iter().map(T::lit).collect(),
        reference_thz: T::lit(reference),
        counts,
        normalized,
        center_nm: T::lit(crate::scalar::thz_to_nm(center_thz)),
        fwhm_ghz: T::lit(GAUSSIAN_FWHM_PER_SIGMA * sigma),
        fwhm_uncertainty_ghz: T::lit(GAUSSIAN_FWHM_PER_SIGMA * out.std_errors[2]),
        goodness: T::lit(out.reduced_residual.sqrt() / out.params[0].abs()),
    })
}
