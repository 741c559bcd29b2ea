use serde::Serialize;

use super::fit::{least_squares, Lorentzian};
use super::trace::ScanTrace;
use crate::error::{Error, Result};
use crate::scalar::{median, Real};

/// Result of a single-Lorentzian fit, in abscissa units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceFit<T> {
    pub center: T,
    pub fwhm: T,
    /// Peak height above the offset (dips are reported inverted).
    pub amplitude: T,
    pub offset: T,
    pub center_uncertainty: T,
    pub fwhm_uncertainty: T,
    /// RMS residual relative to the amplitude.
    pub goodness: T,
    pub inverted: bool,
    pub warnings: Vec<String>,
}

/// Contiguous runs above `enter`, ended when dropping below `exit`; returns the index of each run's maximum.
pub(crate) fn peak_runs(y: &[f64], enter: f64, exit: f64) -> Vec<usize> {
    let mut peaks = Vec::new();
    let mut current: Option<usize> = None;
    for (i, &v) in y.iter().enumerate() {
        match current {
            None if v > enter => current = Some(i),
            Some(best) if v < exit => {
                peaks.push(best);
                current = None;
            }
            Some(best) if v > y[best] => current = Some(i),
            _ => {}
        }
    }
    if let Some(best) = current {
        peaks.push(best);
    }
    peaks
}

fn outer_quartiles(y: &[f64]) -> Vec<f64> {
    let q = (y.len() / 4).max(1);
    y[..q].iter().chain(&y[y.len() - q..]).copied().collect()
}

/// Half-height crossing span around `peak`; falls back to twice the one-sided span.
fn half_height_span(x: &[f64], y: &[f64], peak: usize, level: f64) -> Option<f64> {
    let cross = |i: usize, j: usize| x[i] + (level - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let left = (1..=peak).rev().find(|&i| y[i - 1] <= level).map(|i| cross(i - 1, i));
    let right = (peak..y.len() - 1)
        .find(|&i| y[i + 1] <= level)
        .map(|i| cross(i, i + 1));
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        (Some(l), None) => Some(2.0 * (x[peak] - l)),
        (None, Some(r)) => Some(2.0 * (r - x[peak])),
        (None, None) => None,
    }
}

/// Fit one Lorentzian to samples in `window` (whole trace when `None`).
/// Reflection traces are inverted first.
pub fn fit_lorentzian<T: Real>(trace: &ScanTrace<T>, window: Option<(T, T)>) -> Result<ResonanceFit<T>> {
    let range = match window {
        Some((lo, hi)) if lo < hi => trace.index_range(lo, hi),
        Some((lo, hi)) => return Err(Error::InvalidInput(format!("empty fit window [{lo}, {hi}]"))),
        None => 0..trace.len(),
    };
    let x: Vec<f64> = trace.abscissa()[range.clone()].iter().map(|v| v.as_f64()).collect();
    let y: Vec<f64> = trace.ordinate()[range].iter().map(|v| v.as_f64()).collect();
    let fit = fit_lorentzian_samples(&x, &y, trace.meta.channel.is_dip())?;
    Ok(ResonanceFit {
        center: T::lit(fit.center),
        fwhm: T::lit(fit.fwhm),
        amplitude: T::lit(fit.amplitude),
        offset: T::lit(fit.offset),
        center_uncertainty: T::lit(fit.center_uncertainty),
        fwhm_uncertainty: T::lit(fit.fwhm_uncertainty),
        goodness: T::lit(fit.goodness),
        inverted: fit.inverted,
        warnings: fit.warnings,
    })
}

pub(crate) fn fit_lorentzian_samples(x: &[f64], y_raw: &[f64], invert: bool) -> Result<ResonanceFit<f64>> {
    if x.len() < super::trace::MIN_SAMPLES {
        return Err(Error::InvalidTrace(format!(
            "fit window holds {} samples, at least {} required",
            x.len(),
            super::trace::MIN_SAMPLES
        )));
    }
    let sign = if invert { -1.0 } else { 1.0 };
    let y: Vec<f64> = y_raw.iter().map(|v| sign * v).collect();
    let no_peak = |reason: &str| Error::NonConvergence {
        iterations: 0,
        residual: f64::NAN,
        reason: reason.to_string(),
    };

    let outer = outer_quartiles(&y);
    let offset0 = median(&outer).expect("non-empty");
    let deviations: Vec<f64> = outer.iter().map(|v| (v - offset0).abs()).collect();
    let noise = 1.4826 * median(&deviations).expect("non-empty");
    let peak = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty");
    let amp0 = y[peak] - offset0;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if !(amp0 > 1e-12 * scale) || amp0 < 5.0 * noise {
        return Err(no_peak("no extremum above the baseline noise"));
    }
    let span = x[x.len() - 1] - x[0];
    let w0 = half_height_span(x, &y, peak, offset0 + amp0 / 2.0)
        .filter(|w| *w > 0.0)
        .unwrap_or(span / 4.0);

    let mut warnings = Vec::new();
    let runs = peak_runs(&y, offset0 + amp0 / 2.0, offset0 + amp0 / 4.0);
    if runs.len() > 1 {
        let others: Vec<String> = runs
            .iter()
            .filter(|&&i| i != peak)
            .map(|&i| format!("{:.6}", x[i]))
            .collect();
        let msg = format!(
            "window holds {} peaks; fitted the one at {:.6}, ignored {}",
            runs.len(),
            x[peak],
            others.join(", ")
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }

    // Fit in coordinates scaled by the initial guesses.
    let (xc, ys) = (x[peak], amp0);
    let xs: Vec<f64> = x.iter().map(|v| (v - xc) / w0).collect();
    let yn: Vec<f64> = y.iter().map(|v| (v - offset0) / ys).collect();
    let out = least_squares(&Lorentzian, &xs, &yn, &[1.0, 0.0, 1.0, 0.0])?;
    let p = &out.params;
    let amplitude = p[0] * ys;
    let fwhm = p[2].abs() * w0;
    let center = xc + p[1] * w0;
    if !(amplitude > 0.0) || !(fwhm > 0.0) || center < x[0] || center > x[x.len() - 1] {
        return Err(Error::NonConvergence {
            iterations: out.evaluations,
            residual: out.reduced_residual,
            reason: format!("fit left the window (center {center}, fwhm {fwhm}, amplitude {amplitude})"),
        });
    }
    Ok(ResonanceFit {
        center,
        fwhm,
        amplitude,
        offset: sign * (offset0 + p[3] * ys),
        center_uncertainty: out.std_errors[1] * w0,
        fwhm_uncertainty: out.std_errors[2] * w0,
        goodness: out.reduced_residual.sqrt() / p[0],
        inverted: invert,
        warnings,
    })
}

/// Finesse from a scan across two adjacent longitudinal resonances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinesseResult<T> {
    pub finesse: T,
    pub finesse_uncertainty: T,
    pub resonance_pair: (ResonanceFit<T>, ResonanceFit<T>),
    /// Length change per abscissa unit, from spacing = λ/2.
    pub calibration_nm_per_unit: T,
    pub fwhm_nm: T,
    pub wavelength_nm: T,
}

/// Calibrate the abscissa by setting the resonance spacing to λ/2, then
/// F = (λ/2) / mean FWHM. Exactly two dominant resonances are required.
pub fn extract_finesse<T: Real>(trace: &ScanTrace<T>, wavelength_nm: T) -> Result<FinesseResult<T>> {
    if !(wavelength_nm > T::zero()) {
        return Err(Error::InvalidInput("wavelength must be positive".into()));
    }
    let sign = if trace.meta.channel.is_dip() { -1.0 } else { 1.0 };
    let x: Vec<f64> = trace.abscissa().iter().map(|v| v.as_f64()).collect();
    let y: Vec<f64> = trace.ordinate().iter().map(|v| sign * v.as_f64()).collect();
    let base = median(&y).expect("non-empty");
    let top = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let runs = peak_runs(&y, base + 0.5 * (top - base), base + 0.25 * (top - base));
    if runs.len() != 2 || !(top > base) {
        return Err(Error::PeakCount {
            expected: 2,
            found: if top > base { runs.len() } else { 0 },
        });
    }
    let spacing0 = x[runs[1]] - x[runs[0]];
    let dx = x[1] - x[0];
    let mut fits = Vec::with_capacity(2);
    for &i in &runs {
        let level = base + 0.5 * (y[i] - base);
        let w = half_height_span(&x, &y, i, level).unwrap_or(spacing0 / 10.0);
        let half = (30.0 * w).max(16.0 * dx).min(spacing0 / 2.0);
        let lo = x.partition_point(|&v| v < x[i] - half);
        let hi = x.partition_point(|&v| v <= x[i] + half);
        fits.push(fit_lorentzian_samples(
            &x[lo..hi],
            &trace_slice(trace, lo, hi),
            trace.meta.channel.is_dip(),
        )?);
    }
    let (a, b) = (fits.remove(0), fits.remove(0));
    let spacing = (b.center - a.center).abs();
    let mean_fwhm = 0.5 * (a.fwhm + b.fwhm);
    let finesse = spacing / mean_fwhm;
    if !(finesse > 1.0) {
        return Err(Error::InvalidTrace(format!(
            "resonances overlap (finesse {finesse:.3})"
        )));
    }
    let rel_spacing = a.center_uncertainty.hypot(b.center_uncertainty) / spacing;
    let rel_width = 0.5 * a.fwhm_uncertainty.hypot(b.fwhm_uncertainty) / mean_fwhm;
    let half_lambda = wavelength_nm.as_f64() / 2.0;
    let cal = half_lambda / spacing;
    let conv = |f: ResonanceFit<f64>| ResonanceFit {
        center: T::lit(f.center),
        fwhm: T::lit(f.fwhm),
        amplitude: T::lit(f.amplitude),
        offset: T::lit(f.offset),
        center_uncertainty: T::lit(f.center_uncertainty),
        fwhm_uncertainty: T::lit(f.fwhm_uncertainty),
        goodness: T::lit(f.goodness),
        inverted: f.inverted,
        warnings: f.warnings,
    };
    Ok(FinesseResult {
        finesse: T::lit(finesse),
        finesse_uncertainty: T::lit(finesse * rel_spacing.hypot(rel_width)),
        resonance_pair: (conv(a), conv(b)),
        calibration_nm_per_unit: T::lit(cal),
        fwhm_nm: T::lit(mean_fwhm * cal),
        wavelength_nm,
    })
}

fn trace_slice<T: Real>(trace: &ScanTrace<T>, lo: usize, hi: usize) -> Vec<f64> {
    trace.ordinate()[lo..hi].iter().map(|v| v.as_f64()).collect()
}
