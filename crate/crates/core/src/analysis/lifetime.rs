use serde::Serialize;

use super::fit::{least_squares, Exponential};
use super::trace::ScanTrace;
use crate::error::{Error, Result};
use crate::scalar::{median, Real};

/// Samples skipped after the end of the excitation pulse.
pub const GUARD_SAMPLES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeFit<T> {
    pub tau_ns: T,
    pub tau_uncertainty_ns: T,
    /// Signal above background at the window start.
    pub amplitude: T,
    pub background: T,
    pub background_uncertainty: T,
    pub window_start_ns: T,
    /// RMS residual relative to the amplitude.
    pub goodness: T,
    pub warnings: Vec<String>,
}

/// Single exponential plus constant, fitted from `pulse_end_ns` plus two sample periods.
pub fn fit_lifetime<T: Real>(trace: &ScanTrace<T>, pulse_end_ns: T) -> Result<LifetimeFit<T>> {
    fit_lifetime_with_guard(trace, pulse_end_ns, GUARD_SAMPLES)
}

pub fn fit_lifetime_with_guard<T: Real>(
    trace: &ScanTrace<T>,
    pulse_end_ns: T,
    guard_samples: usize,
) -> Result<LifetimeFit<T>> {
    let period = trace.sample_period().as_f64();
    let t0 = pulse_end_ns.as_f64() + guard_samples as f64 * period;
    let start = trace.abscissa().partition_point(|v| v.as_f64() < t0);
    let t: Vec<f64> = trace.abscissa()[start..].iter().map(|v| v.as_f64()).collect();
    let y: Vec<f64> = trace.ordinate()[start..].iter().map(|v| v.as_f64()).collect();
    if t.len() < 8 {
        return Err(Error::InvalidTrace(format!(
            "{} samples after the pulse end and guard interval, at least 8 required",
            t.len()
        )));
    }
    let negative = |reason: String| Error::NonConvergence {
        iterations: 0,
        residual: f64::NAN,
        reason,
    };

    // Background from the last tenth, τ from log-linear regression on the upper half.
    let tail = (t.len() / 10).max(3);
    let b0 = median(&y[y.len() - tail..]).expect("non-empty");
    let peak = y.iter().copied().fold(f64::NEG_INFINITY, f64::max) - b0;
    if !(peak > 0.0) {
        return Err(negative("no decay above background".into()));
    }
    let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(&y) {
        let s = yi - b0;
        if s >= peak / 2.0 {
            let (u, v) = (ti - t0, s.ln());
            sx += u;
            sy += v;
            sxx += u * u;
            sxy += u * v;
            n += 1.0;
        }
    }
    let denom = n * sxx - sx * sx;
    let slope = if n >= 2.0 && denom > 0.0 {
        (n * sxy - sx * sy) / denom
    } else {
        f64::NAN
    };
    if !(slope < 0.0) {
        return Err(negative(format!("initial log-linear slope {slope} is not a decay")));
    }
    let tau0 = -1.0 / slope;
    let a0 = ((sy - slope * sx) / n).exp();

    let ys: Vec<f64> = y.iter().map(|v| v / a0).collect();
    let out = least_squares(&Exponential { t0 }, &t, &ys, &[1.0, tau0, b0 / a0])?;
    let (amp, tau, bg) = (out.params[0] * a0, out.params[1], out.params[2] * a0);
    if !(tau > 0.0) || !(amp > 0.0) {
        return Err(Error::NonConvergence {
            iterations: out.evaluations,
            residual: out.reduced_residual,
            reason: format!("fitted decay is not a positive exponential (tau {tau} ns, amplitude {amp})"),
        });
    }
    let mut warnings = Vec::new();
    let length = t[t.len() - 1] - t0;
    if length < 3.0 * tau {
        let msg = format!(
            "fit window {length:.3} ns is shorter than three lifetimes ({:.3} ns)",
            3.0 * tau
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(LifetimeFit {
        tau_ns: T::lit(tau),
        tau_uncertainty_ns: T::lit(out.std_errors[1]),
        amplitude: T::lit(amp),
        background: T::lit(bg),
        background_uncertainty: T::lit(out.std_errors[2] * a0),
        window_start_ns: T::lit(t0),
        goodness: T::lit(out.reduced_residual.sqrt() / out.params[0]),
        warnings,
    })
}
