//! Noiseless forward models for building test and demonstration traces.

use super::trace::{AbscissaUnit, Channel, ScanTrace, TraceMeta};
use crate::error::Result;
use crate::optics::linear_grid;
use crate::scalar::Real;

/// Lorentzian resonances of equal width on an offset; reflection traces are dips.
pub fn lorentzian_scan<T: Real>(
    centers: &[T],
    fwhm: T,
    amplitude: T,
    offset: T,
    channel: Channel,
    (start, stop, step): (T, T, T),
) -> Result<ScanTrace<T>> {
    let x = linear_grid(start, stop, step);
    let sign = if channel.is_dip() { -T::one() } else { T::one() };
    let y = x
        .iter()
        .map(|&xi| {
            offset
                + sign
                    * centers
                        .iter()
                        .map(|&c| {
                            let u = T::lit(2.0) * (xi - c) / fwhm;
                            amplitude / (T::one() + u * u)
                        })
                        .sum::<T>()
        })
        .collect();
    ScanTrace::new(x, y, TraceMeta::new(AbscissaUnit::Arbitrary, channel))
}

/// Two adjacent resonances `spacing` apart with widths set by `finesse`.
pub fn finesse_scan<T: Real>(
    finesse: T,
    spacing: T,
    amplitude: T,
    offset: T,
    channel: Channel,
    samples_per_fwhm: T,
) -> Result<ScanTrace<T>> {
    let fwhm = spacing / finesse;
    let margin = spacing / T::lit(4.0);
    lorentzian_scan(
        &[T::zero(), spacing],
        fwhm,
        amplitude,
        offset,
        channel,
        (-margin, spacing + margin, fwhm / samples_per_fwhm),
    )
}

/// Flat until `pulse_end_ns`, then A·exp(−(t − pulse_end)/τ) + background.
pub fn decay_trace<T: Real>(
    tau_ns: T,
    amplitude: T,
    background: T,
    pulse_end_ns: T,
    (start, stop, step): (T, T, T),
) -> Result<ScanTrace<T>> {
    let t = linear_grid(start, stop, step);
    let y = t
        .iter()
        .map(|&ti| {
            if ti < pulse_end_ns {
                amplitude + background
            } else {
                amplitude * (-(ti - pulse_end_ns) / tau_ns).exp() + background
            }
        })
        .collect();
    ScanTrace::new(t, y, TraceMeta::new(AbscissaUnit::TimeNs, Channel::Fluorescence))
}
