use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fewest samples accepted in a trace.
pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AbscissaUnit {
    DisplacementNm,
    WavelengthNm,
    TimeNs,
    /// Uncalibrated piezo or stage units.
    #[default]
    Arbitrary,
}

impl AbscissaUnit {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "displacement_nm" | "nm_displacement" => Ok(Self::DisplacementNm),
            "wavelength_nm" | "nm_wavelength" => Ok(Self::WavelengthNm),
            "time_ns" | "ns" | "ns_time" => Ok(Self::TimeNs),
            "arb" | "arbitrary" | "au" => Ok(Self::Arbitrary),
            other => Err(Error::Parse(format!("unknown abscissa unit {other:?}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DisplacementNm => "displacement_nm",
            Self::WavelengthNm => "wavelength_nm",
            Self::TimeNs => "time_ns",
            Self::Arbitrary => "arb",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    /// Resonances appear as dips.
    Reflection,
    #[default]
    Transmission,
    Fluorescence,
}

impl Channel {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "reflection" => Ok(Self::Reflection),
            "transmission" => Ok(Self::Transmission),
            "fluorescence" => Ok(Self::Fluorescence),
            other => Err(Error::Parse(format!("unknown channel {other:?}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Reflection => "reflection",
            Self::Transmission => "transmission",
            Self::Fluorescence => "fluorescence",
        }
    }

    pub fn is_dip(self) -> bool {
        self == Self::Reflection
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TraceMeta {
    pub units: AbscissaUnit,
    pub channel: Channel,
    pub temperature_k: Option<f64>,
    pub excitation_nm: Option<f64>,
    /// Unrecognised `#meta` keys, kept verbatim.
    pub extra: BTreeMap<String, String>,
}

impl TraceMeta {
    pub fn new(units: AbscissaUnit, channel: Channel) -> Self {
        Self {
            units,
            channel,
            ..Self::default()
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let number = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Parse(format!("#meta {key}: cannot parse {v:?} as a number")))
        };
        match key.to_ascii_lowercase().as_str() {
            "units" | "unit" => self.units = AbscissaUnit::parse(value)?,
            "channel" => self.channel = Channel::parse(value)?,
            "temperature_k" => self.temperature_k = Some(number(value)?),
            "excitation_nm" => self.excitation_nm = Some(number(value)?),
            _ => {
                self.extra.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }
}

/// A sampled record with a strictly increasing abscissa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTrace<T> {
    abscissa: Vec<T>,
    ordinate: Vec<T>,
    pub meta: TraceMeta,
}

impl<T: Real> ScanTrace<T> {
    /// A strictly decreasing abscissa is reversed together with the ordinate.
    pub fn new(mut abscissa: Vec<T>, mut ordinate: Vec<T>, meta: TraceMeta) -> Result<Self> {
        if abscissa.len() != ordinate.len() {
            return Err(Error::InvalidTrace(format!(
                "abscissa has {} samples but ordinate has {}",
                abscissa.len(),
                ordinate.len()
            )));
        }
        if abscissa.len() < MIN_SAMPLES {
            return Err(Error::InvalidTrace(format!(
                "{} samples, at least {MIN_SAMPLES} required",
                abscissa.len()
            )));
        }
        if abscissa.iter().chain(&ordinate).any(|v| !v.is_finite()) {
            return Err(Error::InvalidTrace("non-finite sample".into()));
        }
        if abscissa[1] < abscissa[0] {
            abscissa.reverse();
            ordinate.reverse();
        }
        if abscissa.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTrace("abscissa is not strictly monotone".into()));
        }
        Ok(Self {
            abscissa,
            ordinate,
            meta,
        })
    }

    pub fn abscissa(&self) -> &[T] {
        &self.abscissa
    }

    pub fn ordinate(&self) -> &[T] {
        &self.ordinate
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    /// Median sample spacing.
    pub fn sample_period(&self) -> T {
        let d: Vec<T> = self.abscissa.windows(2).map(|w| w[1] - w[0]).collect();
        crate::scalar::median(&d).expect("trace has at least two samples")
    }

    /// Index range of samples with abscissa inside `[lo, hi]`.
    pub fn index_range(&self, lo: T, hi: T) -> std::ops::Range<usize> {
        let a = self.abscissa.partition_point(|&x| x < lo);
        let b = self.abscissa.partition_point(|&x| x <= hi);
        a..b.max(a)
    }

    /// Parse `#meta key=value` lines followed by `abscissa,value` rows.
    /// Other `#` lines are comments; a non-numeric first row is a header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut meta = TraceMeta::default();
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut seen_row = false;
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#meta") {
                for pair in rest.split_whitespace() {
                    let (k, v) = pair.split_once('=').ok_or_else(|| {
                        Error::Parse(format!(
                            "line {}: expected key=value in #meta, got {pair:?}",
                            lineno + 1
                        ))
                    })?;
                    meta.set(k, v)?;
                }
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = match (cols.next(), cols.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::Parse(format!("line {}: expected two columns", lineno + 1))),
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(a), Ok(b)) => {
                    x.push(T::lit(a));
                    y.push(T::lit(b));
                }
                _ if !seen_row => {}
                _ => return Err(Error::Parse(format!("line {}: cannot parse {line:?}", lineno + 1))),
            }
            seen_row = true;
        }
        Self::new(x, y, meta)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Parse(e.to_string());
        writeln!(
            w,
            "#meta units={} channel={}",
            self.meta.units.as_str(),
            self.meta.channel.as_str()
        )
        .map_err(io)?;
        if let Some(t) = self.meta.temperature_k {
            writeln!(w, "#meta temperature_K={t}").map_err(io)?;
        }
        if let Some(e) = self.meta.excitation_nm {
            writeln!(w, "#meta excitation_nm={e}").map_err(io)?;
        }
        for (k, v) in &self.meta.extra {
            writeln!(w, "#meta {k}={v}").map_err(io)?;
        }
        writeln!(w, "abscissa,value").map_err(io)?;
        for (a, b) in self.abscissa.iter().zip(&self.ordinate) {
            writeln!(w, "{a},{b}").map_err(io)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(n: usize) -> String {
        (0..n).map(|i| format!("{i},{}\n", i * i)).collect()
    }

    #[test]
    fn parses_meta_and_header() {
        let text = format!(
            "#meta units=time_ns channel=fluorescence\n#meta temperature_K=4 excitation_nm=720 run=7\n# comment\nabscissa,value\n{}",
            body(20)
        );
        let t = ScanTrace::<f64>::from_csv(text.as_bytes()).unwrap();
        assert_eq!(t.len(), 20);
        assert_eq!(t.meta.units, AbscissaUnit::TimeNs);
        assert_eq!(t.meta.channel, Channel::Fluorescence);
        assert_eq!(t.meta.temperature_k, Some(4.0));
        assert_eq!(t.meta.extra["run"], "7");
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        let back = ScanTrace::<f64>::from_csv(out.as_slice()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_bad_traces() {
        assert!(ScanTrace::<f64>::from_csv(body(10).as_bytes()).is_err());
        let text = format!("{}5,1\n", body(20));
        assert!(matches!(
            ScanTrace::<f64>::from_csv(text.as_bytes()),
            Err(Error::InvalidTrace(_))
        ));
        let text = format!("{}x,1\n", body(20));
        assert!(matches!(
            ScanTrace::<f64>::from_csv(text.as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(ScanTrace::<f64>::from_csv("#meta channel=sideways\n".as_bytes()).is_err());
    }

    #[test]
    fn decreasing_abscissa_is_reversed() {
        let x: Vec<f64> = (0..20).rev().map(f64::from).collect();
        let y: Vec<f64> = (0..20).map(f64::from).collect();
        let t = ScanTrace::new(x, y, TraceMeta::default()).unwrap();
        assert_eq!(t.abscissa()[0], 0.0);
        assert_eq!(t.ordinate()[0], 19.0);
    }
}
