use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::levels::{splittings_from_strain, GroupIVLevels, Line, OrientationClass, StrainState};
use super::voigt::voigt;
use crate::error::{Error, Result};
use crate::scalar::{consts, Real};

/// Ensemble line-shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec<T> {
    /// Homogeneous FWHM at zero temperature.
    pub homogeneous_linewidth_mhz: T,
    /// Standard deviation of the Gaussian inhomogeneous distribution.
    pub inhomogeneous_sigma_ghz: T,
    pub temperature_k: T,
    pub emitter_density_per_cm2: T,
    /// Fraction of emitters in class 1.
    pub class_mix: T,
    /// Coefficient a of Γ(T) = Γ0 + a·T³.
    pub broadening_mhz_per_k3: T,
    /// Relative strengths of lines A to D before thermal weighting.
    pub line_amplitudes: [T; 4],
}

impl<T: Real> EnsembleSpec<T> {
    /// Equal class populations, unit line amplitudes, a = 0.1 MHz/K³.
    pub fn new(homogeneous_linewidth_mhz: T, inhomogeneous_sigma_ghz: T, temperature_k: T) -> Self {
        Self {
            homogeneous_linewidth_mhz,
            inhomogeneous_sigma_ghz,
            temperature_k,
            emitter_density_per_cm2: T::zero(),
            class_mix: T::lit(0.5),
            broadening_mhz_per_k3: T::lit(0.1),
            line_amplitudes: [T::one(); 4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
            }
        };
        positive("homogeneous_linewidth_mhz", self.homogeneous_linewidth_mhz)?;
        positive("inhomogeneous_sigma_ghz", self.inhomogeneous_sigma_ghz)?;
        let non_negative = [
            ("temperature_k", self.temperature_k),
            ("emitter_density_per_cm2", self.emitter_density_per_cm2),
            ("broadening_mhz_per_k3", self.broadening_mhz_per_k3),
        ];
        for (name, v) in non_negative
            .into_iter()
            .chain(self.line_amplitudes.iter().map(|&a| ("line_amplitudes", a)))
        {
            if !(v >= T::zero() && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.class_mix >= T::zero() && self.class_mix <= T::one()) {
            return Err(Error::InvalidInput(format!(
                "class_mix must lie in [0, 1], got {}",
                self.class_mix
            )));
        }
        Ok(())
    }

    /// Γ(T) = Γ0 + a·T³ in MHz.
    pub fn homogeneous_fwhm_mhz(&self) -> T {
        self.homogeneous_linewidth_mhz + self.broadening_mhz_per_k3 * self.temperature_k.powi(3)
    }

    pub fn class_weight(&self, class: OrientationClass) -> T {
        match class {
            OrientationClass::One => self.class_mix,
            OrientationClass::Two => T::one() - self.class_mix,
        }
    }

    /// Thermal populations (upper, lower) of the two excited branches.
    pub fn excited_populations(&self, delta_es_ghz: T) -> (T, T) {
        if self.temperature_k <= T::zero() {
            return (T::zero(), T::one());
        }
        let x = consts::h_over_kb::<T>() * delta_es_ghz * T::lit(1e9) / self.temperature_k;
        let b = (-x).exp();
        (b / (T::one() + b), T::one() / (T::one() + b))
    }
}

/// One weighted line of the ensemble spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineContribution<T> {
    pub class: OrientationClass,
    pub line: Line,
    pub frequency_thz: T,
    pub weight: T,
}

/// Sampled spectrum as density per nm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum<T> {
    pub wavelength_nm: Vec<T>,
    pub intensity: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Parse(e.to_string());
        out.write_record(["wavelength_nm", "intensity"]).map_err(io)?;
        for (l, i) in self.wavelength_nm.iter().zip(&self.intensity) {
            out.write_record([l.to_string(), i.to_string()]).map_err(io)?;
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Per-line weights: class population share × line amplitude × excited-branch population.
/// Several strain states of one class split that class's share evenly.
pub fn line_weights<T: Real>(
    levels: &GroupIVLevels<T>,
    strains: &[StrainState<T>],
    spec: &EnsembleSpec<T>,
) -> Vec<LineContribution<T>> {
    let mut per_class = [0usize; 2];
    for s in strains {
        per_class[s.class.index()] += 1;
    }
    let mut out = Vec::with_capacity(4 * strains.len());
    for s in strains {
        let fs = splittings_from_strain(levels, s);
        let (upper, lower) = spec.excited_populations(fs.delta_es_ghz);
        let share = spec.class_weight(s.class) / T::from_count(per_class[s.class.index()]);
        for line in Line::ALL {
            let pop = if line.from_upper_excited() { upper } else { lower };
            out.push(LineContribution {
                class: s.class,
                line,
                frequency_thz: fs.line_thz(line),
                weight: share * spec.line_amplitudes[line.index()] * pop,
            });
        }
    }
    out
}

fn check_grid<T: Real>(grid_nm: &[T]) -> Result<(T, T)> {
    if grid_nm.len() < 2 {
        return Err(Error::InvalidInput("wavelength grid needs at least two points".into()));
    }
    if grid_nm.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "wavelength grid must be strictly increasing".into(),
        ));
    }
    Ok((grid_nm[0], grid_nm[grid_nm.len() - 1]))
}

fn render<T: Real>(lines: &[LineContribution<T>], spec: &EnsembleSpec<T>, grid_nm: &[T]) -> Vec<T> {
    let sigma = spec.inhomogeneous_sigma_ghz;
    let gamma = spec.homogeneous_fwhm_mhz() * T::lit(0.5e-3);
    let c = consts::c::<T>() * T::lit(1e-3); // nm·THz
    grid_nm
        .iter()
        .map(|&l| {
            let nu = c / l;
            let jacobian = c / (l * l) * T::lit(1e3); // GHz per nm
            lines
                .iter()
                .filter(|lc| lc.weight > T::zero())
                .map(|lc| lc.weight * voigt((nu - lc.frequency_thz) * T::lit(1e3), sigma, gamma))
                .sum::<T>()
                * jacobian
        })
        .collect()
}

/// Sum of Voigt lines (temperature-broadened Lorentzian ⊗ inhomogeneous Gaussian),
/// normalised so each line integrates to its weight over wavelength.
pub fn synthesize_zpl_spectrum<T: Real>(
    levels: &GroupIVLevels<T>,
    strains: &[StrainState<T>],
    spec: &EnsembleSpec<T>,
    grid_nm: &[T],
) -> Result<Spectrum<T>> {
    levels.validate()?;
    spec.validate()?;
    for s in strains {
        s.validate()?;
    }
    let (lo, hi) = check_grid(grid_nm)?;
    let lines = line_weights(levels, strains, spec);
    let uncovered: Vec<String> = lines
        .iter()
        .filter_map(|lc| {
            let nm = crate::scalar::thz_to_nm(lc.frequency_thz);
            (nm < lo || nm > hi).then(|| format!("class {} line {} at {:.4} nm", lc.class, lc.line, nm))
        })
        .collect();
    if !uncovered.is_empty() {
        return Err(Error::GridTooNarrow(uncovered.join(", ")));
    }
    Ok(Spectrum {
        wavelength_nm: grid_nm.to_vec(),
        intensity: render(&lines, spec, grid_nm),
    })
}

/// A strain sample at one position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrainNode<T> {
    pub position_um: T,
    pub strain: StrainState<T>,
}

/// Strain along a one-dimensional path, sampled per orientation class.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct StrainField<T> {
    nodes: [Vec<StrainNode<T>>; 2],
}

impl<T: Real> StrainField<T> {
    pub fn new(nodes: impl IntoIterator<Item = StrainNode<T>>) -> Result<Self> {
        let mut by_class: [Vec<StrainNode<T>>; 2] = [Vec::new(), Vec::new()];
        for n in nodes {
            n.strain.validate()?;
            if !n.position_um.is_finite() {
                return Err(Error::InvalidInput("strain node position must be finite".into()));
            }
            by_class[n.strain.class.index()].push(n);
        }
        for v in &mut by_class {
            v.sort_by(|a, b| a.position_um.partial_cmp(&b.position_um).expect("finite positions"));
            if v.windows(2).any(|w| w[0].position_um == w[1].position_um) {
                return Err(Error::InvalidInput(
                    "duplicate strain node position within a class".into(),
                ));
            }
        }
        Ok(Self { nodes: by_class })
    }

    /// Uniform strain for both classes.
    pub fn constant(strains: &[StrainState<T>]) -> Result<Self> {
        Self::new(strains.iter().map(|&s| StrainNode {
            position_um: T::zero(),
            strain: s,
        }))
    }

    /// Parse `position_um,class,axial_ghz,transverse_ghz[,transverse_excited_ghz]`.
    /// A missing excited-state column is filled with `excited_ratio × transverse_ghz`.
    pub fn from_csv<R: Read>(reader: R, excited_ratio: T) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        let column = |name: &str| headers.iter().position(|h| h == name);
        let required = ["position_um", "class", "axial_ghz", "transverse_ghz"];
        let idx: Vec<usize> = required
            .iter()
            .map(|&n| column(n).ok_or_else(|| Error::Parse(format!("strain field is missing column {n}"))))
            .collect::<Result<_>>()?;
        let excited_col = column("transverse_excited_ghz");
        let mut nodes = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("strain field row {}: {e}", i + 1)))?;
            let field = |j: usize| -> Result<f64> {
                let raw = rec
                    .get(j)
                    .ok_or_else(|| Error::Parse(format!("strain field row {}: too few columns", i + 1)))?;
                raw.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("strain field row {}: cannot parse {raw:?}", i + 1)))
            };
            let class_code = field(idx[1])?;
            if class_code.fract() != 0.0 || !(0.0..=255.0).contains(&class_code) {
                return Err(Error::Parse(format!(
                    "strain field row {}: bad class {class_code}",
                    i + 1
                )));
            }
            let class = OrientationClass::try_from(class_code as u8)?;
            let tg = T::lit(field(idx[3])?);
            // Optional fifth column, named or positional.
            let excited = match excited_col {
                Some(j) => Some(field(j)?),
                None if rec.len() > headers.len() => Some(field(headers.len())?),
                None => None,
            };
            let te = excited.map(T::lit).unwrap_or(tg * excited_ratio);
            nodes.push(StrainNode {
                position_um: T::lit(field(idx[0])?),
                strain: StrainState::new(T::lit(field(idx[2])?), tg, te, class)?,
            });
        }
        if nodes.is_empty() {
            return Err(Error::Parse("strain field has no rows".into()));
        }
        Self::new(nodes)
    }

    pub fn nodes(&self, class: OrientationClass) -> &[StrainNode<T>] {
        &self.nodes[class.index()]
    }

    /// Sorted distinct node positions over both classes.
    pub fn positions_um(&self) -> Vec<T> {
        let mut p: Vec<T> = self.nodes.iter().flatten().map(|n| n.position_um).collect();
        p.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));
        p.dedup();
        p
    }

    /// Linear interpolation between nodes; a single node is taken as uniform.
    pub fn at(&self, class: OrientationClass, position_um: T) -> Result<Option<StrainState<T>>> {
        let nodes = &self.nodes[class.index()];
        match nodes.len() {
            0 => return Ok(None),
            1 => return Ok(Some(nodes[0].strain)),
            _ => {}
        }
        let (first, last) = (nodes[0].position_um, nodes[nodes.len() - 1].position_um);
        if position_um < first || position_um > last {
            return Err(Error::InvalidInput(format!(
                "position {position_um} um outside the class {class} strain field [{first}, {last}]"
            )));
        }
        let k = nodes
            .partition_point(|n| n.position_um <= position_um)
            .clamp(1, nodes.len() - 1);
        let (a, b) = (&nodes[k - 1], &nodes[k]);
        let t = (position_um - a.position_um) / (b.position_um - a.position_um);
        let mix = |x: T, y: T| x + (y - x) * t;
        Ok(Some(StrainState {
            axial_shift_ghz: mix(a.strain.axial_shift_ghz, b.strain.axial_shift_ghz),
            transverse_ground_ghz: mix(a.strain.transverse_ground_ghz, b.strain.transverse_ground_ghz),
            transverse_excited_ghz: mix(a.strain.transverse_excited_ghz, b.strain.transverse_excited_ghz),
            class,
        }))
    }

    pub fn strains_at(&self, position_um: T) -> Result<Vec<StrainState<T>>> {
        let mut out = Vec::with_capacity(2);
        for class in OrientationClass::ALL {
            if let Some(s) = self.at(class, position_um)? {
                out.push(s);
            }
        }
        Ok(out)
    }
}

/// Position × wavelength emission map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineScan<T> {
    pub position_um: Vec<T>,
    pub wavelength_nm: Vec<T>,
    /// One spectrum per position.
    pub intensity: Vec<Vec<T>>,
}

impl<T: Real> LineScan<T> {
    /// Long-format CSV: `position_um,wavelength_nm,intensity`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Parse(e.to_string());
        out.write_record(["position_um", "wavelength_nm", "intensity"])
            .map_err(io)?;
        for (p, row) in self.position_um.iter().zip(&self.intensity) {
            for (l, i) in self.wavelength_nm.iter().zip(row) {
                out.write_record([p.to_string(), l.to_string(), i.to_string()])
                    .map_err(io)?;
            }
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Spectrum at every path position.
pub fn synthesize_linescan<T: Real>(
    levels: &GroupIVLevels<T>,
    field: &StrainField<T>,
    path_um: &[T],
    spec: &EnsembleSpec<T>,
    grid_nm: &[T],
) -> Result<LineScan<T>> {
    if path_um.is_empty() {
        return Err(Error::InvalidInput("line-scan path is empty".into()));
    }
    let strains = path_um
        .iter()
        .map(|&p| field.strains_at(p))
        .collect::<Result<Vec<_>>>()?;
    let rows = strains
        .par_iter()
        .map(|s| synthesize_zpl_spectrum(levels, s, spec, grid_nm).map(|sp| sp.intensity))
        .collect::<Result<Vec<_>>>()?;
    Ok(LineScan {
        position_um: path_um.to_vec(),
        wavelength_nm: grid_nm.to_vec(),
        intensity: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::linear_grid;

    #[test]
    fn narrow_grid_lists_missing_lines() {
        let lv = GroupIVLevels::<f64>::silicon_vacancy();
        let s = [StrainState::unstrained(OrientationClass::One)];
        let spec = EnsembleSpec::new(100.0, 5.0, 4.0);
        let grid = linear_grid(736.95, 737.05, 0.01);
        match synthesize_zpl_spectrum(&lv, &s, &spec, &grid) {
            Err(Error::GridTooNarrow(msg)) => {
                assert!(msg.contains("line A") && msg.contains("line D"), "{msg}");
                assert!(!msg.contains("line C"), "{msg}");
            }
            other => panic!("expected GridTooNarrow, got {other:?}"),
        }
    }

    #[test]
    fn zero_temperature_silences_upper_branch() {
        let lv = GroupIVLevels::<f64>::silicon_vacancy();
        let s = [StrainState::unstrained(OrientationClass::One)];
        let mut spec = EnsembleSpec::new(100.0, 5.0, 0.0);
        spec.broadening_mhz_per_k3 = 0.0;
        let w = line_weights(&lv, &s, &spec);
        assert_eq!(w[Line::A.index()].weight, 0.0);
        assert_eq!(w[Line::B.index()].weight, 0.0);
        assert!(w[Line::C.index()].weight > 0.0);
    }

    #[test]
    fn csv_fills_excited_strain_from_ratio() {
        let text = "position_um,class,axial_ghz,transverse_ghz\n0,1,0,100\n1,1,10,200\n0,2,0,50,75\n";
        let f = StrainField::<f64>::from_csv(text.as_bytes(), 2.0).unwrap();
        let s = f.at(OrientationClass::One, 0.5).unwrap().unwrap();
        assert!((s.transverse_ground_ghz - 150.0).abs() < 1e-12);
        assert!((s.transverse_excited_ghz - 300.0).abs() < 1e-12);
        assert!((s.axial_shift_ghz - 5.0).abs() < 1e-12);
        let two = f.at(OrientationClass::Two, 0.7).unwrap().unwrap();
        assert_eq!(two.transverse_excited_ghz, 75.0);
        assert!(f.at(OrientationClass::One, 2.0).is_err());
    }

    #[test]
    fn malformed_csv_is_a_parse_error() {
        let text = "position_um,class,axial_ghz,transverse_ghz\n0,1,zero,100\n";
        assert!(matches!(
            StrainField::<f64>::from_csv(text.as_bytes(), 2.0),
            Err(Error::Parse(_))
        ));
        let text = "position_um,class,axial_ghz,transverse_ghz\n0,3,0,100\n";
        assert!(StrainField::<f64>::from_csv(text.as_bytes(), 2.0).is_err());
    }
}
