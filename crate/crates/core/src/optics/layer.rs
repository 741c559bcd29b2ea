use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One tabulated point of a dispersive refractive index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexSample<T> {
    pub wavelength_nm: T,
    pub n: T,
    pub k: T,
}

/// Refractive index of a layer: constant, or tabulated against wavelength
/// and linearly interpolated (clamped outside the table).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IndexModel<T> {
    Constant(Complex<T>),
    Tabulated(Vec<IndexSample<T>>),
}

impl<T: Real> IndexModel<T> {
    pub fn at(&self, wavelength_nm: T) -> Complex<T> {
        match self {
            IndexModel::Constant(n) => *n,
            IndexModel::Tabulated(table) => {
                let first = table[0];
                let last = table[table.len() - 1];
                if wavelength_nm <= first.wavelength_nm {
                    return Complex::new(first.n, first.k);
                }
                if wavelength_nm >= last.wavelength_nm {
                    return Complex::new(last.n, last.k);
                }
                let i = table.partition_point(|s| s.wavelength_nm <= wavelength_nm);
                let (a, b) = (table[i - 1], table[i]);
                let w = (wavelength_nm - a.wavelength_nm) / (b.wavelength_nm - a.wavelength_nm);
                Complex::new(a.n + w * (b.n - a.n), a.k + w * (b.k - a.k))
            }
        }
    }

    fn samples(&self) -> Vec<Complex<T>> {
        match self {
            IndexModel::Constant(n) => vec![*n],
            IndexModel::Tabulated(t) => t.iter().map(|s| Complex::new(s.n, s.k)).collect(),
        }
    }
}

/// A planar layer. Boundary media are flagged `semi_infinite` and carry no
/// meaningful thickness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalLayer<T> {
    pub index: IndexModel<T>,
    pub thickness_nm: T,
    pub semi_infinite: bool,
}

impl<T: Real> OpticalLayer<T> {
    pub fn new(index: Complex<T>, thickness_nm: T) -> Self {
        Self {
            index: IndexModel::Constant(index),
            thickness_nm,
            semi_infinite: false,
        }
    }

    /// Lossless layer of real index `n`.
    pub fn dielectric(n: T, thickness_nm: T) -> Self {
        Self::new(Complex::new(n, T::zero()), thickness_nm)
    }

    pub fn semi_infinite(index: Complex<T>) -> Self {
        Self {
            index: IndexModel::Constant(index),
            thickness_nm: T::zero(),
            semi_infinite: true,
        }
    }

    pub fn semi_infinite_dielectric(n: T) -> Self {
        Self::semi_infinite(Complex::new(n, T::zero()))
    }

    pub fn tabulated(mut table: Vec<IndexSample<T>>, thickness_nm: T, semi_infinite: bool) -> Self {
        table.sort_by(|a, b| {
            a.wavelength_nm
                .partial_cmp(&b.wavelength_nm)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Self {
            index: IndexModel::Tabulated(table),
            thickness_nm,
            semi_infinite,
        }
    }

    pub fn index_at(&self, wavelength_nm: T) -> Complex<T> {
        self.index.at(wavelength_nm)
    }

    /// Quarter-wave thickness for `n` at `wavelength_nm`.
    pub fn quarter_wave(n: T, wavelength_nm: T) -> Self {
        Self::dielectric(n, wavelength_nm / (T::lit(4.0) * n))
    }

    fn validate(&self, position: usize) -> Result<()> {
        if let IndexModel::Tabulated(t) = &self.index {
            if t.is_empty() {
                return Err(Error::InvalidStack(format!("layer {position}: empty index table")));
            }
        }
        for n in self.index.samples() {
            if !(n.re.is_finite() && n.im.is_finite()) {
                return Err(Error::InvalidStack(format!("layer {position}: non-finite index")));
            }
            if n.re < T::one() {
                return Err(Error::InvalidStack(format!(
                    "layer {position}: real index {} below 1",
                    n.re
                )));
            }
            if n.im < T::zero() {
                return Err(Error::InvalidStack(format!(
                    "layer {position}: negative extinction {} (absorbing convention requires k >= 0)",
                    n.im
                )));
            }
        }
        Ok(())
    }
}

/// Ordered layers from the incidence medium to the exit medium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack<T> {
    layers: Vec<OpticalLayer<T>>,
    pub label: String,
}

impl<T: Real> LayerStack<T> {
    /// Validates and builds a stack: at least two layers, exactly the first
    /// and last semi-infinite, finite positive interior thicknesses, and a
    /// lossless incidence medium.
    pub fn new(layers: Vec<OpticalLayer<T>>, label: impl Into<String>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::InvalidStack(format!(
                "need at least 2 layers, got {}",
                layers.len()
            )));
        }
        let last = layers.len() - 1;
        for (i, layer) in layers.iter().enumerate() {
            layer.validate(i)?;
            let boundary = i == 0 || i == last;
            if boundary != layer.semi_infinite {
                return Err(Error::InvalidStack(if boundary {
                    format!("layer {i} is a boundary medium and must be semi-infinite")
                } else {
                    format!("interior layer {i} must not be semi-infinite")
                }));
            }
            if !boundary && !(layer.thickness_nm.is_finite() && layer.thickness_nm > T::zero()) {
                return Err(Error::InvalidStack(format!(
                    "interior layer {i} has non-positive or non-finite thickness {}",
                    layer.thickness_nm
                )));
            }
        }
        if layers[0].index.samples().iter().any(|n| n.im != T::zero()) {
            return Err(Error::InvalidStack("incidence medium must be lossless".into()));
        }
        Ok(Self {
            layers,
            label: label.into(),
        })
    }

    pub fn layers(&self) -> &[OpticalLayer<T>] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Layers between the two boundary media.
    pub fn interior(&self) -> &[OpticalLayer<T>] {
        &self.layers[1..self.layers.len() - 1]
    }

    pub fn incidence(&self) -> &OpticalLayer<T> {
        &self.layers[0]
    }

    pub fn exit(&self) -> &OpticalLayer<T> {
        &self.layers[self.layers.len() - 1]
    }

    /// The same stack illuminated from the other side.
    pub fn reversed(&self) -> Result<Self> {
        let mut layers = self.layers.clone();
        layers.reverse();
        Self::new(layers, format!("{} (reversed)", self.label))
    }

    /// Stack with `layer` inserted as interior layer number `position`
    /// (0 = directly after the incidence medium).
    pub fn with_inserted(&self, position: usize, layer: OpticalLayer<T>) -> Result<Self> {
        let mut layers = self.layers.clone();
        let at = (position + 1).min(layers.len() - 1);
        layers.insert(at, layer);
        Self::new(layers, self.label.clone())
    }

    /// Total thickness of the interior layers.
    pub fn interior_thickness_nm(&self) -> T {
        self.interior().iter().map(|l| l.thickness_nm).sum()
    }

    /// Positions (nm) of every interface, measured from the first one.
    pub fn interface_positions_nm(&self) -> Vec<T> {
        let mut pos = Vec::with_capacity(self.layers.len() - 1);
        let mut x = T::zero();
        pos.push(x);
        for l in self.interior() {
            x += l.thickness_nm;
            pos.push(x);
        }
        pos
    }

    pub fn thinnest_interior_nm(&self) -> Option<T> {
        self.interior()
            .iter()
            .map(|l| l.thickness_nm)
            .fold(None, |acc, t| Some(acc.map_or(t, |a: T| a.min(t))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn air() -> OpticalLayer<f64> {
        OpticalLayer::semi_infinite_dielectric(1.0)
    }

    #[test]
    fn rejects_single_layer() {
        assert!(matches!(LayerStack::new(vec![air()], "x"), Err(Error::InvalidStack(_))));
    }

    #[test]
    fn rejects_non_positive_thickness() {
        let s = LayerStack::new(vec![air(), OpticalLayer::dielectric(2.0, 0.0), air()], "x");
        assert!(matches!(s, Err(Error::InvalidStack(_))));
        let s = LayerStack::new(vec![air(), OpticalLayer::dielectric(2.0, -5.0), air()], "x");
        assert!(matches!(s, Err(Error::InvalidStack(_))));
    }

    #[test]
    fn rejects_missing_boundary_flags() {
        let s = LayerStack::new(
            vec![
                OpticalLayer::dielectric(1.0, 10.0),
                OpticalLayer::dielectric(2.0, 10.0),
                air(),
            ],
            "x",
        );
        assert!(s.is_err());
    }

    #[test]
    fn rejects_gain_and_lossy_incidence() {
        let gain = OpticalLayer::new(Complex::new(2.0, -0.1), 10.0);
        assert!(LayerStack::new(vec![air(), gain, air()], "x").is_err());
        let lossy = OpticalLayer::semi_infinite(Complex::new(1.5, 0.01));
        assert!(LayerStack::new(vec![lossy, air()], "x").is_err());
    }

    #[test]
    fn tabulated_index_interpolates_linearly() {
        let layer: OpticalLayer<f64> = OpticalLayer::tabulated(
            vec![
                IndexSample {
                    wavelength_nm: 700.0,
                    n: 2.0,
                    k: 0.0,
                },
                IndexSample {
                    wavelength_nm: 600.0,
                    n: 2.2,
                    k: 0.1,
                },
            ],
            50.0,
            false,
        );
        let n = layer.index_at(650.0);
        assert!((n.re - 2.1).abs() < 1e-12 && (n.im - 0.05).abs() < 1e-12);
        assert_eq!(layer.index_at(900.0).re, 2.0);
    }

    #[test]
    fn interface_positions_accumulate() {
        let s = LayerStack::new(
            vec![
                air(),
                OpticalLayer::dielectric(2.0, 10.0),
                OpticalLayer::dielectric(1.5, 5.0),
                air(),
            ],
            "x",
        )
        .unwrap();
        assert_eq!(s.interface_positions_nm(), vec![0.0, 10.0, 15.0]);
        assert_eq!(s.thinnest_interior_nm(), Some(5.0));
    }
}
