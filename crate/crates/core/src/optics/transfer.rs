//! Normal-incidence transfer-matrix solution for planar stacks.
//!
//! Inside layer `j` the field is `E(z) = a_j e^{i k_j z} + b_j e^{-i k_j z}`
//! with `k_j = 2π N_j / λ`, `z` measured from the layer's left interface and
//! time dependence `e^{-iωt}`, so `Im N ≥ 0` is absorbing. Amplitudes are
//! propagated from the exit medium (pure outgoing wave) back to the
//! incidence medium and then scaled to unit incident amplitude.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::layer::LayerStack;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reflectance, transmittance and absorptance at one wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Response<T> {
    pub reflectance: T,
    pub transmittance: T,
    pub absorptance: T,
}

/// Sampled [`Response`] over a wavelength grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResponse<T> {
    pub wavelength_nm: Vec<T>,
    pub reflectance: Vec<T>,
    pub transmittance: Vec<T>,
    pub absorptance: Vec<T>,
}

/// Solved field amplitudes for a stack at a single wavelength.
#[derive(Debug, Clone)]
pub struct StackField<T> {
    wavelength_nm: T,
    indices: Vec<Complex<T>>,
    /// Forward/backward amplitudes per layer, normalised to unit incident
    /// amplitude.
    amplitudes: Vec<(Complex<T>, Complex<T>)>,
    /// Left-interface position of every layer (the incidence medium gets 0).
    starts: Vec<T>,
    thickness: Vec<T>,
}

impl<T: Real> StackField<T> {
    pub fn solve(stack: &LayerStack<T>, wavelength_nm: T) -> Result<Self> {
        if !(wavelength_nm > T::zero() && wavelength_nm.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "wavelength must be positive, got {wavelength_nm}"
            )));
        }
        let layers = stack.layers();
        let count = layers.len();
        let indices: Vec<Complex<T>> = layers.iter().map(|l| l.index_at(wavelength_nm)).collect();
        let thickness: Vec<T> = layers
            .iter()
            .map(|l| if l.semi_infinite { T::zero() } else { l.thickness_nm })
            .collect();
        let mut starts = Vec::with_capacity(count);
        let mut x = T::zero();
        for (j, d) in thickness.iter().enumerate() {
            starts.push(x);
            if j > 0 {
                x += *d;
            }
        }

        let two = T::lit(2.0);
        let i = Complex::new(T::zero(), T::one());
        let k0 = T::two_pi() / wavelength_nm;
        let mut amplitudes = vec![(Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero())); count];
        amplitudes[count - 1] = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        let rescale_limit = T::lit(1e30);

        for j in (0..count - 1).rev() {
            let (a_next, b_next) = amplitudes[j + 1];
            let e_field = a_next + b_next;
            let h_field = indices[j + 1] * (a_next - b_next);
            let ratio = h_field / indices[j];
            let phase = i * indices[j] * k0 * thickness[j];
            let forward = (e_field + ratio) / two;
            let backward = (e_field - ratio) / two;
            let a = forward * (-phase).exp();
            let b = backward * phase.exp();
            amplitudes[j] = (a, b);
            let scale = a.norm() + b.norm();
            if scale > rescale_limit {
                for amp in amplitudes[j..].iter_mut() {
                    amp.0 /= scale;
                    amp.1 /= scale;
                }
            }
        }

        let incident = amplitudes[0].0;
        if incident.norm() == T::zero() || !incident.norm().is_finite() {
            return Err(Error::InvalidInput("degenerate transfer matrix".into()));
        }
        for amp in amplitudes.iter_mut() {
            amp.0 /= incident;
            amp.1 /= incident;
        }

        Ok(Self {
            wavelength_nm,
            indices,
            amplitudes,
            starts,
            thickness,
        })
    }

    pub fn wavelength_nm(&self) -> T {
        self.wavelength_nm
    }

    pub fn layer_count(&self) -> usize {
        self.indices.len()
    }

    pub fn index(&self, layer: usize) -> Complex<T> {
        self.indices[layer]
    }

    /// Position (nm) of the left interface of `layer`; the incidence medium
    /// occupies `x < 0`.
    pub fn layer_start_nm(&self, layer: usize) -> T {
        self.starts[layer]
    }

    pub fn layer_thickness_nm(&self, layer: usize) -> T {
        self.thickness[layer]
    }

    pub fn amplitudes(&self, layer: usize) -> (Complex<T>, Complex<T>) {
        self.amplitudes[layer]
    }

    pub fn reflection_coefficient(&self) -> Complex<T> {
        self.amplitudes[0].1
    }

    pub fn transmission_coefficient(&self) -> Complex<T> {
        self.amplitudes[self.amplitudes.len() - 1].0
    }

    /// Layer containing position `x`; interfaces belong to the layer on the
    /// right.
    pub fn layer_at(&self, x: T) -> usize {
        if x < T::zero() {
            return 0;
        }
        let last = self.indices.len() - 1;
        for j in 1..last {
            if x < self.starts[j] + self.thickness[j] {
                return j;
            }
        }
        last
    }

    /// Complex field in `layer` at local coordinate `z` (nm from the layer's
    /// left interface; negative inside the incidence medium).
    pub fn field_in_layer(&self, layer: usize, z: T) -> Complex<T> {
        let k = self.indices[layer] * (T::two_pi() / self.wavelength_nm);
        let phase = Complex::new(T::zero(), T::one()) * k * z;
        let (a, b) = self.amplitudes[layer];
        a * phase.exp() + b * (-phase).exp()
    }

    pub fn field_at(&self, x: T) -> Complex<T> {
        let layer = self.layer_at(x);
        self.field_in_layer(layer, x - self.starts[layer])
    }

    pub fn intensity_at(&self, x: T) -> T {
        self.field_at(x).norm_sqr()
    }

    /// Closed-form ∫|E|² dz over an interior layer.
    pub fn layer_intensity_integral(&self, layer: usize) -> T {
        let d = self.thickness[layer];
        let k = self.indices[layer] * (T::two_pi() / self.wavelength_nm);
        let (a, b) = self.amplitudes[layer];
        let two = T::lit(2.0);
        let (forward, backward) = if k.im == T::zero() {
            (d, d)
        } else {
            let g = two * k.im;
            (-(-g * d).exp_m1() / g, (g * d).exp_m1() / g)
        };
        // ∫ e^{2 i k' z} dz
        let kr2 = two * k.re;
        let osc = Complex::new((kr2 * d).sin() / kr2, (T::one() - (kr2 * d).cos()) / kr2);
        let cross = (a * b.conj() * osc).re;
        a.norm_sqr() * forward + b.norm_sqr() * backward + two * cross
    }

    /// Closed-form ∫ n²|E|² dz (electric energy up to a constant) over an
    /// interior layer.
    pub fn layer_energy_integral(&self, layer: usize) -> T {
        self.indices[layer].norm_sqr() * self.layer_intensity_integral(layer)
    }

    pub fn response(&self) -> Response<T> {
        let n_in = self.indices[0].re;
        let last = self.indices.len() - 1;
        let reflectance = self.reflection_coefficient().norm_sqr();
        let transmittance = self.indices[last].re / n_in * self.transmission_coefficient().norm_sqr();
        // Absorbed power per layer: (2π/λ) Im(N²) ∫|E|² dz, relative to the
        // incident flux Re(N_0).
        let k0 = T::two_pi() / self.wavelength_nm;
        let mut absorptance = T::zero();
        for j in 1..last {
            let im_eps = (self.indices[j] * self.indices[j]).im;
            if im_eps != T::zero() {
                absorptance += k0 * im_eps * self.layer_intensity_integral(j) / n_in;
            }
        }
        Response {
            reflectance,
            transmittance,
            absorptance,
        }
    }
}

/// Reflectance, transmittance and absorptance of `stack` at normal incidence.
pub fn stack_response<T: Real>(stack: &LayerStack<T>, wavelength_nm: T) -> Result<Response<T>> {
    Ok(StackField::solve(stack, wavelength_nm)?.response())
}

/// [`stack_response`] over a wavelength grid, evaluated in parallel; output
/// order follows the grid.
pub fn spectrum<T: Real>(stack: &LayerStack<T>, wavelengths_nm: &[T]) -> Result<SpectralResponse<T>> {
    let responses: Vec<Response<T>> = wavelengths_nm
        .par_iter()
        .map(|&w| stack_response(stack, w))
        .collect::<Result<_>>()?;
    Ok(SpectralResponse {
        wavelength_nm: wavelengths_nm.to_vec(),
        reflectance: responses.iter().map(|r| r.reflectance).collect(),
        transmittance: responses.iter().map(|r| r.transmittance).collect(),
        absorptance: responses.iter().map(|r| r.absorptance).collect(),
    })
}

/// Inclusive uniform grid from `start` to `stop`.
pub fn linear_grid<T: Real>(start: T, stop: T, step: T) -> Vec<T> {
    if !(step > T::zero()) || stop < start {
        return Vec::new();
    }
    let n = ((stop - start) / step + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    (0..=n).map(|i| start + step * T::from_count(i)).collect()
}
