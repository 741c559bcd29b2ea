//! Cavity-QED figures of merit and the parameter report that ties them
//! together.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, CavityGeometry};
use crate::scalar::Real;

/// F = 2π / Σ losses, with per-pass losses in ppm.
pub fn finesse_from_losses<T: Real>(losses_ppm: &[T]) -> Result<T> {
    if losses_ppm.iter().any(|&l| !(l >= T::zero()) || !l.is_finite()) {
        return Err(Error::InvalidInput("losses must be finite and non-negative".into()));
    }
    let total: T = losses_ppm.iter().copied().sum::<T>() * T::lit(1e-6);
    if total == T::zero() {
        return Err(Error::InvalidInput("total loss is zero: finesse diverges".into()));
    }
    Ok(T::two_pi() / total)
}

/// Q = m·F.
pub fn quality_factor<T: Real>(mode_number: u32, finesse: T) -> T {
    T::from_u32(mode_number).expect("mode number representable") * finesse
}

/// f_P = 3/(4π²) (λ/n)³ Q/V with V in cubic free-space wavelengths.
pub fn purcell_theoretical<T: Real>(refractive_index: T, quality_factor: T, volume_cubic_wavelengths: T) -> Result<T> {
    if !(refractive_index > T::zero() && quality_factor > T::zero() && volume_cubic_wavelengths > T::zero()) {
        return Err(Error::InvalidInput("index, Q and V must be positive".into()));
    }
    let pi = T::PI();
    Ok(T::lit(3.0) / (T::lit(4.0) * pi * pi) * quality_factor / (volume_cubic_wavelengths * refractive_index.powi(3)))
}

/// Lifetime-derived enhancement and the quantities that follow from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Enhancement<T> {
    /// F_P,eff = τ_fs / τ_cav.
    pub purcell_effective: T,
    /// C = F_P,eff − 1.
    pub cooperativity: T,
    /// β = (F_P,eff − 1) / F_P,eff.
    pub beta: T,
    /// Set when τ_cav > τ_fs (no enhancement).
    pub suppressed: bool,
}

pub fn purcell_effective<T: Real>(tau_free_ns: T, tau_cavity_ns: T) -> Result<Enhancement<T>> {
    if !(tau_free_ns > T::zero() && tau_cavity_ns > T::zero()) {
        return Err(Error::InvalidInput("lifetimes must be positive".into()));
    }
    let f = tau_free_ns / tau_cavity_ns;
    let suppressed = f < T::one();
    if suppressed {
        log::warn!("cavity lifetime {tau_cavity_ns} ns exceeds free-space {tau_free_ns} ns: no enhancement");
    }
    Ok(Enhancement {
        purcell_effective: f,
        cooperativity: f - T::one(),
        beta: (f - T::one()) / f,
        suppressed,
    })
}

/// Branching ratio implied by F_P,eff = 1 + ξ f_P.
pub fn implied_branching_ratio<T: Real>(purcell_effective: T, purcell_theoretical: T) -> T {
    (purcell_effective - T::one()) / purcell_theoretical
}

/// g from C = 4g²/(κγ); all rates in the same units.
pub fn coupling_from_cooperativity<T: Real>(cooperativity: T, kappa: T, gamma: T) -> Result<T> {
    if !(cooperativity >= T::zero() && kappa > T::zero() && gamma > T::zero()) {
        return Err(Error::InvalidInput("need C >= 0 and positive rates".into()));
    }
    Ok((cooperativity * kappa * gamma).sqrt() / T::lit(2.0))
}

pub fn cooperativity_from_coupling<T: Real>(g: T, kappa: T, gamma: T) -> T {
    T::lit(4.0) * g * g / (kappa * gamma)
}

/// How the emitter decay rate γ/2π is derived from the free-space lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GammaConvention {
    /// γ = 1/τ as an angular rate, so γ/2π = 1/(2πτ).
    #[default]
    AngularRate,
    /// γ/2π = 1/τ.
    CyclicRate,
}

impl GammaConvention {
    /// γ/2π in GHz for a lifetime in ns.
    pub fn gamma_over_2pi_ghz<T: Real>(self, tau_ns: T) -> T {
        match self {
            GammaConvention::AngularRate => T::one() / (T::two_pi() * tau_ns),
            GammaConvention::CyclicRate => T::one() / tau_ns,
        }
    }
}

/// Declared inputs of the parameter report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs<T> {
    pub geometry: CavityGeometry<T>,
    pub mode_number: u32,
    /// Mirror transmissions (ppm), one per mirror.
    pub mirror_transmission_ppm: [T; 2],
    pub finesse_experimental: T,
    pub tau_free_ns: T,
    pub tau_cavity_ns: T,
    /// Index entering the Purcell formula (the emitter's host).
    pub refractive_index: T,
    pub branching_ratio: T,
    pub gamma_convention: GammaConvention,
}

/// One report row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row<T> {
    pub key: &'static str,
    pub label: &'static str,
    pub symbol: &'static str,
    pub value: T,
    pub unit: &'static str,
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CqedReport<T> {
    pub finesse_theoretical: T,
    pub finesse_experimental: T,
    pub quality_factor: T,
    pub kappa_over_2pi_ghz: T,
    pub beam_waist_um: T,
    pub mode_volume_cubic_wavelengths: T,
    pub mode_number: u32,
    pub purcell_theoretical: T,
    pub purcell_effective: T,
    pub branching_ratio: T,
    pub branching_ratio_implied: T,
    pub beta: T,
    pub cooperativity: T,
    pub coupling_g_over_2pi_ghz: T,
    pub gamma_over_2pi_ghz: T,
    pub rows: Vec<Row<T>>,
}

impl<T: Real> CqedReport<T> {
    pub fn assemble(inputs: &ReportInputs<T>) -> Result<Self> {
        let g = &inputs.geometry;
        let finesse_theoretical = finesse_from_losses(&inputs.mirror_transmission_ppm)?;
        let f_exp = inputs.finesse_experimental;
        if !(f_exp > T::one()) {
            return Err(Error::InvalidInput("experimental finesse must exceed 1".into()));
        }
        let q = quality_factor(inputs.mode_number, f_exp);
        let kappa = geometry::linewidth_from_finesse(g.effective_length_um, f_exp)?;
        let w0 = geometry::beam_waist(g)?;
        let volume = geometry::mode_volume(g)?.cubic_wavelengths;
        let f_p = purcell_theoretical(inputs.refractive_index, q, volume)?;
        let enh = purcell_effective(inputs.tau_free_ns, inputs.tau_cavity_ns)?;
        let xi = inputs.branching_ratio;
        if !(xi > T::zero() && xi <= T::one()) {
            return Err(Error::InvalidInput("branching ratio must lie in (0, 1]".into()));
        }
        let xi_implied = implied_branching_ratio(enh.purcell_effective, f_p);
        let gamma = inputs.gamma_convention.gamma_over_2pi_ghz(inputs.tau_free_ns);
        let coupling = coupling_from_cooperativity(enh.cooperativity.max(T::zero()), kappa, gamma)?;

        let row = |key, label, symbol, value, unit, origin: &str| Row {
            key,
            label,
            symbol,
            value,
            unit,
            origin: origin.to_string(),
        };
        let rows = vec![
            row(
                "finesse_theoretical",
                "Theoretical finesse",
                "F_theo",
                finesse_theoretical,
                "",
                "T_ppm",
            ),
            row(
                "finesse_experimental",
                "Experimental finesse",
                "F_exp",
                f_exp,
                "",
                "cavity length scan",
            ),
            row(
                "effective_length",
                "Typical cavity length",
                "L_eff",
                g.effective_length_um,
                "um",
                "calculation from spectra",
            ),
            row(
                "kappa_over_2pi",
                "Typical cavity linewidth",
                "kappa/2pi",
                kappa,
                "GHz",
                "F_exp and L_eff",
            ),
            row("beam_waist", "Beam waist", "w0", w0, "um", "L_eff and RoC"),
            row("mode_volume", "Typical mode volume", "V", volume, "lambda^3", "w0"),
            row(
                "mode_number",
                "Typical mode number",
                "m",
                T::from_u32(inputs.mode_number).expect("mode number representable"),
                "",
                "calculation from spectra",
            ),
            row("quality_factor", "Quality factor", "Q", q, "", "F_exp and m"),
            row(
                "purcell_theoretical",
                "Theoretical Purcell factor",
                "f_P",
                f_p,
                "",
                "f_P = 3/(4 pi^2) (lambda/n)^3 Q/V",
            ),
            row(
                "tau_free",
                "Free-space lifetime",
                "tau_fs",
                inputs.tau_free_ns,
                "ns",
                "fitted lifetime data",
            ),
            row(
                "tau_cavity",
                "Cavity-emitter lifetime",
                "tau_cav",
                inputs.tau_cavity_ns,
                "ns",
                "fitted lifetime data",
            ),
            row(
                "purcell_effective",
                "Effective Purcell factor",
                "F_P,eff",
                enh.purcell_effective,
                "",
                "tau_fs / tau_cav",
            ),
            row("branching_ratio", "Branching ratio", "xi", xi, "", "input"),
            row(
                "branching_ratio_implied",
                "Implied branching ratio",
                "xi_impl",
                xi_implied,
                "",
                "(F_P,eff - 1) / f_P",
            ),
            row("beta", "Beta factor", "beta", enh.beta, "", "(F_P,eff - 1) / F_P,eff"),
            row(
                "cooperativity",
                "Cooperativity",
                "C",
                enh.cooperativity,
                "",
                "F_P,eff - 1",
            ),
            row(
                "gamma_over_2pi",
                "Emitter decay rate",
                "gamma/2pi",
                gamma,
                "GHz",
                "tau_fs",
            ),
            row(
                "g_over_2pi",
                "Coupling rate",
                "g/2pi",
                coupling,
                "GHz",
                "C = 4 g^2 / (kappa gamma)",
            ),
        ];
        Ok(Self {
            finesse_theoretical,
            finesse_experimental: f_exp,
            quality_factor: q,
            kappa_over_2pi_ghz: kappa,
            beam_waist_um: w0,
            mode_volume_cubic_wavelengths: volume,
            mode_number: inputs.mode_number,
            purcell_theoretical: f_p,
            purcell_effective: enh.purcell_effective,
            branching_ratio: xi,
            branching_ratio_implied: xi_implied,
            beta: enh.beta,
            cooperativity: enh.cooperativity,
            coupling_g_over_2pi_ghz: coupling,
            gamma_over_2pi_ghz: gamma,
            rows,
        })
    }

    /// Fixed-width text table (parameter, symbol, value, unit, origin).
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<28} {:<10} {:>14} {:<9} {}\n",
            "Parameter", "Symbol", "Value", "Unit", "Origin"
        );
        out.push_str(&"-".repeat(90));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{:<28} {:<10} {:>14} {:<9} {}\n",
                r.label,
                r.symbol,
                format_value(r.value.as_f64()),
                r.unit,
                r.origin
            ));
        }
        out
    }
}

fn format_value(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e6).contains(&a) {
        format!("{v:.4e}")
    } else {
        format!("{v:.4}")
    }
}
