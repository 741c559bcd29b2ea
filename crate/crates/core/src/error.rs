use thiserror::Error;

/// Errors raised by the modelling and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid layer stack: {0}")]
    InvalidStack(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "target transmission {target:e} unreachable with at most {max_pairs} pairs (minimum achieved {achieved:e})"
    )]
    TargetUnreachable {
        target: f64,
        max_pairs: usize,
        achieved: f64,
    },

    #[error("grid step {step} nm is coarser than a quarter of the thinnest layer ({thinnest} nm)")]
    GridTooCoarse { step: f64, thinnest: f64 },

    #[error(
        "cavity unstable: effective length {length_um} um must be shorter than the radius of curvature {roc_um} um"
    )]
    Unstable { length_um: f64, roc_um: f64 },

    #[error("depth ranges do not overlap: {0}")]
    DisjointSupport(String),

    #[error("wavelength grid does not cover lines: {0}")]
    GridTooNarrow(String),

    #[error("splitting {observed} GHz is below the spin-orbit splitting {spin_orbit} GHz")]
    SplittingBelowSpinOrbit { observed: f64, spin_orbit: f64 },

    #[error("finesse with emitters ({with_emitters}) exceeds the bare finesse ({bare})")]
    NegativeAbsorption { with_emitters: f64, bare: f64 },

    #[error("fit did not converge after {iterations} iterations (reduced residual {residual:e}): {reason}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        reason: String,
    },

    #[error("expected {expected} dominant resonances, found {found}; adjust the scan window")]
    PeakCount { expected: usize, found: usize },

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical analysis as opposed to bad input.
    pub fn is_analysis_failure(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::PeakCount { .. }
                | Error::TargetUnreachable { .. }
                | Error::NegativeAbsorption { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
