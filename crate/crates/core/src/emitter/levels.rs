use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{nm_to_thz, thz_to_nm, Real};

/// Spin-orbit structure of a group-IV colour centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupIVLevels<T> {
    /// Unstrained C-line frequency.
    pub c_line_thz: T,
    pub spin_orbit_ground_ghz: T,
    pub spin_orbit_excited_ghz: T,
}

impl<T: Real> GroupIVLevels<T> {
    pub fn new(c_line_thz: T, spin_orbit_ground_ghz: T, spin_orbit_excited_ghz: T) -> Result<Self> {
        let levels = Self {
            c_line_thz,
            spin_orbit_ground_ghz,
            spin_orbit_excited_ghz,
        };
        levels.validate()?;
        Ok(levels)
    }

    /// Negatively charged silicon vacancy: C-line at 737 nm, 48 GHz and 259 GHz.
    pub fn silicon_vacancy() -> Self {
        Self {
            c_line_thz: nm_to_thz(T::lit(737.0)),
            spin_orbit_ground_ghz: T::lit(48.0),
            spin_orbit_excited_ghz: T::lit(259.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c_line_thz", self.c_line_thz),
            ("spin_orbit_ground_ghz", self.spin_orbit_ground_ghz),
            ("spin_orbit_excited_ghz", self.spin_orbit_excited_ghz),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Centre of the four-line pattern without strain.
    pub fn center_thz(&self) -> T {
        self.c_line_thz + (self.spin_orbit_excited_ghz - self.spin_orbit_ground_ghz) / T::lit(2.0) * T::lit(1e-3)
    }

    pub fn spin_orbit_ghz(&self, manifold: Manifold) -> T {
        match manifold {
            Manifold::Ground => self.spin_orbit_ground_ghz,
            Manifold::Excited => self.spin_orbit_excited_ghz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manifold {
    Ground,
    Excited,
}

/// The two projected-dipole orientation classes seen on a (100) facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum OrientationClass {
    One,
    Two,
}

impl OrientationClass {
    pub const ALL: [OrientationClass; 2] = [OrientationClass::One, OrientationClass::Two];

    pub fn index(self) -> usize {
        match self {
            OrientationClass::One => 0,
            OrientationClass::Two => 1,
        }
    }
}

impl TryFrom<u8> for OrientationClass {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(OrientationClass::One),
            2 => Ok(OrientationClass::Two),
            other => Err(Error::InvalidInput(format!(
                "orientation class must be 1 or 2, got {other}"
            ))),
        }
    }
}

impl From<OrientationClass> for u8 {
    fn from(c: OrientationClass) -> u8 {
        c.index() as u8 + 1
    }
}

impl std::fmt::Display for OrientationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Strain reduced to a common-mode shift and one transverse magnitude per manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrainState<T> {
    pub axial_shift_ghz: T,
    pub transverse_ground_ghz: T,
    pub transverse_excited_ghz: T,
    pub class: OrientationClass,
}

impl<T: Real> StrainState<T> {
    pub fn new(
        axial_shift_ghz: T,
        transverse_ground_ghz: T,
        transverse_excited_ghz: T,
        class: OrientationClass,
    ) -> Result<Self> {
        let s = Self {
            axial_shift_ghz,
            transverse_ground_ghz,
            transverse_excited_ghz,
            class,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn unstrained(class: OrientationClass) -> Self {
        Self {
            axial_shift_ghz: T::zero(),
            transverse_ground_ghz: T::zero(),
            transverse_excited_ghz: T::zero(),
            class,
        }
    }

    /// Excited-state transverse strain set to `excited_ratio` times the ground one.
    pub fn with_ratio(
        axial_shift_ghz: T,
        transverse_ground_ghz: T,
        excited_ratio: T,
        class: OrientationClass,
    ) -> Result<Self> {
        Self::new(
            axial_shift_ghz,
            transverse_ground_ghz,
            transverse_ground_ghz * excited_ratio,
            class,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !self.axial_shift_ghz.is_finite() {
            return Err(Error::InvalidInput("axial shift must be finite".into()));
        }
        for v in [self.transverse_ground_ghz, self.transverse_excited_ghz] {
            if !(v >= T::zero() && v.is_finite()) {
                return Err(Error::InvalidInput(format!("transverse strain must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Line {
    A,
    B,
    C,
    D,
}

impl Line {
    pub const ALL: [Line; 4] = [Line::A, Line::B, Line::C, Line::D];

    pub fn index(self) -> usize {
        self as usize
    }

    /// True for transitions out of the upper excited branch.
    pub fn from_upper_excited(self) -> bool {
        matches!(self, Line::A | Line::B)
    }
}

impl std::fmt::Display for Line {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Four-line zero-phonon structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FineStructure<T> {
    /// Line frequencies A, B, C, D.
    pub lines_thz: [T; 4],
    pub delta_gs_ghz: T,
    pub delta_es_ghz: T,
}

impl<T: Real> FineStructure<T> {
    /// Lines at `center ± Δes/2 ∓ Δgs/2`.
    pub fn from_splittings(center_thz: T, delta_gs_ghz: T, delta_es_ghz: T) -> Self {
        let half = T::lit(0.5e-3);
        let (g, e) = (delta_gs_ghz * half, delta_es_ghz * half);
        Self {
            lines_thz: [
                center_thz + e + g,
                center_thz + e - g,
                center_thz - e + g,
                center_thz - e - g,
            ],
            delta_gs_ghz,
            delta_es_ghz,
        }
    }

    /// Recover both splittings from the four line positions.
    pub fn from_lines(lines_thz: [T; 4]) -> Self {
        let [a, b, c, d] = lines_thz;
        let k = T::lit(500.0);
        Self {
            lines_thz,
            delta_gs_ghz: (a - b + c - d) * k,
            delta_es_ghz: (a - c + b - d) * k,
        }
    }

    pub fn line_thz(&self, line: Line) -> T {
        self.lines_thz[line.index()]
    }

    pub fn line_nm(&self, line: Line) -> T {
        thz_to_nm(self.line_thz(line))
    }

    pub fn center_thz(&self) -> T {
        self.lines_thz.iter().copied().sum::<T>() / T::lit(4.0)
    }

    /// A > B > C > D holds whenever Δes > Δgs.
    pub fn is_ordered(&self) -> bool {
        self.lines_thz.windows(2).all(|w| w[0] > w[1])
    }
}

/// Δ = √(λ_SO² + Υ²) for both manifolds, lines about the shifted centre.
pub fn splittings_from_strain<T: Real>(levels: &GroupIVLevels<T>, strain: &StrainState<T>) -> FineStructure<T> {
    let dgs = levels.spin_orbit_ground_ghz.hypot(strain.transverse_ground_ghz);
    let des = levels.spin_orbit_excited_ghz.hypot(strain.transverse_excited_ghz);
    let center = levels.center_thz() + strain.axial_shift_ghz * T::lit(1e-3);
    FineStructure::from_splittings(center, dgs, des)
}

/// Υ = √(Δ² − λ_SO²).
pub fn strain_from_splitting<T: Real>(levels: &GroupIVLevels<T>, manifold: Manifold, observed_ghz: T) -> Result<T> {
    let so = levels.spin_orbit_ghz(manifold);
    if !(observed_ghz >= so) {
        return Err(Error::SplittingBelowSpinOrbit {
            observed: observed_ghz.as_f64(),
            spin_orbit: so.as_f64(),
        });
    }
    Ok(((observed_ghz - so) * (observed_ghz + so)).sqrt())
}

/// Symmetric strain tensor in the defect frame (z along the symmetry axis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct StrainTensor<T> {
    pub xx: T,
    pub yy: T,
    pub zz: T,
    pub xy: T,
    pub yz: T,
    pub zx: T,
}

/// Strain-susceptibility constants of one manifold, in GHz per unit strain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrainSusceptibility<T> {
    pub d_ghz: T,
    pub f_ghz: T,
    pub t_perp_ghz: T,
    pub t_par_ghz: T,
}

impl<T: Real> StrainSusceptibility<T> {
    /// E-symmetry components (ε_Egx, ε_Egy).
    pub fn e_components(&self, s: &StrainTensor<T>) -> (T, T) {
        let two = T::lit(2.0);
        (
            self.d_ghz * (s.xx - s.yy) + self.f_ghz * s.zx,
            -two * self.d_ghz * s.xy + self.f_ghz * s.yz,
        )
    }

    /// Transverse magnitude Υ = 2√(ε_Egx² + ε_Egy²).
    pub fn transverse_ghz(&self, s: &StrainTensor<T>) -> T {
        let (x, y) = self.e_components(s);
        T::lit(2.0) * x.hypot(y)
    }

    /// A1-symmetry shift of the manifold.
    pub fn a1_shift_ghz(&self, s: &StrainTensor<T>) -> T {
        self.t_perp_ghz * (s.xx + s.yy) + self.t_par_ghz * s.zz
    }
}

/// Projection of a full tensor onto the two-scalar strain description.
/// The constants have no defaults and must come from the user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrainProjection<T> {
    pub ground: StrainSusceptibility<T>,
    pub excited: StrainSusceptibility<T>,
}

impl<T: Real> StrainProjection<T> {
    pub fn project(&self, tensor: &StrainTensor<T>, class: OrientationClass) -> StrainState<T> {
        StrainState {
            axial_shift_ghz: self.excited.a1_shift_ghz(tensor) - self.ground.a1_shift_ghz(tensor),
            transverse_ground_ghz: self.ground.transverse_ghz(tensor),
            transverse_excited_ghz: self.excited.transverse_ghz(tensor),
            class,
        }
    }
}
