//! Closed-form quasistatic polarizabilities of canonical inclusions in a unit
//! permittivity matrix. Values are per unit inclusion volume.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_dim(dim: usize) -> Result<f64> {
    match dim {
        2 | 3 => Ok(dim as f64),
        _ => Err(Error::UnsupportedDimension(dim)),
    }
}

fn near_zero(z: Complex64, scale: f64) -> bool {
    !(z.norm() > 1e-14 * scale.max(1.0))
}

/// `Tr(alpha)/(d|Omega|)` for a ball (d = 3) or disk (d = 2).
pub fn ball_polarizability(chi1: Complex64, dim: usize) -> Result<Complex64> {
    let d = check_dim(dim)?;
    let den = chi1 + d;
    if near_zero(den, chi1.norm()) {
        return Err(Error::Pole(format!("susceptibility -{d}")));
    }
    Ok(d * chi1 / den)
}

/// Diagonal entries of `alpha/|Omega|` for an ellipse or ellipsoid with the
/// given depolarization factors.
pub fn ellipsoid_polarizability(chi1: Complex64, factors: &[f64]) -> Result<Vec<Complex64>> {
    check_dim(factors.len())?;
    validate_factors(factors)?;
    factors
        .iter()
        .enumerate()
        .map(|(index, &l)| {
            let den = ONE + l * chi1;
            if near_zero(den, 1.0 + chi1.norm()) {
                Err(Error::Resonance { index })
            } else {
                Ok(chi1 / den)
            }
        })
        .collect()
}

fn validate_factors(factors: &[f64]) -> Result<()> {
    if factors.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(Error::domain("depolarization factors must lie in [0, 1]"));
    }
    let sum: f64 = factors.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("depolarization factors sum to {sum}, not 1")));
    }
    Ok(())
}

/// Coated ball: matrix-permittivity core of volume fraction `core_fraction`
/// inside a shell of the inclusion material. The volume is the shell volume.
pub fn coated_polarizability(chi1: Complex64, dim: usize, core_fraction: f64) -> Result<Complex64> {
    if !(0.0..1.0).contains(&core_fraction) {
        return Err(Error::domain("core fraction must lie in [0, 1)"));
    }
    coated_shell_form(chi1, dim, 1.0 - core_fraction)
}

/// Coated-ball value written in terms of the shell fraction `delta`; smooth as
/// `delta -> 0`, where it becomes the thin-shell limit.
fn coated_shell_form(chi1: Complex64, dim: usize, delta: f64) -> Result<Complex64> {
    let d = check_dim(dim)?;
    let eps_s = ONE + chi1;
    if near_zero(eps_s, chi1.norm()) {
        return Err(Error::Pole("susceptibility -1 (zero shell permittivity)".into()));
    }
    let inner = d * eps_s - delta * chi1;
    if near_zero(inner, chi1.norm()) {
        return Err(Error::Pole("coated-ball resonance".into()));
    }
    // The coated ball acts outside like a homogeneous ball with
    // eps_eff - 1 = delta * n.
    let n = chi1 * (d * eps_s - chi1) / inner;
    let den = delta * n + d;
    if near_zero(den, n.norm()) {
        return Err(Error::Pole("coated-ball resonance".into()));
    }
    Ok(d * n / den)
}

/// `Tr(alpha)/(d|Omega|)` for a vanishingly thin spherical or cylindrical shell.
pub fn thin_shell_polarizability(chi1: Complex64, dim: usize) -> Result<Complex64> {
    coated_shell_form(chi1, dim, 0.0)
}

/// Inclusion geometries with closed-form polarizabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InclusionShape {
    SphereOrDisk { dim: usize },
    EllipseOrEllipsoid { depolarization_factors: Vec<f64> },
    CoatedSphereOrShell { dim: usize, core_fraction: f64 },
}

impl InclusionShape {
    pub fn dim(&self) -> usize {
        match self {
            InclusionShape::SphereOrDisk { dim } => *dim,
            InclusionShape::EllipseOrEllipsoid { depolarization_factors } => depolarization_factors.len(),
            InclusionShape::CoatedSphereOrShell { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim())?;
        match self {
            InclusionShape::EllipseOrEllipsoid { depolarization_factors } => validate_factors(depolarization_factors),
            InclusionShape::CoatedSphereOrShell { core_fraction, .. } if !(0.0..1.0).contains(core_fraction) => {
                Err(Error::domain("core fraction must lie in [0, 1)"))
            }
            _ => Ok(()),
        }
    }

    /// Diagonal of `alpha/|Omega|` (isotropic shapes repeat one value).
    pub fn alpha_diagonal(&self, chi1: Complex64) -> Result<Vec<Complex64>> {
        self.validate()?;
        match self {
            InclusionShape::SphereOrDisk { dim } => Ok(vec![ball_polarizability(chi1, *dim)?; *dim]),
            InclusionShape::EllipseOrEllipsoid { depolarization_factors } => {
                ellipsoid_polarizability(chi1, depolarization_factors)
            }
            InclusionShape::CoatedSphereOrShell { dim, core_fraction } => {
                Ok(vec![coated_polarizability(chi1, *dim, *core_fraction)?; *dim])
            }
        }
    }

    /// `Tr(alpha)/(d|Omega|)`.
    pub fn trace_average(&self, chi1: Complex64) -> Result<Complex64> {
        let diag = self.alpha_diagonal(chi1)?;
        Ok(diag.iter().sum::<Complex64>() / diag.len() as f64)
    }
}
