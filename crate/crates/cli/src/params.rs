//! JSON parameter schemas for each subcommand. Unknown keys are rejected.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};
use wavebound::acoustic_mie::{AcousticMedia, PlaneWave};
use wavebound::mobius_bounds::Contrast;
use wavebound::quasistatic_grid::{GridOptions, ProceduralShape};
use wavebound::shape_polarizability::InclusionShape;
use wavebound::{Error, LossConvention};

/// A complex number written either as a plain real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[f64; 2]")]
pub struct Cx(pub Complex64);

impl From<Cx> for [f64; 2] {
    fn from(z: Cx) -> Self {
        [z.0.re, z.0.im]
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Real(f64),
            Pair([f64; 2]),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Real(x) => Cx(Complex64::new(x, 0.0)),
            Repr::Pair([re, im]) => Cx(Complex64::new(re, im)),
        })
    }
}

/// Parses `re` or `re,im` from the command line.
impl std::str::FromStr for Cx {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num = |p: &str| p.parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}"));
        match parts.as_slice() {
            [re] => Ok(Cx(Complex64::new(num(re)?, 0.0))),
            [re, im] => Ok(Cx(Complex64::new(num(re)?, num(im)?))),
            _ => Err(format!("expected RE or RE,IM, got {s:?}")),
        }
    }
}

fn matrix(rows: &[Vec<Cx>], name: &str) -> Result<wavebound::y_problem::CMat, Error> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Domain(format!("{name}: rows differ in length")));
    }
    Ok(wavebound::y_problem::CMat::from_fn(nrows, ncols, |r, c| rows[r][c].0))
}

/// Inclusion susceptibility given as `chi1` or as `eps1 = 1 + chi1`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContrastParams {
    #[serde(default)]
    pub chi1: Option<Cx>,
    #[serde(default)]
    pub eps1: Option<Cx>,
    #[serde(default)]
    pub dim: Option<usize>,
    /// Points per arc in the CSV.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub convention: LossConvention,
    /// Optional value to test for membership.
    #[serde(default)]
    pub point: Option<Cx>,
}

fn default_samples() -> usize {
    201
}

fn susceptibility(chi1: Option<Cx>, eps1: Option<Cx>, convention: LossConvention) -> Result<Complex64, Error> {
    let chi = match (chi1, eps1) {
        (Some(c), None) => c.0,
        (None, Some(e)) => e.0 - 1.0,
        (None, None) => return Err(Error::Domain("one of chi1 or eps1 is required".into())),
        (Some(_), Some(_)) => return Err(Error::Domain("give chi1 or eps1, not both".into())),
    };
    Ok(convention.to_internal(chi))
}

impl ContrastParams {
    pub fn contrast(&self, default_dim: usize) -> Result<Contrast, Error> {
        if self.samples < 2 {
            return Err(Error::Domain("samples must be at least 2".into()));
        }
        let chi = susceptibility(self.chi1, self.eps1, self.convention)?;
        Contrast::new(chi, self.dim.unwrap_or(default_dim))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeParams {
    pub shape: InclusionShape,
    #[serde(default)]
    pub chi1: Option<Cx>,
    #[serde(default)]
    pub eps1: Option<Cx>,
    #[serde(default)]
    pub convention: LossConvention,
}

impl ShapeParams {
    pub fn chi1(&self) -> Result<Complex64, Error> {
        susceptibility(self.chi1, self.eps1, self.convention)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    /// Procedural inclusion; exclusive with `mask`.
    #[serde(default)]
    pub shape: Option<ProceduralShape>,
    /// PBM (`.pbm`) or NPY (`.npy`) mask file.
    #[serde(default)]
    pub mask: Option<PathBuf>,
    #[serde(default)]
    pub cell_length: Option<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Fill fractions for dilute extrapolation of a procedural shape.
    #[serde(default)]
    pub fills: Vec<f64>,
    #[serde(default)]
    pub chi1: Option<Cx>,
    #[serde(default)]
    pub eps1: Option<Cx>,
    #[serde(default)]
    pub convention: LossConvention,
    #[serde(default)]
    pub options: GridOptions,
}

fn default_n() -> usize {
    64
}

impl GridParams {
    pub fn eps1(&self) -> Result<Complex64, Error> {
        Ok(susceptibility(self.chi1, self.eps1, self.convention)? + 1.0)
    }
}

/// Dense instance: bases as columns of ambient-by-k matrices, `L` square.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YSolveParams {
    pub basis_e: Vec<Vec<Cx>>,
    pub basis_v: Vec<Vec<Cx>>,
    pub operator_l: Vec<Vec<Cx>>,
    /// Driving field in V; when present the full solution is reported.
    #[serde(default)]
    pub e1: Option<Vec<Cx>>,
}

impl YSolveParams {
    pub fn instance(&self) -> Result<wavebound::y_problem::YProblemInstance, Error> {
        let e = matrix(&self.basis_e, "basis_e")?;
        let v = matrix(&self.basis_v, "basis_v")?;
        let l = matrix(&self.operator_l, "operator_l")?;
        wavebound::y_problem::YProblemInstance::new(e, v, l)
    }
}

/// Optional sweeps over the size parameter and the time offset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweeps {
    /// Values of `k0 a`; omega is rescaled, the radius kept.
    #[serde(default)]
    pub ka: Vec<f64>,
    /// Values of `omega t0`.
    #[serde(default)]
    pub phase: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereParams {
    pub rho0: f64,
    pub kappa0: f64,
    pub rho1: Cx,
    pub kappa1: Cx,
    pub omega: f64,
    pub radius: f64,
    #[serde(default = "unit")]
    pub p_a: Cx,
    #[serde(default = "z_axis")]
    pub direction: [f64; 3],
    #[serde(default)]
    pub convention: LossConvention,
    #[serde(default = "default_angles")]
    pub far_field_samples: usize,
    #[serde(default = "default_half_planes")]
    pub n_angles: usize,
    #[serde(default)]
    pub sweeps: Sweeps,
}

fn unit() -> Cx {
    Cx(Complex64::new(1.0, 0.0))
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn default_angles() -> usize {
    181
}

fn default_half_planes() -> usize {
    16
}

impl SphereParams {
    pub fn media(&self) -> Result<AcousticMedia, Error> {
        let c = self.convention;
        AcousticMedia::new(self.rho0, self.kappa0, c.to_internal(self.rho1.0), c.to_internal(self.kappa1.0), self.omega)
    }

    pub fn wave(&self) -> Result<PlaneWave, Error> {
        PlaneWave::new(self.convention.to_internal(self.p_a.0), self.direction)
    }

    /// Media with omega chosen so that `k0 * radius = ka`.
    pub fn media_at(&self, ka: f64) -> Result<AcousticMedia, Error> {
        let base = self.media()?;
        if !(ka > 0.0 && ka.is_finite()) {
            return Err(Error::Domain(format!("swept k0 a must be positive, got {ka}")));
        }
        let omega = self.omega * ka / (base.k0() * self.radius);
        AcousticMedia::new(base.rho0, base.kappa0, base.rho1, base.kappa1, omega)
    }
}
