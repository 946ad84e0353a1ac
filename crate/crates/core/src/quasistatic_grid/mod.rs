//! Polarizability of a pixelated inclusion from the periodic cell problem.
//!
//! The field inside the inclusion solves `(I + chi M Gamma M) e = M e0`, with
//! `Gamma` the projection onto periodic gradient fields and `M` restriction
//! to inclusion pixels. The dipole column is `chi` times the inclusion
//! average of `e`, which equals `(eps* - 1)/p` for the periodic array.

mod inclusion;
mod minres;
mod spectral;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use inclusion::{PixelInclusion, ProceduralShape};
pub use spectral::modified_frequency;

use crate::{Error, Result};
use minres::shifted_minres;
use spectral::RestrictedProjector;

/// Iteration controls for the cell solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridOptions {
    /// Relative residual target.
    pub tol: f64,
    /// Cap on total Lanczos steps across restarts.
    pub max_iter: usize,
    pub max_restarts: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { tol: 1e-8, max_iter: 5000, max_restarts: 8 }
    }
}

/// One column of `alpha/|Omega|` together with solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipoleColumn {
    pub column: Vec<Complex64>,
    /// Final true relative residual.
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationInfo {
    pub fill_fractions: Vec<f64>,
    /// Largest entrywise change between the extrapolated tensor and the
    /// estimate at the smallest fill fraction.
    pub increment: f64,
    pub relative_increment: f64,
}

/// `alpha/|Omega|` as a d-by-d matrix; entry `[i][j]` is component i of the
/// dipole induced by a unit field along axis j.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "EstimateReport")]
pub struct PolarizabilityEstimate {
    pub alpha_over_volume: Vec<Vec<Complex64>>,
    pub residual: f64,
    pub extrapolation_info: Option<ExtrapolationInfo>,
}

/// JSON shape of an estimate: real and imaginary matrices side by side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub alpha_re: Vec<Vec<f64>>,
    pub alpha_im: Vec<Vec<f64>>,
    pub residual: f64,
    pub extrapolation_info: Option<ExtrapolationInfo>,
}

impl From<PolarizabilityEstimate> for EstimateReport {
    fn from(e: PolarizabilityEstimate) -> Self {
        let part = |f: fn(&Complex64) -> f64| e.alpha_over_volume.iter().map(|row| row.iter().map(f).collect()).collect();
        EstimateReport {
            alpha_re: part(|z| z.re),
            alpha_im: part(|z| z.im),
            residual: e.residual,
            extrapolation_info: e.extrapolation_info,
        }
    }
}

impl PolarizabilityEstimate {
    pub fn dim(&self) -> usize {
        self.alpha_over_volume.len()
    }

    /// `Tr(alpha)/(d|Omega|)`.
    pub fn trace_average(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|i| self.alpha_over_volume[i][i]).sum::<Complex64>() / d as f64
    }

    /// Largest `|alpha_ij - alpha_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..i {
                worst = worst.max((self.alpha_over_volume[i][j] - self.alpha_over_volume[j][i]).norm());
            }
        }
        worst
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self.alpha_over_volume[i][j].norm());
                }
            }
        }
        worst
    }
}

fn check_eps1(eps1: Complex64) -> Result<()> {
    if !(eps1.re.is_finite() && eps1.im.is_finite()) {
        return Err(Error::domain("inclusion permittivity must be finite"));
    }
    if eps1.im == 0.0 && eps1.re <= 0.0 {
        return Err(Error::domain(
            "real non-positive inclusion permittivity makes the periodic cell problem singular",
        ));
    }
    Ok(())
}

/// Dipole column for a unit applied field along `direction`.
pub fn solve_dipole(
    inclusion: &PixelInclusion,
    eps1: Complex64,
    direction: &[f64],
    options: &GridOptions,
) -> Result<DipoleColumn> {
    check_eps1(eps1)?;
    let d = inclusion.dim();
    if direction.len() != d {
        return Err(Error::domain(format!("direction has {} components, expected {d}", direction.len())));
    }
    let dnorm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (dnorm - 1.0).abs() > 1e-9 {
        return Err(Error::domain("applied direction must be a unit vector"));
    }
    let chi = eps1 - 1.0;
    if chi == Complex64::default() {
        return Ok(DipoleColumn { column: vec![Complex64::default(); d], residual: 0.0, iterations: 0, history: vec![] });
    }

    let pixels = inclusion.pixels();
    let m = pixels.len();
    let mut projector = RestrictedProjector::new(inclusion.n(), d, pixels);
    let len = projector.unknowns();
    let b: Vec<Complex64> = (0..len).map(|i| Complex64::new(direction[i / m], 0.0)).collect();
    let bnorm = (m as f64).sqrt();
    let sigma = 1.0 / chi;

    // Solve (H + sigma) y = b; the inclusion field is y / chi.
    let mut y = vec![Complex64::default(); len];
    let mut r = b.clone();
    let mut hy = vec![Complex64::default(); len];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut rel = 1.0;
    for restart in 0..=options.max_restarts {
        if restart > 0 {
            projector.apply(&y, &mut hy);
            for i in 0..len {
                r[i] = b[i] - hy[i] - sigma * y[i];
            }
        }
        rel = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / bnorm;
        history.push(rel);
        if rel <= options.tol || iterations >= options.max_iter {
            break;
        }
        let mut apply = |u: &[Complex64], out: &mut [Complex64]| projector.apply(u, out);
        let outcome = shifted_minres(&mut apply, &r, sigma, 0.5 * options.tol * bnorm, options.max_iter - iterations);
        iterations += outcome.iterations;
        history.extend(outcome.history.iter().map(|h| h / bnorm));
        for (yi, dx) in y.iter_mut().zip(&outcome.x) {
            *yi += dx;
        }
    }
    if !(rel <= options.tol) {
        return Err(Error::NoConvergence {
            context: "periodic cell solve".into(),
            iterations,
            residual: rel,
            history,
        });
    }
    let column = (0..d)
        .map(|c| y[c * m..(c + 1) * m].iter().sum::<Complex64>() / m as f64)
        .collect();
    Ok(DipoleColumn { column, residual: rel, iterations, history })
}

/// Full tensor from one solve per axis.
pub fn solve_tensor(inclusion: &PixelInclusion, eps1: Complex64, options: &GridOptions) -> Result<PolarizabilityEstimate> {
    let d = inclusion.dim();
    let columns: Vec<DipoleColumn> = (0..d)
        .into_par_iter()
        .map(|j| {
            let mut dir = vec![0.0; d];
            dir[j] = 1.0;
            solve_dipole(inclusion, eps1, &dir, options)
        })
        .collect::<Result<_>>()?;
    let alpha = (0..d).map(|i| (0..d).map(|j| columns[j].column[i]).collect()).collect();
    let residual = columns.iter().map(|c| c.residual).fold(0.0, f64::max);
    Ok(PolarizabilityEstimate { alpha_over_volume: alpha, residual, extrapolation_info: None })
}

/// Linear-in-p extrapolation of each tensor entry to p = 0 (least squares
/// when more than two fill fractions are given).
pub fn extrapolate_dilute(samples: &[(f64, PolarizabilityEstimate)]) -> Result<PolarizabilityEstimate> {
    if samples.len() < 2 {
        return Err(Error::domain("dilute extrapolation needs at least two fill fractions"));
    }
    let d = samples[0].1.dim();
    for w in samples.windows(2) {
        let (p1, p2) = (w[0].0, w[1].0);
        if !(p2 > 0.0 && p1 > p2) {
            return Err(Error::domain("fill fractions must be positive and strictly decreasing"));
        }
        if p1 / p2 < 2.0 - 1e-9 {
            return Err(Error::domain(format!("fill fractions {p1} and {p2} are less than a factor 2 apart")));
        }
    }
    if samples.iter().any(|(_, e)| e.dim() != d) {
        return Err(Error::domain("estimates have mixed dimensions"));
    }
    let k = samples.len() as f64;
    let pbar = samples.iter().map(|s| s.0).sum::<f64>() / k;
    let spp: f64 = samples.iter().map(|s| (s.0 - pbar).powi(2)).sum();
    let last = &samples[samples.len() - 1].1;
    let mut alpha = vec![vec![Complex64::default(); d]; d];
    let mut increment = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let vbar = samples.iter().map(|s| s.1.alpha_over_volume[i][j]).sum::<Complex64>() / k;
            let slope = samples
                .iter()
                .map(|s| (s.1.alpha_over_volume[i][j] - vbar) * (s.0 - pbar))
                .sum::<Complex64>()
                / spp;
            alpha[i][j] = vbar - slope * pbar;
            increment = increment.max((alpha[i][j] - last.alpha_over_volume[i][j]).norm());
        }
    }
    let scale = alpha.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let residual = samples.iter().map(|s| s.1.residual).fold(0.0, f64::max);
    Ok(PolarizabilityEstimate {
        alpha_over_volume: alpha,
        residual,
        extrapolation_info: Some(ExtrapolationInfo {
            fill_fractions: samples.iter().map(|s| s.0).collect(),
            increment,
            relative_increment: if scale > 0.0 { increment / scale } else { 0.0 },
        }),
    })
}

/// Rasterises `shape` at each fill fraction, solves, and extrapolates.
pub fn dilute_estimate(
    shape: &ProceduralShape,
    n: usize,
    fills: &[f64],
    eps1: Complex64,
    options: &GridOptions,
) -> Result<PolarizabilityEstimate> {
    let samples = fills
        .iter()
        .map(|&f| {
            let inc = shape.with_fill(f).rasterize(n)?;
            Ok((inc.fill_fraction(), solve_tensor(&inc, eps1, options)?))
        })
        .collect::<Result<Vec<_>>>()?;
    extrapolate_dilute(&samples)
}
