//! Shape-independent bounds on the backscattered amplitude of a lossy inclusion.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{solve_sphere, AcousticMedia, PartialWaveSolution, PlaneWave};
use crate::{Error, Result};

/// `|x - x0|^2 / |Im x|`, the loss-weighted distance of a modulus from the
/// matrix value. Zero loss gives 0 for a matched modulus and +inf otherwise.
fn loss_term(x: Complex64, x0: f64) -> f64 {
    let d2 = (x - x0).norm_sqr();
    if x.im == 0.0 {
        if d2 == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        d2 / x.im.abs()
    }
}

/// `(int sin^2(k.x + phase), int cos^2(k.x + phase))` over a ball of radius `a`
/// centred at the origin, for `|k| = k0`.
pub fn ball_phase_integrals(k0: f64, radius: f64, phase: f64) -> (f64, f64) {
    let vol = 4.0 / 3.0 * PI * radius.powi(3);
    let x = 2.0 * k0 * radius;
    // int cos(2 k.x) over the ball
    let f = if x < 1e-3 {
        vol * (1.0 - x * x / 10.0 + x.powi(4) / 280.0)
    } else {
        4.0 * PI * (x.sin() - x * x.cos()) / (2.0 * k0).powi(3)
    };
    let c2 = (2.0 * phase).cos();
    (0.5 * vol - 0.5 * c2 * f, 0.5 * vol + 0.5 * c2 * f)
}

/// Backscatter amplitude against its bounds, for a sphere.
#[derive(Debug, Clone, Serialize)]
pub struct BackscatterBound {
    /// `4 pi |P_inf(-k)| / (|p| k0^2 |Omega|)`.
    pub lhs: f64,
    /// Loss-weighted contrast bound on `lhs`.
    pub rhs_86: f64,
    /// `rhs_86 - lhs`.
    pub margin: f64,
    /// `P_inf(-k)`.
    pub amplitude: Complex64,
    pub t0: f64,
    /// `4 pi Im(exp(2 i omega t0) p P_inf(-k)) / (omega rho0)`.
    pub lhs_85: f64,
    /// Its upper bound at `t0`.
    pub rhs_85: f64,
    #[serde(skip)]
    media: AcousticMedia,
    #[serde(skip)]
    wave: PlaneWave,
    #[serde(skip)]
    radius: f64,
}

impl BackscatterBound {
    /// Upper bound on `4 pi Im(exp(2 i omega t0) p P_inf(-k)) / (omega rho0)`.
    pub fn rhs_85_at(&self, t0: f64) -> f64 {
        rhs_85(&self.media, &self.wave, self.radius, t0)
    }

    pub fn lhs_85_at(&self, t0: f64) -> f64 {
        let m = &self.media;
        let w = Complex64::from_polar(1.0, 2.0 * m.omega * t0) * self.wave.amplitude;
        4.0 * PI * (w * self.amplitude).im / (m.omega * m.rho0)
    }
}

fn rhs_86(m: &AcousticMedia) -> f64 {
    loss_term(m.rho1, m.rho0) / m.rho0 + loss_term(m.kappa1, m.kappa0) / m.kappa0
}

fn rhs_85(m: &AcousticMedia, wave: &PlaneWave, radius: f64, t0: f64) -> f64 {
    let rho_t = loss_term(m.rho1, m.rho0);
    let kap_t = loss_term(m.kappa1, m.kappa0);
    let phase = m.omega * t0 + wave.amplitude.arg();
    let (s, c) = ball_phase_integrals(m.k0(), radius, phase);
    let mut total = 0.0;
    if rho_t != 0.0 {
        total += rho_t / (m.rho0 * m.kappa0) * s;
    }
    if kap_t != 0.0 {
        total += kap_t / (m.kappa0 * m.kappa0) * c;
    }
    m.omega * wave.amplitude.norm_sqr() * total
}

fn backscatter_amplitude(sol: &PartialWaveSolution) -> Complex64 {
    sol.far_field_at(-1.0)
}

pub fn backscatter_bound(media: &AcousticMedia, wave: &PlaneWave, radius: f64, t0: f64) -> Result<BackscatterBound> {
    let sol = solve_sphere(media, wave, radius)?;
    let amplitude = backscatter_amplitude(&sol);
    let k0 = media.k0();
    let vol = 4.0 / 3.0 * PI * radius.powi(3);
    let lhs = 4.0 * PI * amplitude.norm() / (wave.amplitude.norm() * k0 * k0 * vol);
    let rhs = rhs_86(media);
    let mut out = BackscatterBound {
        lhs,
        rhs_86: rhs,
        margin: rhs - lhs,
        amplitude,
        t0,
        lhs_85: 0.0,
        rhs_85: rhs_85(media, wave, radius, t0),
        media: *media,
        wave: *wave,
        radius,
    };
    out.lhs_85 = out.lhs_85_at(t0);
    Ok(out)
}

/// `{z : Im(weight z) <= bound}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HalfPlane {
    pub t0: f64,
    pub weight: Complex64,
    pub bound: f64,
}

impl HalfPlane {
    /// Signed distance from the boundary line, positive inside.
    pub fn margin(&self, z: Complex64) -> f64 {
        (self.bound - (self.weight * z).im) / self.weight.norm()
    }
}

/// Intersection of the half-planes as a convex polygon.
#[derive(Debug, Clone, Serialize)]
pub struct WrapRegion {
    pub half_planes: Vec<HalfPlane>,
    /// Counter-clockwise vertices; empty when every bound is vacuous.
    pub vertices: Vec<Complex64>,
    pub bounded: bool,
    /// Mie backscatter amplitude `P_inf(-k)`.
    pub amplitude: Complex64,
    /// Smallest distance from the amplitude to a boundary line, positive inside.
    pub margin: f64,
}

impl WrapRegion {
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.half_planes.iter().all(|h| h.margin(z) >= -tol)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im\n");
        for v in &self.vertices {
            s.push_str(&format!("{:e},{:e}\n", v.re, v.im));
        }
        s
    }
}

/// Intersects the half-planes for `omega t0 = pi j / n_angles`, `j < n_angles`.
pub fn wrap_around_region(media: &AcousticMedia, wave: &PlaneWave, radius: f64, n_angles: usize) -> Result<WrapRegion> {
    if n_angles < 4 {
        return Err(Error::domain("at least 4 half-planes are needed"));
    }
    let sol = solve_sphere(media, wave, radius)?;
    let amplitude = backscatter_amplitude(&sol);
    // Im(w z) <= rhs_85 omega rho0 / (4 pi)
    let half_planes: Vec<HalfPlane> = (0..n_angles)
        .map(|j| {
            let t0 = PI * j as f64 / (n_angles as f64 * media.omega);
            HalfPlane {
                t0,
                weight: Complex64::from_polar(1.0, 2.0 * media.omega * t0) * wave.amplitude,
                bound: rhs_85(media, wave, radius, t0) * media.omega * media.rho0 / (4.0 * PI),
            }
        })
        .collect();
    let margin = half_planes.iter().map(|h| h.margin(amplitude)).fold(f64::INFINITY, f64::min);

    let finite: Vec<&HalfPlane> = half_planes.iter().filter(|h| h.bound.is_finite()).collect();
    if finite.is_empty() {
        return Ok(WrapRegion { half_planes, vertices: vec![], bounded: false, amplitude, margin });
    }
    let reach = finite.iter().map(|h| h.bound.abs() / h.weight.norm()).fold(0.0, f64::max);
    let size = 4.0 * reach + 4.0 * amplitude.norm() + 1.0;
    let mut poly = vec![
        Complex64::new(-size, -size),
        Complex64::new(size, -size),
        Complex64::new(size, size),
        Complex64::new(-size, size),
    ];
    for h in &finite {
        poly = clip(&poly, h);
        if poly.is_empty() {
            return Err(Error::EmptyRegion("the backscatter half-planes have no common point".into()));
        }
    }
    // The box constrains only if some direction was left without a finite bound.
    let bounded = finite.len() == half_planes.len();
    Ok(WrapRegion { half_planes, vertices: poly, bounded, amplitude, margin })
}

/// Sutherland-Hodgman step against one half-plane.
fn clip(poly: &[Complex64], h: &HalfPlane) -> Vec<Complex64> {
    let value = |z: Complex64| h.bound - (h.weight * z).im;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (va, vb) = (value(a), value(b));
        if va >= 0.0 {
            out.push(a);
        }
        if (va >= 0.0) != (vb >= 0.0) {
            let t = va / (va - vb);
            out.push(a + (b - a) * t);
        }
    }
    out
}
