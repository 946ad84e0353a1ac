//! Plane-wave scattering by a penetrable lossy fluid sphere.
//!
//! Time dependence is `exp(-i omega t)`. The exterior pressure is
//! `p sum_l i^l (2l+1) [j_l(k0 r) + A_l h_l(k0 r)] P_l(cos theta)` and the
//! interior pressure `p sum_l i^l (2l+1) B_l j_l(k1 r) P_l(cos theta)`, with
//! `theta` measured from the incident direction.

pub mod bessel;
mod backscatter;
mod oscillatory;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use backscatter::{
    backscatter_bound, ball_phase_integrals, wrap_around_region, BackscatterBound, HalfPlane, WrapRegion,
};
pub use oscillatory::{oscillatory_asymptotic, oscillatory_quadrature};

use crate::convention::check_passive;
use crate::quadrature::{composite_gauss, gauss_legendre};
use crate::{Error, Result, SignCheck};
use bessel::{derivatives, div, legendre, spherical_hn, spherical_jn};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Matrix fluid and inclusion material at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcousticMedia {
    pub rho0: f64,
    pub kappa0: f64,
    pub rho1: Complex64,
    pub kappa1: Complex64,
    pub omega: f64,
}

impl AcousticMedia {
    pub fn new(rho0: f64, kappa0: f64, rho1: Complex64, kappa1: Complex64, omega: f64) -> Result<Self> {
        let m = AcousticMedia { rho0, kappa0, rho1, kappa1, omega };
        m.validate()?;
        Ok(m)
    }

    /// Positivity of the matrix and frequency, and passive inclusion losses.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rho0", self.rho0), ("kappa0", self.kappa0), ("omega", self.omega)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, z) in [("rho1", self.rho1), ("kappa1", self.kappa1)] {
            if !(z.re.is_finite() && z.im.is_finite()) || z.norm() == 0.0 {
                return Err(Error::domain(format!("{name} must be finite and nonzero")));
            }
        }
        check_passive("rho1", self.rho1, true, SignCheck::Enforce)?;
        check_passive("kappa1", self.kappa1, false, SignCheck::Enforce)
    }

    pub fn k0(&self) -> f64 {
        self.omega * (self.rho0 / self.kappa0).sqrt()
    }

    /// Interior wavenumber on the branch `Im k1 >= 0`.
    pub fn k1(&self) -> Result<Complex64> {
        let ratio = self.rho1 / self.kappa1;
        if ratio.im == 0.0 && ratio.re < 0.0 {
            return Err(Error::Branch(format!(
                "rho1/kappa1 = {} is negative real; the interior wavenumber is purely imaginary and its sign is ambiguous",
                ratio.re
            )));
        }
        let mut s = ratio.sqrt();
        if s.im < 0.0 {
            s = -s;
        }
        Ok(s * self.omega)
    }

    pub fn has_contrast(&self) -> bool {
        self.rho1 != C::new(self.rho0, 0.0) || self.kappa1 != C::new(self.kappa0, 0.0)
    }

    pub fn is_lossless(&self) -> bool {
        self.rho1.im == 0.0 && self.kappa1.im == 0.0
    }
}

/// Incident pressure `p exp(i k0 d.x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneWave {
    pub amplitude: Complex64,
    pub direction: [f64; 3],
}

impl PlaneWave {
    pub fn new(amplitude: Complex64, direction: [f64; 3]) -> Result<Self> {
        let w = PlaneWave { amplitude, direction };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.re.is_finite() && self.amplitude.im.is_finite()) || self.amplitude.norm() == 0.0 {
            return Err(Error::domain("incident amplitude must be finite and nonzero"));
        }
        check_unit(&self.direction)
    }
}

fn check_unit(d: &[f64; 3]) -> Result<()> {
    let n = dot(d, d).sqrt();
    if !((n - 1.0).abs() <= 1e-9) {
        return Err(Error::domain(format!("direction must be a unit vector, got norm {n}")));
    }
    Ok(())
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Partial-wave coefficients of the scattered (`a`) and interior (`b`) fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialWaveSolution {
    pub media: AcousticMedia,
    pub wave: PlaneWave,
    pub radius: f64,
    pub k0: f64,
    pub k1: Complex64,
    pub l_max: usize,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

/// Truncation order for size parameter `x`.
pub fn truncation_order(x: f64) -> usize {
    (x + 8.0 * x.cbrt() + 12.0).ceil() as usize
}

pub fn solve_sphere(media: &AcousticMedia, wave: &PlaneWave, radius: f64) -> Result<PartialWaveSolution> {
    media.validate()?;
    wave.validate()?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::domain(format!("sphere radius must be positive, got {radius}")));
    }
    let k0 = media.k0();
    let k1 = media.k1()?;
    let x0 = k0 * radius;
    if x0 > 50.0 {
        return Err(Error::domain(format!("k0 a = {x0} exceeds the supported range (at most 50)")));
    }
    let base = truncation_order(x0);
    let mut l_max = base;
    loop {
        let (a, b) = coefficients(media, k0, k1, radius, l_max)?;
        let peak = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if a[l_max].norm() <= 1e-12 * peak || peak == 0.0 {
            return Ok(PartialWaveSolution { media: *media, wave: *wave, radius, k0, k1, l_max, a, b });
        }
        if l_max >= 4 * base {
            return Err(Error::NoConvergence {
                context: "partial-wave tail".into(),
                iterations: l_max,
                residual: a[l_max].norm() / peak,
                history: vec![],
            });
        }
        l_max += 8;
    }
}

fn coefficients(media: &AcousticMedia, k0: f64, k1: C, radius: f64, l_max: usize) -> Result<(Vec<C>, Vec<C>)> {
    let n = l_max + 1;
    if !media.has_contrast() {
        return Ok((vec![C::default(); n], vec![C::new(1.0, 0.0); n]));
    }
    let x0 = k0 * radius;
    let x1 = k1 * radius;
    let j0 = spherical_jn(n, C::new(x0, 0.0));
    let dj0 = derivatives(&j0);
    let h0 = spherical_hn(n, x0);
    let dh0 = derivatives(&h0);
    let j1 = spherical_jn(n, x1);
    let dj1 = derivatives(&j1);
    // Ratio of normal-velocity factors inside and outside.
    let q = k1 * media.rho0 / (media.rho1 * k0);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for l in 0..n {
        let num = q * dj1[l] * j0[l] - dj0[l] * j1[l];
        let den = dh0[l] * j1[l] - q * dj1[l] * h0[l];
        let al = if num == C::default() { num } else { div(num, den) };
        let bl = if j1[l].norm() >= (q * dj1[l]).norm() {
            div(j0[l] + al * h0[l], j1[l])
        } else {
            div(dj0[l] + al * dh0[l], q * dj1[l])
        };
        if !(al.re.is_finite() && al.im.is_finite() && bl.re.is_finite() && bl.im.is_finite()) {
            return Err(Error::NoConvergence {
                context: format!("partial-wave coefficient l = {l}"),
                iterations: l,
                residual: f64::INFINITY,
                history: vec![],
            });
        }
        a.push(al);
        b.push(bl);
    }
    Ok((a, b))
}

impl PartialWaveSolution {
    /// Far-field amplitude at `cos theta = mu` relative to the incident direction.
    pub fn far_field_at(&self, mu: f64) -> Complex64 {
        let (p, _) = legendre(self.l_max, mu);
        let sum: C = self.a.iter().enumerate().map(|(l, a)| a * ((2 * l + 1) as f64 * p[l])).sum();
        -I * self.wave.amplitude / self.k0 * sum
    }

    fn mode_scale(&self) -> f64 {
        2.0 * PI * self.wave.amplitude.norm_sqr() / (self.k0 * self.media.omega * self.media.rho0)
    }

    /// Scattered power from the modal sum.
    pub fn scattered_power(&self) -> f64 {
        self.mode_scale() * self.a.iter().enumerate().map(|(l, a)| (2 * l + 1) as f64 * a.norm_sqr()).sum::<f64>()
    }

    /// Extinction from the forward amplitude, `2 pi Im[conj(p) P(k)] / (omega rho0)`.
    pub fn forward_extinction(&self) -> f64 {
        2.0 * PI * (self.wave.amplitude.conj() * self.far_field_at(1.0)).im / (self.media.omega * self.media.rho0)
    }

    /// Interior pressure and its radial and polar derivatives at `(r, mu)`.
    fn interior_field(&self, jr: &[C], djr: &[C], r: f64, mu: f64) -> (C, C, C) {
        let (p, dp) = legendre(self.l_max, mu);
        let sin = (1.0 - mu * mu).max(0.0).sqrt();
        let mut field = C::default();
        let mut radial = C::default();
        let mut polar = C::default();
        let mut il = C::new(1.0, 0.0);
        for l in 0..=self.l_max {
            let c = il * self.b[l] * (2 * l + 1) as f64;
            field += c * jr[l] * p[l];
            radial += c * djr[l] * p[l];
            polar -= c * jr[l] * sin * dp[l];
            il *= I;
        }
        let amp = self.wave.amplitude;
        (amp * field, amp * radial * self.k1, amp * polar / r)
    }

    /// Table of `j_l(k1 r)` and derivatives `j_l'(k1 r)` for `l = 0..=l_max`.
    fn interior_bessel(&self, r: f64) -> (Vec<C>, Vec<C>) {
        let j = spherical_jn(self.l_max + 1, self.k1 * r);
        let dj = derivatives(&j);
        (j, dj)
    }

    /// Absorbed power from the interior loss integral, by radial quadrature.
    pub fn absorbed_power_volume(&self) -> Result<f64> {
        let m = &self.media;
        if m.is_lossless() {
            return Ok(0.0);
        }
        let rho_w = m.rho1.im / (m.omega * m.rho1.norm_sqr());
        let kap_w = -m.omega * m.kappa1.im / m.kappa1.norm_sqr();
        let integrand = |r: f64| {
            let (j, dj) = self.interior_bessel(r);
            let mut s = 0.0;
            for l in 0..=self.l_max {
                let jj = j[l].norm_sqr();
                let grad = (self.k1 * dj[l]).norm_sqr() + (l * (l + 1)) as f64 * jj / (r * r);
                s += (2 * l + 1) as f64 * self.b[l].norm_sqr() * (rho_w * grad + kap_w * jj);
            }
            r * r * s
        };
        let scale = 2.0 * PI * self.wave.amplitude.norm_sqr();
        let mut panels = ((self.k1.norm() * self.radius).ceil() as usize).max(2);
        let mut prev = radial_integral(&integrand, self.radius, panels);
        loop {
            panels *= 2;
            let next = radial_integral(&integrand, self.radius, panels);
            if (next - prev).abs() <= 1e-12 * next.abs() {
                return Ok(scale * next);
            }
            if panels > 4096 {
                return Err(Error::NoConvergence {
                    context: "interior absorption quadrature".into(),
                    iterations: panels,
                    residual: (next - prev).abs() / next.abs(),
                    history: vec![],
                });
            }
            prev = next;
        }
    }

    /// Volume form of the scattering bilinear for outgoing direction `out`:
    /// the integral over the sphere of
    /// `-(1/rho1 - 1/rho0)/omega grad P'.grad P + omega (1/kappa1 - 1/kappa0) P' P`
    /// with probe `P' = exp(-i k0 out.x)` and `P` the interior field.
    pub fn bilinear_volume(&self, out: &[f64; 3]) -> Result<Complex64> {
        check_unit(out)?;
        if !self.media.has_contrast() {
            return Ok(C::default());
        }
        let x = (self.k1.norm() + self.k0) * self.radius;
        let mut level = Cubature {
            panels: (x / 3.0).ceil() as usize + 1,
            n_mu: self.l_max + (self.k0 * self.radius).ceil() as usize + 16,
            n_phi: 2 * (self.k0 * self.radius).ceil() as usize + 24,
        };
        let mut prev = self.bilinear_cubature(out, &level);
        let mut gap = f64::INFINITY;
        for _ in 0..4 {
            level = Cubature {
                panels: level.panels * 2,
                n_mu: level.n_mu * 3 / 2,
                n_phi: level.n_phi * 3 / 2,
            };
            let next = self.bilinear_cubature(out, &level);
            gap = (next - prev).norm() / next.norm().max(f64::MIN_POSITIVE);
            if gap <= 1e-11 {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::NoConvergence {
            context: "volume cubature of the scattering bilinear".into(),
            iterations: 4,
            residual: gap,
            history: vec![],
        })
    }

    fn bilinear_cubature(&self, out: &[f64; 3], level: &Cubature) -> C {
        let m = &self.media;
        let rho_c = -(1.0 / m.rho1 - 1.0 / m.rho0) / m.omega;
        let kap_c = m.omega * (1.0 / m.kappa1 - 1.0 / m.kappa0);
        let (e1, e2) = orthonormal_frame(&self.wave.direction);
        let c = [dot(out, &e1), dot(out, &e2), dot(out, &self.wave.direction)];

        let (rs, rw) = composite_gauss(0.0, self.radius, level.panels, 16);
        let (mus, muw) = gauss_legendre(level.n_mu);
        let dphi = 2.0 * PI / level.n_phi as f64;
        let trig: Vec<(f64, f64)> = (0..level.n_phi).map(|k| (k as f64 * dphi).sin_cos()).collect();

        let mut total = C::default();
        for (&r, &wr) in rs.iter().zip(&rw) {
            let (j, dj) = self.interior_bessel(r);
            for (&mu, &wmu) in mus.iter().zip(&muw) {
                let (field, radial, polar) = self.interior_field(&j, &dj, r, mu);
                let sin = (1.0 - mu * mu).sqrt();
                let mut ring = C::default();
                for &(sp, cp) in &trig {
                    let along = c[0] * sin * cp + c[1] * sin * sp + c[2] * mu;
                    let theta_dir = c[0] * mu * cp + c[1] * mu * sp - c[2] * sin;
                    let probe = C::from_polar(1.0, -self.k0 * r * along);
                    let out_grad = radial * along + polar * theta_dir;
                    // grad P' . grad P = -i k0 P' (out . grad P)
                    ring += probe * (rho_c * (-I * self.k0) * out_grad + kap_c * field);
                }
                total += ring * (wr * wmu * r * r * dphi);
            }
        }
        total
    }

    /// Per-mode coefficient table as CSV.
    pub fn coefficients_csv(&self) -> String {
        let mut s = String::from("l,a_re,a_im,b_re,b_im\n");
        for l in 0..=self.l_max {
            s.push_str(&format!("{l},{:e},{:e},{:e},{:e}\n", self.a[l].re, self.a[l].im, self.b[l].re, self.b[l].im));
        }
        s
    }

    /// Far-field amplitude over `samples` polar angles in [0, pi] as CSV.
    pub fn far_field_csv(&self, samples: usize) -> String {
        let mut s = String::from("theta,re,im\n");
        let n = samples.max(2);
        for k in 0..n {
            let theta = PI * k as f64 / (n - 1) as f64;
            let v = self.far_field_at(theta.cos());
            s.push_str(&format!("{theta:e},{:e},{:e}\n", v.re, v.im));
        }
        s
    }
}

struct Cubature {
    panels: usize,
    n_mu: usize,
    n_phi: usize,
}

fn radial_integral(f: &impl Fn(f64) -> f64, radius: f64, panels: usize) -> f64 {
    let (x, w) = composite_gauss(0.0, radius, panels, 16);
    x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum()
}

fn orthonormal_frame(d: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = (0..3).min_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs())).unwrap_or(0);
    let mut t = [0.0; 3];
    t[axis] = 1.0;
    let cross = |a: &[f64; 3], b: &[f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let mut e1 = cross(d, &t);
    let n = dot(&e1, &e1).sqrt();
    e1.iter_mut().for_each(|v| *v /= n);
    let e2 = cross(d, &e1);
    (e1, e2)
}

/// `P_inf` in direction `direction`.
pub fn far_field(solution: &PartialWaveSolution, direction: &[f64; 3]) -> Result<Complex64> {
    check_unit(direction)?;
    Ok(solution.far_field_at(dot(direction, &solution.wave.direction).clamp(-1.0, 1.0)))
}

/// Absorbed, scattered and extinguished power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBudget {
    /// From the modal sums.
    pub absorbed: f64,
    /// From the interior loss integral.
    pub absorbed_volume: f64,
    pub scattered: f64,
    /// `absorbed + scattered`.
    pub extinction: f64,
}

/// Tolerance on the gap between the two absorption routes, relative to the extinction.
pub const ABSORPTION_TOLERANCE: f64 = 1e-6;

pub fn power_budget(solution: &PartialWaveSolution) -> Result<PowerBudget> {
    let scale = solution.mode_scale();
    let absorbed = -scale
        * solution
            .a
            .iter()
            .enumerate()
            .map(|(l, a)| (2 * l + 1) as f64 * (a.re + a.norm_sqr()))
            .sum::<f64>();
    let scattered = solution.scattered_power();
    let absorbed_volume = solution.absorbed_power_volume()?;
    let extinction = absorbed + scattered;
    let gap = (absorbed - absorbed_volume).abs();
    if gap > ABSORPTION_TOLERANCE * extinction.abs().max(f64::MIN_POSITIVE) && gap > 1e-300 {
        return Err(Error::IdentityViolation {
            identity: "interior absorption integral vs modal absorption".into(),
            detail: format!("modal {absorbed:e}, volume {absorbed_volume:e}"),
        });
    }
    Ok(PowerBudget { absorbed, absorbed_volume, scattered, extinction })
}

/// Extinction computed three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpticalTheoremReport {
    /// Interior absorption integral plus modal scattered power.
    pub from_budget: f64,
    /// From the forward far-field amplitude.
    pub from_forward: f64,
    /// From the volume form of the bilinear at the incident direction.
    pub from_volume: f64,
    /// Largest pairwise gap relative to the extinction; zero when nothing scatters.
    pub residual: f64,
}

pub fn optical_theorem_residual(solution: &PartialWaveSolution) -> Result<OpticalTheoremReport> {
    let from_budget = solution.absorbed_power_volume()? + solution.scattered_power();
    let from_forward = solution.forward_extinction();
    let vol = solution.bilinear_volume(&solution.wave.direction)?;
    let from_volume = 0.5 * (solution.wave.amplitude.conj() * vol).im;
    let values = [from_budget, from_forward, from_volume];
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = if scale == 0.0 {
        0.0
    } else {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..i {
                worst = worst.max((values[i] - values[j]).abs());
            }
        }
        worst / scale
    };
    Ok(OpticalTheoremReport { from_budget, from_forward, from_volume, residual })
}

/// Both evaluations of the scattering bilinear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BilinearReport {
    /// `4 pi P_inf(out) / (omega rho0)`.
    pub value: Complex64,
    /// Interior volume integral.
    pub volume: Complex64,
    pub relative_gap: f64,
}

pub fn scattering_bilinear(solution: &PartialWaveSolution, out: &[f64; 3]) -> Result<BilinearReport> {
    let m = &solution.media;
    let value = far_field(solution, out)? * (4.0 * PI / (m.omega * m.rho0));
    let volume = solution.bilinear_volume(out)?;
    let scale = value.norm().max(volume.norm());
    let relative_gap = if scale == 0.0 { 0.0 } else { (value - volume).norm() / scale };
    Ok(BilinearReport { value, volume, relative_gap })
}
