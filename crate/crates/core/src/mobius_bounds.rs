//! Bound curves on complex polarizabilities and effective moduli.
//!
//! Each bound curve is the image of a real parameter interval under a
//! fractional-linear (Mobius) map, so it is an arc of a circle or a segment of
//! a line. Bound regions are intersections of the closed disks or half-planes
//! carrying those arcs, with the admissible side fixed by an interior witness.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convention::{check_passive, SignCheck};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Absolute floor applied to every relative tolerance in this module.
pub const TOL_FLOOR: f64 = 1e-14;

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= 1e-15 * (1.0 + z.norm())
}

fn scaled_tol(tol: f64, z: Complex64) -> f64 {
    (tol * (1.0 + z.norm())).max(TOL_FLOOR)
}

/// Susceptibility of the inclusion phase relative to a unit-permittivity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    pub chi1: Complex64,
    pub dim: usize,
}

impl Contrast {
    pub fn new(chi1: Complex64, dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !chi1.re.is_finite() || !chi1.im.is_finite() {
            return Err(Error::domain("susceptibility must be finite"));
        }
        Ok(Self { chi1, dim })
    }

    pub fn from_eps1(eps1: Complex64, dim: usize) -> Result<Self> {
        Self::new(eps1 - ONE, dim)
    }

    pub fn eps1(&self) -> Complex64 {
        self.chi1 + ONE
    }

    /// Reject inclusions with gain under the internal loss convention.
    pub fn check_passive(&self, check: SignCheck) -> Result<()> {
        check_passive("chi1", self.chi1, true, check)
    }
}

/// Generalized circle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GenCircle {
    Circle { center: Complex64, radius: f64 },
    /// Line through `point` with unit tangent `direction`.
    Line { point: Complex64, direction: Complex64 },
}

impl GenCircle {
    /// Signed distance: negative inside a circle, and for a line negative to the
    /// right of `direction`.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        match *self {
            GenCircle::Circle { center, radius } => (z - center).norm() - radius,
            GenCircle::Line { point, direction } => (direction.conj() * (z - point)).im,
        }
    }

    /// Circle through three distinct points (a line if they are collinear).
    pub fn through(z1: Complex64, z2: Complex64, z3: Complex64) -> Option<Self> {
        let a = z2 - z1;
        let b = z3 - z1;
        let cross = (a.conj() * b).im;
        let scale = a.norm() * b.norm();
        if scale == 0.0 {
            return None;
        }
        if cross.abs() <= 1e-13 * scale {
            let direction = if a.norm() > 0.0 { a / a.norm() } else { b / b.norm() };
            return Some(GenCircle::Line { point: z1, direction });
        }
        // Circumcenter relative to z1.
        let num = a * b.norm_sqr() - b * a.norm_sqr();
        let den = Complex64::new(0.0, 2.0 * cross);
        let rel = -num / den;
        let center = z1 + rel;
        Some(GenCircle::Circle { center, radius: rel.norm() })
    }
}

/// Fractional-linear map `t -> (a t + b) / (c t + d)` restricted to a real
/// parameter interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusArc {
    pub coeff_a: Complex64,
    pub coeff_b: Complex64,
    pub coeff_c: Complex64,
    pub coeff_d: Complex64,
    pub param_lo: f64,
    pub param_hi: f64,
}

impl MobiusArc {
    /// Build a non-degenerate map on the default interval [0, 1].
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let arc = Self::raw(a, b, c, d);
        if arc.is_degenerate() {
            return Err(Error::Degenerate(
                "Mobius map with a d - b c = 0 collapses to a point".into(),
            ));
        }
        Ok(arc)
    }

    fn raw(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { coeff_a: a, coeff_b: b, coeff_c: c, coeff_d: d, param_lo: 0.0, param_hi: 1.0 }
    }

    pub fn affine(scale: Complex64, shift: Complex64) -> Self {
        Self::raw(scale, shift, ZERO, ONE)
    }

    pub fn determinant(&self) -> Complex64 {
        self.coeff_a * self.coeff_d - self.coeff_b * self.coeff_c
    }

    /// True when the map is constant to round-off.
    pub fn is_degenerate(&self) -> bool {
        let scale = self.coeff_a.norm() * self.coeff_d.norm()
            + self.coeff_b.norm() * self.coeff_c.norm();
        scale == 0.0 || self.determinant().norm() <= 1e-13 * scale
    }

    /// `outer` applied after `self`.
    pub fn then(&self, outer: &MobiusArc) -> MobiusArc {
        let (a1, b1, c1, d1) = (outer.coeff_a, outer.coeff_b, outer.coeff_c, outer.coeff_d);
        let (a2, b2, c2, d2) = (self.coeff_a, self.coeff_b, self.coeff_c, self.coeff_d);
        MobiusArc {
            coeff_a: a1 * a2 + b1 * c2,
            coeff_b: a1 * b2 + b1 * d2,
            coeff_c: c1 * a2 + d1 * c2,
            coeff_d: c1 * b2 + d1 * d2,
            param_lo: self.param_lo,
            param_hi: self.param_hi,
        }
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.param_lo = lo;
        self.param_hi = hi;
        self
    }

    pub fn conj(&self) -> Self {
        MobiusArc {
            coeff_a: self.coeff_a.conj(),
            coeff_b: self.coeff_b.conj(),
            coeff_c: self.coeff_c.conj(),
            coeff_d: self.coeff_d.conj(),
            ..*self
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.eval_complex(Complex64::new(t, 0.0))
    }

    /// Evaluate at a complex argument; returns an infinite value at the pole.
    pub fn eval_complex(&self, t: Complex64) -> Complex64 {
        let den = self.coeff_c * t + self.coeff_d;
        let num = self.coeff_a * t + self.coeff_b;
        if den == ZERO {
            return Complex64::new(f64::INFINITY, f64::INFINITY);
        }
        num / den
    }

    /// Parameter that maps to `z` (generally complex).
    pub fn inverse(&self, z: Complex64) -> Complex64 {
        (self.coeff_d * z - self.coeff_b) / (self.coeff_a - self.coeff_c * z)
    }

    pub fn start(&self) -> Complex64 {
        self.eval(self.param_lo)
    }

    pub fn end(&self) -> Complex64 {
        self.eval(self.param_hi)
    }

    pub fn midpoint(&self) -> Complex64 {
        self.eval(0.5 * (self.param_lo + self.param_hi))
    }

    /// Pole of the map in the parameter plane, if any.
    pub fn pole(&self) -> Option<Complex64> {
        if self.coeff_c == ZERO {
            None
        } else {
            Some(-self.coeff_d / self.coeff_c)
        }
    }

    fn real_pole(&self) -> Option<f64> {
        self.pole().filter(|p| p.im.abs() <= 1e-12 * (1.0 + p.norm())).map(|p| p.re)
    }

    /// Image of the real axis is a straight line.
    pub fn is_straight(&self) -> bool {
        self.pole().is_none() || self.real_pole().is_some()
    }

    /// The arc runs through infinity on its parameter interval.
    pub fn passes_through_infinity(&self) -> bool {
        matches!(self.real_pole(), Some(p) if p >= self.param_lo && p <= self.param_hi)
    }

    /// Full generalized circle carrying the arc.
    pub fn circle(&self) -> GenCircle {
        match self.pole() {
            None => {
                let p0 = self.eval(0.0);
                let dir = self.coeff_a / self.coeff_d;
                GenCircle::Line { point: p0, direction: dir / dir.norm() }
            }
            Some(pole) if self.real_pole().is_some() => {
                let t = pole.re;
                let p0 = self.eval(t - 1.0);
                let p1 = self.eval(t + 1.0);
                let dir = p1 - p0;
                GenCircle::Line { point: p0, direction: dir / dir.norm() }
            }
            Some(pole) => {
                // The centre is the image of the reflection of the pole.
                let center = self.eval_complex(pole.conj());
                let radius = (self.eval(0.0) - center).norm();
                GenCircle::Circle { center, radius }
            }
        }
    }

    /// `n` uniformly spaced samples (parameter, value) across the interval.
    pub fn sample(&self, n: usize) -> Vec<(f64, Complex64)> {
        let n = n.max(2);
        (0..n)
            .map(|k| {
                let t = self.param_lo + (self.param_hi - self.param_lo) * k as f64 / (n - 1) as f64;
                (t, self.eval(t))
            })
            .collect()
    }
}

/// Region bounded by two arcs, optionally cut further by extra curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRegion {
    pub arc1: MobiusArc,
    pub arc2: MobiusArc,
    pub interior_witness: Complex64,
    /// Additional curves whose full circles also constrain the region.
    #[serde(default)]
    pub extra: Vec<MobiusArc>,
}

impl BoundRegion {
    fn curves(&self) -> impl Iterator<Item = &MobiusArc> {
        [&self.arc1, &self.arc2].into_iter().chain(self.extra.iter())
    }

    /// Circles with the sign that makes the witness side negative.
    fn constraints(&self) -> Vec<(GenCircle, f64)> {
        self.curves()
            .map(|arc| {
                let c = arc.circle();
                let s = c.signed_distance(self.interior_witness);
                (c, if s <= 0.0 { 1.0 } else { -1.0 })
            })
            .collect()
    }

    /// Largest oriented distance outside any constraint (negative: strictly inside).
    pub fn margin(&self, z: Complex64) -> f64 {
        self.constraints()
            .iter()
            .map(|(c, sign)| sign * c.signed_distance(z))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn build(arc1: MobiusArc, arc2: MobiusArc, witness: Complex64, extra: Vec<MobiusArc>) -> Result<Self> {
        let region = BoundRegion { arc1, arc2, interior_witness: witness, extra };
        for (c, _) in region.constraints() {
            let s = c.signed_distance(witness);
            if !s.is_finite() || s.abs() <= TOL_FLOOR * (1.0 + witness.norm()) {
                return Err(Error::Degenerate(
                    "interior witness lies on a bounding circle".into(),
                ));
            }
        }
        for arc in region.curves().take(2) {
            for (_, z) in arc.sample(9) {
                if !region_contains(&region, z, 1e-9) {
                    return Err(Error::Degenerate(format!(
                        "boundary point {z} falls outside the constructed region"
                    )));
                }
            }
        }
        Ok(region)
    }

    pub fn conj(&self) -> Self {
        BoundRegion {
            arc1: self.arc1.conj(),
            arc2: self.arc2.conj(),
            interior_witness: self.interior_witness.conj(),
            extra: self.extra.iter().map(MobiusArc::conj).collect(),
        }
    }
}

/// Membership in the closed region, expanded by `tol * (1 + |z|)` (floor 1e-14).
pub fn region_contains(region: &BoundRegion, z: Complex64, tol: f64) -> bool {
    if !z.re.is_finite() || !z.im.is_finite() {
        return false;
    }
    region.margin(z) <= scaled_tol(tol, z)
}

/// Admissible set after handling degenerate inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdmissibleSet {
    Point { value: Complex64 },
    Interval { lo: f64, hi: f64 },
    Region { region: BoundRegion },
}

impl AdmissibleSet {
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        match self {
            AdmissibleSet::Point { value } => (z - value).norm() <= scaled_tol(tol, z),
            AdmissibleSet::Interval { lo, hi } => {
                let t = scaled_tol(tol, z);
                z.im.abs() <= t && z.re >= lo - t && z.re <= hi + t
            }
            AdmissibleSet::Region { region } => region_contains(region, z, tol),
        }
    }
}

/// Interval for `Tr(alpha)/(d|Omega|)` when the susceptibility is real.
pub fn hs_interval(contrast: &Contrast) -> Result<(f64, f64)> {
    let chi = contrast.chi1;
    if !is_real(chi) {
        return Err(Error::domain(format!("hs_interval needs a real susceptibility, got {chi}")));
    }
    let x = chi.re;
    let d = contrast.dim as f64;
    if x == -1.0 {
        return Err(Error::Pole("susceptibility -1 (zero permittivity)".into()));
    }
    if x == -d {
        return Err(Error::Pole(format!("susceptibility -{d}")));
    }
    if x < -1.0 {
        return Err(Error::domain("inclusion permittivity must be positive"));
    }
    let shell = x - x * x / (d * (1.0 + x));
    let ball = x - x * x / (x + d);
    Ok(if shell <= ball { (shell, ball) } else { (ball, shell) })
}

/// Interval of admissible effective permittivities for real phases.
pub fn hs_composite_interval(eps1: f64, p: f64, dim: usize) -> Result<(f64, f64)> {
    check_fraction(p)?;
    let d = dim as f64;
    let chi = eps1 - 1.0;
    let lower = 1.0 + d * p * chi / (d + (1.0 - p) * chi);
    let upper = eps1 + d * (1.0 - p) * eps1 * (1.0 - eps1) / (d * eps1 + p * (1.0 - eps1));
    if !lower.is_finite() || !upper.is_finite() {
        return Err(Error::Pole("singular denominator in the real-phase interval".into()));
    }
    Ok((lower.min(upper), lower.max(upper)))
}

fn check_fraction(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("volume fraction {p} outside [0, 1]")))
    }
}

fn require_lossy(chi: Complex64) -> Result<()> {
    if is_real(chi) {
        return Err(Error::Degenerate(
            "real susceptibility gives a zero-width region; use hs_interval".into(),
        ));
    }
    if chi.im < 0.0 {
        return Err(Error::domain(format!(
            "susceptibility {chi} has negative imaginary part (gain medium)"
        )));
    }
    Ok(())
}

/// `t -> eps / ((1 - eps) t + eps)`, the reciprocal of `t/eps + 1 - t`.
fn harmonic_weight(eps: Complex64) -> MobiusArc {
    MobiusArc::raw(ZERO, eps, ONE - eps, eps)
}

/// `u -> base - k / u`.
fn subtract_reciprocal(base: Complex64, k: Complex64) -> MobiusArc {
    MobiusArc::raw(base, -k, ONE, ZERO)
}

/// The two dilute-limit arcs bounding `Tr(alpha)/(d|Omega|)`.
pub fn bm_arcs(contrast: &Contrast) -> (MobiusArc, MobiusArc) {
    let chi = contrast.chi1;
    let eps = contrast.eps1();
    let dm1 = Complex64::new(contrast.dim as f64 - 1.0, 0.0);
    let outer = subtract_reciprocal(chi, chi * chi);
    let arc1 = harmonic_weight(eps)
        .then(&MobiusArc::affine(dm1, eps))
        .then(&outer);
    let arc2 = MobiusArc::affine(dm1 * chi, eps + dm1).then(&outer);
    (arc1, arc2)
}

/// Lens bounding `Tr(alpha)/(d|Omega|)` for a lossy inclusion.
pub fn bm_region(contrast: &Contrast) -> Result<BoundRegion> {
    require_lossy(contrast.chi1)?;
    let (arc1, arc2) = bm_arcs(contrast);
    for arc in [&arc1, &arc2] {
        if arc.is_degenerate() {
            return Err(Error::Degenerate("bound arc collapsed to a point".into()));
        }
    }
    let witness = 0.5 * (arc1.midpoint() + arc2.midpoint());
    BoundRegion::build(arc1, arc2, witness, Vec::new())
}

/// Two-dimensional curves: a circular arc from the disk value to the thin-shell
/// value, and the straight chord back.
///
/// The chord parameter stops at 1/2, where it reaches the disk value and the
/// region closes.
pub fn milton2d_curves(contrast: &Contrast) -> Result<(MobiusArc, MobiusArc)> {
    if contrast.dim != 2 {
        return Err(Error::UnsupportedDimension(contrast.dim));
    }
    let chi = contrast.chi1;
    let two = Complex64::new(2.0, 0.0);
    let arc1 = MobiusArc::raw(ZERO, two * chi * (two + chi), -chi * chi, (two + chi) * (two + chi));
    let slope = -chi * chi * chi / ((chi + ONE) * (chi + two));
    let start = chi * (two + chi) / (two * (ONE + chi));
    let arc2 = MobiusArc::affine(slope, start).with_range(0.0, 0.5);
    Ok((arc1, arc2))
}

/// Region from the two-dimensional curves intersected with the lens.
pub fn milton2d_region(contrast: &Contrast) -> Result<BoundRegion> {
    require_lossy(contrast.chi1)?;
    let bm = bm_region(contrast)?;
    let (arc1, arc2) = milton2d_curves(contrast)?;
    let witness = 0.5 * (arc1.midpoint() + arc2.midpoint());
    BoundRegion::build(arc1, arc2, witness, vec![bm.arc1, bm.arc2])
}

/// Finite volume fraction arcs for the effective permittivity (matrix permittivity 1).
pub fn bm_composite_arcs(eps1: Complex64, p: f64, dim: usize) -> (MobiusArc, MobiusArc) {
    let chi = eps1 - ONE;
    let pc = Complex64::new(p, 0.0);
    let q = 1.0 - p;
    let dm1 = Complex64::new(dim as f64 - 1.0, 0.0);
    let dd = q * eps1 + pc;
    let outer = subtract_reciprocal(ONE + pc * chi, p * q * chi * chi);
    let arc1 = harmonic_weight(eps1)
        .then(&MobiusArc::affine(dm1, dd))
        .then(&outer);
    let arc2 = MobiusArc::affine(dm1 * chi, dd + dm1).then(&outer);
    (arc1, arc2)
}

/// Finite volume fraction two-dimensional arcs for the effective permittivity.
pub fn milton_composite_arcs(eps1: Complex64, p: f64) -> (MobiusArc, MobiusArc) {
    let chi = eps1 - ONE;
    let q = 1.0 - p;
    let chi2 = chi * chi;
    let arc1 = MobiusArc::raw(
        -q * chi2,
        (p * eps1 + q + eps1) * (eps1 + ONE),
        -q * chi2,
        (q * eps1 + p + 1.0) * (eps1 + ONE),
    );
    let arc2 = MobiusArc::raw(
        -eps1 * p * chi2,
        eps1 * (p * eps1 + 2.0 - p) * (eps1 + ONE),
        -p * chi2,
        (q * eps1 + p + eps1) * (eps1 + ONE),
    );
    (arc1, arc2)
}

/// Bounds on the effective permittivity at volume fraction `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeBounds {
    pub bm: AdmissibleSet,
    /// Present only in two dimensions.
    pub milton: Option<AdmissibleSet>,
}

/// Parameter at which `arc` reaches `target`, if it is real and in (lo, hi].
fn closing_parameter(arc: &MobiusArc, target: Complex64) -> Option<f64> {
    let t = arc.inverse(target);
    let ok = t.re.is_finite() && t.im.abs() <= 1e-8 * (1.0 + t.re.abs());
    ok.then_some(t.re)
}

pub fn bm_composite_region(eps1: Complex64, p: f64, dim: usize) -> Result<CompositeBounds> {
    check_fraction(p)?;
    let contrast = Contrast::from_eps1(eps1, dim)?;
    let chi = contrast.chi1;
    let point = |v: Complex64| AdmissibleSet::Point { value: v };
    if chi == ZERO || p == 0.0 {
        let set = point(ONE);
        return Ok(CompositeBounds { milton: (dim == 2).then(|| set.clone()), bm: set });
    }
    if p == 1.0 {
        let set = point(eps1);
        return Ok(CompositeBounds { milton: (dim == 2).then(|| set.clone()), bm: set });
    }
    if is_real(chi) {
        let (lo, hi) = hs_composite_interval(eps1.re, p, dim)?;
        let set = AdmissibleSet::Interval { lo, hi };
        return Ok(CompositeBounds { milton: (dim == 2).then(|| set.clone()), bm: set });
    }
    require_lossy(chi)?;
    let (a1, a2) = bm_composite_arcs(eps1, p, dim);
    let witness = 0.5 * (a1.midpoint() + a2.midpoint());
    let bm = BoundRegion::build(a1, a2, witness, Vec::new())?;
    let milton = if dim == 2 {
        let (m1, m2) = milton_composite_arcs(eps1, p);
        let w_close = closing_parameter(&m2, m1.start())
            .filter(|w| *w > 0.0 && *w <= 1.0 + 1e-12)
            .ok_or_else(|| Error::Degenerate("two-dimensional curves do not close".into()))?;
        let m2 = m2.with_range(0.0, w_close.min(1.0));
        let witness = 0.5 * (m1.midpoint() + m2.midpoint());
        let region = BoundRegion::build(m1, m2, witness, vec![bm.arc1, bm.arc2])?;
        Some(AdmissibleSet::Region { region })
    } else {
        None
    };
    Ok(CompositeBounds { bm: AdmissibleSet::Region { region: bm }, milton })
}

/// Inclusion and matrix elastic moduli at volume fraction `volume_fraction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticModuliPair {
    pub kappa1: Complex64,
    pub mu1: Complex64,
    pub kappa0: f64,
    pub mu0: f64,
    pub volume_fraction: f64,
}

impl ElasticModuliPair {
    pub fn new(
        kappa1: Complex64,
        mu1: Complex64,
        kappa0: f64,
        mu0: f64,
        volume_fraction: f64,
        check: SignCheck,
    ) -> Result<Self> {
        if !(kappa0 > 0.0 && mu0 > 0.0) {
            return Err(Error::domain("matrix moduli must be positive"));
        }
        check_fraction(volume_fraction)?;
        check_passive("kappa1", kappa1, false, check)?;
        check_passive("mu1", mu1, false, check)?;
        Ok(Self { kappa1, mu1, kappa0, mu0, volume_fraction })
    }
}

fn singular(den: Complex64, scale: f64) -> bool {
    !(den.norm() > 1e-14 * scale.max(TOL_FLOOR))
}

/// Y-transform of one effective modulus.
pub fn y_transform(m1: Complex64, m0: f64, p: f64, m_star: Complex64) -> Result<Complex64> {
    let q = 1.0 - p;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("the transform needs a volume fraction strictly inside (0, 1)"));
    }
    let diff = m1 - m0;
    if diff == ZERO {
        return Err(Error::Degenerate("inclusion and matrix moduli coincide".into()));
    }
    let den = p * m1 + q * m0 - m_star;
    if singular(den, m1.norm() + m0.abs()) {
        return Err(Error::Singular("effective modulus equals the arithmetic mean".into()));
    }
    Ok(-q * m1 - p * m0 + p * q * diff * diff / den)
}

/// Inverse of [`y_transform`].
pub fn inverse_y_transform(m1: Complex64, m0: f64, p: f64, y: Complex64) -> Result<Complex64> {
    let q = 1.0 - p;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("the transform needs a volume fraction strictly inside (0, 1)"));
    }
    let diff = m1 - m0;
    if diff == ZERO {
        return Err(Error::Degenerate("inclusion and matrix moduli coincide".into()));
    }
    let den = y + q * m1 + p * m0;
    if singular(den, m1.norm() + m0.abs()) {
        return Err(Error::Singular("Y value equals minus the weighted mean".into()));
    }
    Ok(p * m1 + q * m0 - p * q * diff * diff / den)
}

/// Y-transforms of the effective bulk and shear moduli.
pub fn elastic_y_transform(
    moduli: &ElasticModuliPair,
    kappa_star: Complex64,
    mu_star: Complex64,
) -> Result<(Complex64, Complex64)> {
    let p = moduli.volume_fraction;
    Ok((
        y_transform(moduli.kappa1, moduli.kappa0, p, kappa_star)?,
        y_transform(moduli.mu1, moduli.mu0, p, mu_star)?,
    ))
}

/// Effective moduli recovered from their Y-transforms.
pub fn elastic_from_y(
    moduli: &ElasticModuliPair,
    y_kappa: Complex64,
    y_mu: Complex64,
) -> Result<(Complex64, Complex64)> {
    let p = moduli.volume_fraction;
    Ok((
        inverse_y_transform(moduli.kappa1, moduli.kappa0, p, y_kappa)?,
        inverse_y_transform(moduli.mu1, moduli.mu0, p, y_mu)?,
    ))
}

fn dilute_y(m1: Complex64, m0: f64, alpha: Complex64) -> Result<Complex64> {
    let diff = m1 - m0;
    if diff == ZERO {
        return Err(Error::Degenerate("inclusion and matrix moduli coincide".into()));
    }
    let den = m1 - m0 * (ONE + alpha);
    if singular(den, m1.norm() + m0.abs()) {
        return Err(Error::Singular("polarizability makes the denominator vanish".into()));
    }
    Ok(-m1 + diff * diff / den)
}

/// Dilute-limit Y-transforms from average bulk and shear polarizabilities per unit volume.
pub fn polarizability_to_y(
    alpha_kappa: Complex64,
    alpha_mu: Complex64,
    moduli: &ElasticModuliPair,
) -> Result<(Complex64, Complex64)> {
    Ok((
        dilute_y(moduli.kappa1, moduli.kappa0, alpha_kappa)?,
        dilute_y(moduli.mu1, moduli.mu0, alpha_mu)?,
    ))
}

/// Arc samples as CSV with columns `param,re,im,curve_id`.
pub fn arcs_to_csv(curves: &[(&str, &MobiusArc)], samples: usize) -> String {
    let mut out = String::from("param,re,im,curve_id\n");
    for (id, arc) in curves {
        for (t, z) in arc.sample(samples) {
            out.push_str(&format!("{t},{},{},{id}\n", z.re, z.im));
        }
    }
    out
}
