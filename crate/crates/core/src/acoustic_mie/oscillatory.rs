//! Large-`r` behaviour of `int_{-1}^{1} r f(t) exp(i r g(t)) dt` for linear phase `g`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quadrature::adaptive_gauss_kronrod;
use crate::{Error, Result};

fn check_slope(slope: f64) -> Result<()> {
    if slope == 0.0 || !slope.is_finite() {
        return Err(Error::domain("phase slope must be nonzero and finite; stationary phase is unsupported"));
    }
    Ok(())
}

/// Leading endpoint contributions for `g(t) = slope t + intercept`:
/// `exp(i r g(1)) f(1)/(i g') - exp(i r g(-1)) f(-1)/(i g')`.
pub fn oscillatory_asymptotic<F: Fn(f64) -> Complex64>(f: F, slope: f64, intercept: f64, r: f64) -> Result<Complex64> {
    check_slope(slope)?;
    let ig = Complex64::new(0.0, slope);
    let end = |t: f64| Complex64::from_polar(1.0, r * (slope * t + intercept)) * f(t) / ig;
    Ok(end(1.0) - end(-1.0))
}

/// The same integral at finite `r` by adaptive quadrature, one panel per
/// half period of the phase.
pub fn oscillatory_quadrature<F: Fn(f64) -> Complex64>(
    f: F,
    slope: f64,
    intercept: f64,
    r: f64,
    abs_tol: f64,
) -> Result<Complex64> {
    check_slope(slope)?;
    let panels = (2.0 * r * slope.abs() / PI).ceil() as usize + 1;
    adaptive_gauss_kronrod(
        |t| f(t) * Complex64::from_polar(r, r * (slope * t + intercept)),
        -1.0,
        1.0,
        panels,
        abs_tol,
        64 * panels + 1024,
    )
}
