//! Spherical Bessel and Hankel functions and Legendre polynomials.

use num_complex::Complex64;

const RESCALE: f64 = 1e200;

/// `j_l(z)` for `l = 0..=l_max`, by Miller's downward recurrence normalised
/// against the closed form of `j_0` (or `j_1` near a zero of `j_0`).
pub fn spherical_jn(l_max: usize, z: Complex64) -> Vec<Complex64> {
    let top = l_max.max(1);
    let mut out = vec![Complex64::default(); top + 1];
    if z.norm() < 1e-300 {
        out[0] = Complex64::new(1.0, 0.0);
        out.truncate(l_max + 1);
        return out;
    }
    let start = top + z.norm().ceil() as usize + 40;
    let mut above = Complex64::default();
    let mut cur = Complex64::new(1e-30, 0.0);
    for l in (1..=start).rev() {
        if l <= top {
            out[l] = cur;
        }
        let below = cur * (2 * l + 1) as f64 / z - above;
        above = cur;
        cur = below;
        if cur.norm() > RESCALE {
            cur /= RESCALE;
            above /= RESCALE;
            for v in out[l.min(top + 1)..].iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    out[0] = cur;

    let (s, c) = (z.sin(), z.cos());
    let j0 = s / z;
    let j1 = s / (z * z) - c / z;
    let scale = if j0.norm() >= j1.norm() { div(j0, out[0]) } else { div(j1, out[1]) };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out.truncate(l_max + 1);
    out
}

/// `a / b` without overflow in the intermediate `|b|^2`.
pub(crate) fn div(a: Complex64, b: Complex64) -> Complex64 {
    let s = b.re.abs().max(b.im.abs());
    if s == 0.0 || !s.is_finite() {
        return a / b;
    }
    (a / s) / (b / s)
}

/// `y_l(x)` for real `x > 0` by upward recurrence.
pub fn spherical_yn(l_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(l_max + 1);
    let (s, c) = x.sin_cos();
    out.push(-c / x);
    if l_max >= 1 {
        out.push(-c / (x * x) - s / x);
    }
    for l in 1..l_max {
        let next = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        out.push(next);
    }
    out
}

/// `h_l(x) = j_l(x) + i y_l(x)` for real `x > 0`.
pub fn spherical_hn(l_max: usize, x: f64) -> Vec<Complex64> {
    let j = spherical_jn(l_max, Complex64::new(x, 0.0));
    let y = spherical_yn(l_max, x);
    j.iter().zip(&y).map(|(j, y)| Complex64::new(j.re, *y)).collect()
}

/// Derivatives `f_l'` for `l = 0..values.len()-1` from a table of any
/// spherical Bessel family with `values.len() >= 2`.
pub fn derivatives(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len() - 1;
    (0..n)
        .map(|l| {
            if l == 0 {
                -values[1]
            } else {
                (values[l - 1] * l as f64 - values[l + 1] * (l + 1) as f64) / (2 * l + 1) as f64
            }
        })
        .collect()
}

/// `P_l(mu)` and `P_l'(mu)` for `l = 0..=l_max`.
pub fn legendre(l_max: usize, mu: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; l_max + 1];
    let mut dp = vec![0.0; l_max + 1];
    p[0] = 1.0;
    if l_max >= 1 {
        p[1] = mu;
        dp[1] = 1.0;
    }
    for l in 1..l_max {
        p[l + 1] = ((2 * l + 1) as f64 * mu * p[l] - l as f64 * p[l - 1]) / (l + 1) as f64;
        dp[l + 1] = dp[l - 1] + (2 * l + 1) as f64 * p[l];
    }
    (p, dp)
}
