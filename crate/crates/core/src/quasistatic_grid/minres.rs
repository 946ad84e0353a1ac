//! MINRES for `(H + sigma I) x = b` with `H` Hermitian and `sigma` complex.
//! The Lanczos basis of `H` is shift invariant, so only the small
//! tridiagonal least-squares problem sees the complex shift.

use num_complex::Complex64;

pub(crate) struct MinresOutcome {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// Recursive residual norms, one per iteration.
    pub history: Vec<f64>,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Runs until the recursive residual drops below `tol_abs` or `max_iter` is hit.
pub(crate) fn shifted_minres(
    apply: &mut dyn FnMut(&[Complex64], &mut [Complex64]),
    b: &[Complex64],
    sigma: Complex64,
    tol_abs: f64,
    max_iter: usize,
) -> MinresOutcome {
    let len = b.len();
    let zero = Complex64::default();
    let mut x = vec![zero; len];
    let beta1 = norm(b);
    if beta1 == 0.0 {
        return MinresOutcome { x, iterations: 0, history: vec![0.0] };
    }

    let mut v_prev = vec![zero; len];
    let mut v: Vec<Complex64> = b.iter().map(|z| z / beta1).collect();
    let mut w = vec![zero; len];
    let mut d_prev2 = vec![zero; len];
    let mut d_prev = vec![zero; len];
    let mut d = vec![zero; len];

    let mut beta = 0.0;
    let (mut c1, mut s1) = (1.0, zero);
    let (mut c2, mut s2) = (1.0, zero);
    let mut t = Complex64::new(beta1, 0.0);
    let mut history = Vec::new();
    let mut iterations = 0;

    for k in 1..=max_iter {
        iterations = k;
        apply(&v, &mut w);
        if k > 1 {
            for (wi, vp) in w.iter_mut().zip(&v_prev) {
                *wi -= beta * vp;
            }
        }
        let alpha = dot(&v, &w).re;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= alpha * vi;
        }
        let beta_next = norm(&w);

        let mut eps = zero;
        let mut delta = Complex64::new(if k > 1 { beta } else { 0.0 }, 0.0);
        let mut gamma = Complex64::new(alpha, 0.0) + sigma;
        if k > 2 {
            eps = s2 * delta;
            delta *= c2;
        }
        if k > 1 {
            let new_delta = c1 * delta + s1 * gamma;
            gamma = -s1.conj() * delta + c1 * gamma;
            delta = new_delta;
        }
        let rho = (gamma.norm_sqr() + beta_next * beta_next).sqrt();
        let phase = if gamma.norm() > 0.0 { gamma / gamma.norm() } else { Complex64::new(1.0, 0.0) };
        let c = gamma.norm() / rho;
        let s = phase * (beta_next / rho);
        let r = phase * rho;

        let tau = c * t;
        t = -s.conj() * t;

        for i in 0..len {
            d[i] = (v[i] - eps * d_prev2[i] - delta * d_prev[i]) / r;
            x[i] += tau * d[i];
        }
        std::mem::swap(&mut d_prev2, &mut d_prev);
        std::mem::swap(&mut d_prev, &mut d);

        let resid = t.norm();
        history.push(resid);
        if resid <= tol_abs || beta_next == 0.0 {
            break;
        }

        (c2, s2) = (c1, s1);
        (c1, s1) = (c, s);
        std::mem::swap(&mut v_prev, &mut v);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / beta_next;
        }
        beta = beta_next;
    }
    MinresOutcome { x, iterations, history }
}
