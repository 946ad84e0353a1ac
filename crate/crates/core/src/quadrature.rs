//! Gauss rules on [-1, 1] and adaptive Gauss-Kronrod for complex integrands.

use num_complex::Complex64;

use crate::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss rule mapped to `[a, b]` split into `panels` equal pieces.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + 0.5 * h * xi);
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate on `[a, b]` with a QUADPACK-style error
/// estimate built from the embedded 7-point Gauss value.
pub fn gauss_kronrod_15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [Complex64::default(); 15];
    values[7] = f(mid);
    for j in 0..7 {
        let dx = half * XGK[j];
        values[j] = f(mid - dx);
        values[14 - j] = f(mid + dx);
    }
    let weight = |i: usize| if i <= 7 { WGK[i] } else { WGK[14 - i] };
    let mut kronrod = Complex64::default();
    let mut resabs = 0.0;
    for (i, v) in values.iter().enumerate() {
        kronrod += v * weight(i);
        resabs += v.norm() * weight(i);
    }
    let mut gauss = values[7] * WG[3];
    for j in [1, 3, 5] {
        gauss += (values[j] + values[14 - j]) * WG[j / 2];
    }
    let mean = kronrod * 0.5;
    let resasc: f64 = values.iter().enumerate().map(|(i, v)| (v - mean).norm() * weight(i)).sum::<f64>() * half.abs();
    let resabs = resabs * half.abs();
    let raw = ((kronrod - gauss) * half).norm();
    let mut err = raw;
    if resasc != 0.0 && raw != 0.0 {
        err = resasc * (200.0 * raw / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (kronrod * half, err)
}

/// Adaptive Gauss-Kronrod integration of a complex function.
///
/// Starts from `initial_panels` equal pieces and bisects pieces until the
/// summed error estimate is below `abs_tol`.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    initial_panels: usize,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Complex64> {
    let n0 = initial_panels.max(1);
    let h = (b - a) / n0 as f64;
    let mut panels: Vec<(f64, f64, Complex64, f64)> = (0..n0)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == n0 { b } else { lo + h };
            let (v, e) = gauss_kronrod_15(&f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    loop {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= abs_tol {
            return Ok(panels.iter().map(|p| p.2).sum());
        }
        if panels.len() >= max_panels {
            return Err(Error::NoConvergence {
                context: "adaptive quadrature".into(),
                iterations: panels.len(),
                residual: total_err,
                history: vec![],
            });
        }
        // Split every panel whose error exceeds its share of the budget.
        let share = abs_tol / panels.len() as f64;
        let mut next = Vec::with_capacity(panels.len() * 2);
        for (lo, hi, v, e) in panels {
            if e > share {
                let mid = 0.5 * (lo + hi);
                let (v1, e1) = gauss_kronrod_15(&f, lo, mid);
                let (v2, e2) = gauss_kronrod_15(&f, mid, hi);
                next.push((lo, mid, v1, e1));
                next.push((mid, hi, v2, e2));
            } else {
                next.push((lo, hi, v, e));
            }
        }
        panels = next;
    }
}
