use num_complex::Complex64;
use proptest::prelude::*;
use wavebound::mobius_bounds::*;
use wavebound::shape_polarizability::*;
use wavebound::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

/// Circumcircle through three points, written out independently of the library.
fn circumcircle(z1: Complex64, z2: Complex64, z3: Complex64) -> (Complex64, f64) {
    let (ax, ay) = (z1.re, z1.im);
    let (bx, by) = (z2.re, z2.im);
    let (cx, cy) = (z3.re, z3.im);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = c(ux, uy);
    (center, (z1 - center).norm())
}

#[test]
fn hs_interval_examples() {
    let (lo, hi) = hs_interval(&Contrast::new(c(0.0, 0.0), 3).unwrap()).unwrap();
    assert_eq!((lo, hi), (0.0, 0.0));

    let (lo, hi) = hs_interval(&Contrast::new(c(1.0, 0.0), 3).unwrap()).unwrap();
    assert!((lo - 0.75).abs() < 1e-15 && (hi - 5.0 / 6.0).abs() < 1e-15);
    assert!((lo - 3.0 * 1.0 / (1.0 + 3.0)).abs() < 1e-15);

    let (lo, hi) = hs_interval(&Contrast::new(c(1.0, 0.0), 2).unwrap()).unwrap();
    assert!((lo - 2.0 / 3.0).abs() < 1e-15 && (hi - 0.75).abs() < 1e-15);
}

#[test]
fn hs_interval_negative_contrast_is_sorted() {
    let (lo, hi) = hs_interval(&Contrast::new(c(-0.5, 0.0), 3).unwrap()).unwrap();
    assert!(lo <= hi);
    // Ball value 3(-0.5)/(2.5) = -0.6 is the upper end here.
    assert!((hi - (-0.6)).abs() < 1e-15);
}

#[test]
fn bm_region_examples() {
    let region = bm_region(&Contrast::new(c(0.0, 1.0), 3).unwrap()).unwrap();
    assert!(close(region.arc1.eval(0.0), c(0.3, 0.9), 1e-14));
    let i = c(0.0, 1.0);
    assert!(close(region.arc1.eval(0.0), i + 1.0 / (3.0 + i), 1e-14));
    assert!(close(region.arc1.eval(0.0), region.arc2.eval(0.0), 1e-12));
    assert!(close(region.arc1.eval(1.0), region.arc2.eval(1.0), 1e-12));

    assert!(region_contains(&region, region.arc1.eval(0.5), 1e-9));
    assert!(!region_contains(&region, c(10.0, 10.0), 1e-9));
    assert!(region_contains(&region, 3.0 * i / (3.0 + i), 1e-9));
    assert!(region_contains(&region, region.interior_witness, 0.0));
}

#[test]
fn bm_arc_midpoint_inside_circle_through_other_arc() {
    let region = bm_region(&Contrast::new(c(0.5, 0.5), 2).unwrap()).unwrap();
    let (center, radius) = circumcircle(region.arc2.eval(0.0), region.arc2.eval(0.5), region.arc2.eval(1.0));
    assert!((region.arc1.eval(0.5) - center).norm() < radius);
}

#[test]
fn bm_arcs_match_paper_form() {
    // Direct nested evaluation of the dilute arcs.
    for (chi, d) in [(c(0.0, 1.0), 3.0), (c(-0.4, 2.0), 2.0), (c(3.0, 0.3), 3.0)] {
        let region = bm_region(&Contrast::new(chi, d as usize).unwrap()).unwrap();
        for t in [0.0, 0.2, 0.5, 0.77, 1.0] {
            let a1 = chi - chi * chi / (1.0 + chi + (d - 1.0) / (t / (1.0 + chi) + (1.0 - t)));
            let a2 = chi - chi * chi / (1.0 + chi + (d - 1.0) * (t * chi + 1.0));
            assert!(close(region.arc1.eval(t), a1, 1e-13));
            assert!(close(region.arc2.eval(t), a2, 1e-13));
        }
    }
}

#[test]
fn milton_examples() {
    let (m1, m2) = milton2d_curves(&Contrast::new(c(1.0, 0.0), 2).unwrap()).unwrap();
    assert!(close(m1.eval(0.0), c(2.0 / 3.0, 0.0), 1e-15));
    assert!(close(m1.eval(1.0), c(0.75, 0.0), 1e-15));
    assert!((m2.eval(0.0) - m1.eval(1.0)).norm() < 1e-15);

    let i = c(0.0, 1.0);
    let (m1, m2) = milton2d_curves(&Contrast::new(i, 2).unwrap()).unwrap();
    let start = i * (2.0 + i) / (2.0 * (1.0 + i));
    assert!(close(m2.eval(0.0), start, 1e-15));
    let expected = start - i * i * i / ((i + 1.0) * (i + 2.0));
    assert!(close(m2.eval(1.0), expected, 1e-14));
    assert!(close(m1.eval(1.0), m2.eval(0.0), 1e-14));
    // The straight curve reaches the disk value half way.
    assert!(close(m2.eval(0.5), 2.0 * i / (2.0 + i), 1e-14));
    assert!(close(m2.end(), m1.start(), 1e-14));
}

#[test]
fn milton_second_curve_leaves_lens_past_closure() {
    for chi in [c(0.0, 1.0), c(0.5, 0.5), c(-1.0, 2.0), c(3.0, 0.3)] {
        let contrast = Contrast::new(chi, 2).unwrap();
        let lens = bm_region(&contrast).unwrap();
        let (_, m2) = milton2d_curves(&contrast).unwrap();
        assert!(!region_contains(&lens, m2.eval(0.9), 1e-9), "chi = {chi}");
    }
}

#[test]
fn milton_region_tighter_than_lens() {
    let contrast = Contrast::new(c(0.0, 1.0), 2).unwrap();
    let lens = bm_region(&contrast).unwrap();
    let milton = milton2d_region(&contrast).unwrap();
    assert!(region_contains(&lens, milton.interior_witness, 0.0));
    // A point inside the lens but beyond the straight chord.
    let bm_mid = lens.arc2.eval(0.5);
    let z = 0.9 * bm_mid + 0.1 * lens.interior_witness;
    assert!(region_contains(&lens, z, 0.0));
    assert!(!region_contains(&milton, z, 1e-9));
}

#[test]
fn composite_degenerate_cases() {
    let b = bm_composite_region(c(1.0, 0.0), 0.3, 3).unwrap();
    assert_eq!(b.bm, AdmissibleSet::Point { value: c(1.0, 0.0) });
    let b = bm_composite_region(c(2.0, 0.0), 1.0, 3).unwrap();
    assert_eq!(b.bm, AdmissibleSet::Point { value: c(2.0, 0.0) });
    assert!(b.milton.is_none());
    let b = bm_composite_region(c(2.0, 0.0), 1.0, 2).unwrap();
    assert!(b.milton.is_some());
    assert!(matches!(bm_composite_region(c(2.0, 1.0), 1.5, 3), Err(Error::Domain(_))));
}

#[test]
fn composite_arcs_collapse_without_contrast() {
    let (a1, a2) = bm_composite_arcs(c(1.0, 0.0), 0.3, 3);
    for t in [0.0, 0.5, 1.0] {
        assert!(close(a1.eval(t), c(1.0, 0.0), 1e-15));
        assert!(close(a2.eval(t), c(1.0, 0.0), 1e-15));
    }
    let (a1, a2) = bm_composite_arcs(c(2.0, 0.0), 1.0, 3);
    for t in [0.0, 0.5, 1.0] {
        assert!(close(a1.eval(t), c(2.0, 0.0), 1e-15));
        assert!(close(a2.eval(t), c(2.0, 0.0), 1e-15));
    }
}

#[test]
fn composite_real_endpoints_match_hs() {
    // For real phases the arcs run between the two classical bounds.
    for (eps, p, d) in [(3.0, 0.2, 3usize), (0.2, 0.6, 2), (10.0, 0.5, 2)] {
        let (a1, a2) = bm_composite_arcs(c(eps, 0.0), p, d);
        let df = d as f64;
        let lower = 1.0 + df * p * (eps - 1.0) / (df + (1.0 - p) * (eps - 1.0));
        let upper = eps + df * (1.0 - p) * eps * (1.0 - eps) / (df * eps + p * (1.0 - eps));
        assert!(close(a1.eval(0.0), c(lower, 0.0), 1e-13));
        assert!(close(a2.eval(0.0), c(lower, 0.0), 1e-13));
        assert!(close(a1.eval(1.0), c(upper, 0.0), 1e-13));
        assert!(close(a2.eval(1.0), c(upper, 0.0), 1e-13));
        let b = bm_composite_region(c(eps, 0.0), p, d).unwrap();
        let (lo, hi) = (lower.min(upper), lower.max(upper));
        assert_eq!(b.bm, AdmissibleSet::Interval { lo, hi });
    }
}

#[test]
fn composite_dilute_limit() {
    let eps1 = c(1.0, 1.0);
    let dilute = bm_region(&Contrast::from_eps1(eps1, 3).unwrap()).unwrap();
    let mut gaps = Vec::new();
    for p in [1e-3, 1e-4] {
        let (a1, a2) = bm_composite_arcs(eps1, p, 3);
        let mut worst: f64 = 0.0;
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            worst = worst.max(((a1.eval(t) - 1.0) / p - dilute.arc1.eval(t)).norm());
            worst = worst.max(((a2.eval(t) - 1.0) / p - dilute.arc2.eval(t)).norm());
        }
        assert!(worst < 10.0 * p, "gap {worst} at p = {p}");
        gaps.push(worst);
    }
    // Linear in p.
    let ratio = gaps[0] / gaps[1];
    assert!(ratio > 8.0 && ratio < 12.0, "ratio {ratio}");
}

#[test]
fn composite_milton_dilute_limit_and_closure() {
    let eps1 = c(1.0, 1.0);
    let contrast = Contrast::from_eps1(eps1, 2).unwrap();
    let (d1, d2) = milton2d_curves(&contrast).unwrap();
    let p = 1e-4;
    let (m1, m2) = milton_composite_arcs(eps1, p);
    for t in [0.0, 0.5, 1.0] {
        assert!(((m1.eval(t) - 1.0) / p - d1.eval(t)).norm() < 10.0 * p);
    }
    // The finite-fraction straight curve covers [0, 1] at twice the speed.
    for t in [0.0, 0.5, 1.0] {
        assert!(((m2.eval(t) - 1.0) / p - d2.eval(0.5 * t)).norm() < 10.0 * p);
    }
    let b = bm_composite_region(eps1, 0.3, 2).unwrap();
    let Some(AdmissibleSet::Region { region }) = b.milton else { panic!("expected region") };
    assert!(close(region.arc1.start(), region.arc2.end(), 1e-10));
    assert!(close(region.arc1.end(), region.arc2.start(), 1e-12));
}

#[test]
fn composite_contains_known_microstructures() {
    // Coated-ball assemblage values are the real-phase bounds; for a complex
    // phase they sit on the lens boundary.
    let eps1 = c(2.0, 3.0);
    for d in [2usize, 3] {
        let b = bm_composite_region(eps1, 0.4, d).unwrap();
        let df = d as f64;
        let p = 0.4;
        let chi = eps1 - 1.0;
        let lower = 1.0 + df * p * chi / (df + (1.0 - p) * chi);
        assert!(b.bm.contains(lower, 1e-9));
        if let Some(m) = &b.milton {
            assert!(m.contains(lower, 1e-9));
        }
    }
}

#[test]
fn elastic_transform_examples() {
    let m = ElasticModuliPair::new(c(2.0, 0.2), c(1.5, -0.1), 1.0, 1.0, 0.25, wavebound::SignCheck::Skip).unwrap();
    // Hand evaluation with exact decimals: denominator is exactly 0.05.
    let y = y_transform(m.kappa1, m.kappa0, 0.25, c(1.2, 0.05)).unwrap();
    assert!(close(y, c(1.85, 1.35), 1e-13), "{y}");

    let same = y_transform(c(1.0, 0.0), 1.0, 0.3, c(1.0, 0.0));
    assert!(matches!(same, Err(Error::Degenerate(_))));

    let pole = y_transform(c(2.0, 0.0), 1.0, 0.5, c(1.5, 0.0));
    assert!(matches!(pole, Err(Error::Singular(_))));

    let (yk, _) = polarizability_to_y(c(0.4, -0.1), c(0.0, 0.0), &m).unwrap();
    assert!(close(yk, c(-0.4533333333333333, -0.30666666666666664), 1e-13), "{yk}");

    let (yk, ym) = polarizability_to_y(c(0.0, 0.0), c(0.0, 0.0), &m).unwrap();
    assert!(close(yk, c(-1.0, 0.0), 1e-14));
    assert!(close(ym, c(-1.0, 0.0), 1e-14));
}

#[test]
fn elastic_dilute_consistency() {
    let m0 = ElasticModuliPair::new(c(2.0, 0.2), c(0.7, -0.3), 1.0, 0.5, 0.0, wavebound::SignCheck::Skip).unwrap();
    let (ak, am) = (c(0.4, -0.1), c(-0.2, 0.05));
    let (yk0, ym0) = polarizability_to_y(ak, am, &m0).unwrap();
    let mut gaps = Vec::new();
    for p in [1e-3, 1e-4] {
        let m = ElasticModuliPair { volume_fraction: p, ..m0 };
        let kstar = (1.0 + p * ak) * m.kappa0;
        let mstar = (1.0 + p * am) * m.mu0;
        let (yk, ym) = elastic_y_transform(&m, kstar, mstar).unwrap();
        let gap = (yk - yk0).norm().max((ym - ym0).norm());
        assert!(gap < 100.0 * p, "gap {gap}");
        gaps.push(gap);
    }
    assert!(gaps[0] / gaps[1] > 5.0);
}

#[test]
fn passive_check_on_moduli() {
    let r = ElasticModuliPair::new(c(2.0, 0.2), c(1.0, 0.0), 1.0, 1.0, 0.5, wavebound::SignCheck::Enforce);
    assert!(r.is_err());
    let r = ElasticModuliPair::new(c(2.0, -0.2), c(1.0, 0.0), 1.0, 1.0, 0.5, wavebound::SignCheck::Enforce);
    assert!(r.is_ok());
}

#[test]
fn ball_and_shell_examples() {
    assert_eq!(ball_polarizability(c(0.0, 0.0), 3).unwrap(), c(0.0, 0.0));
    let (lo, _) = hs_interval(&Contrast::new(c(1.0, 0.0), 3).unwrap()).unwrap();
    assert!((ball_polarizability(c(1.0, 0.0), 3).unwrap().re - lo).abs() < 1e-15);
    assert!(close(ball_polarizability(c(0.0, 1.0), 2).unwrap(), c(0.4, 0.8), 1e-15));

    assert_eq!(thin_shell_polarizability(c(0.0, 0.0), 2).unwrap(), c(0.0, 0.0));
    assert_eq!(thin_shell_polarizability(c(0.0, 0.0), 3).unwrap(), c(0.0, 0.0));
    assert!(close(thin_shell_polarizability(c(1.0, 0.0), 2).unwrap(), c(0.75, 0.0), 1e-15));
}

#[test]
fn ellipsoid_examples() {
    let chi = c(0.3, 0.7);
    for d in [2usize, 3] {
        let f = vec![1.0 / d as f64; d];
        let diag = ellipsoid_polarizability(chi, &f).unwrap();
        let avg = diag.iter().sum::<Complex64>() / d as f64;
        assert!(close(avg, ball_polarizability(chi, d).unwrap(), 1e-14));
    }
    let diag = ellipsoid_polarizability(c(1.0, 0.0), &[0.0, 1.0]).unwrap();
    assert!(close(diag[0], c(1.0, 0.0), 1e-15) && close(diag[1], c(0.5, 0.0), 1e-15));
    let (_, hi) = hs_interval(&Contrast::new(c(1.0, 0.0), 2).unwrap()).unwrap();
    assert!((0.5 * (diag[0] + diag[1]).re - hi).abs() < 1e-15);

    let i = c(0.0, 1.0);
    let diag = ellipsoid_polarizability(i, &[0.2, 0.8]).unwrap();
    assert!(close(diag[0], i / (1.0 + 0.2 * i), 1e-15));
    assert!(close(diag[1], i / (1.0 + 0.8 * i), 1e-15));

    // Needle-plate factors reproduce the thin-shell corner in both dimensions.
    for (d, f) in [(2usize, vec![0.0, 1.0]), (3, vec![0.0, 0.0, 1.0])] {
        let diag = ellipsoid_polarizability(chi, &f).unwrap();
        let avg = diag.iter().sum::<Complex64>() / d as f64;
        assert!(close(avg, thin_shell_polarizability(chi, d).unwrap(), 1e-14));
    }
}

/// Coated ball by solving the potential transmission problem directly.
///
/// Potentials (dipole order): core `A r`, shell `B r + C r^(1-d)`, outside
/// `r + D r^(1-d)` with unit outer radius. Unknowns A, B, C, D.
fn coated_oracle(chi: Complex64, d: usize, core_fraction: f64) -> Complex64 {
    use nalgebra::{DMatrix, DVector};
    let eps_c = c(1.0, 0.0);
    let eps_s = 1.0 + chi;
    let eps_m = c(1.0, 0.0);
    let df = d as f64;
    let rc = core_fraction.powf(1.0 / df);
    let k = 1.0 - df; // exponent of the decaying term
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        // potential continuity at rc: A rc = B rc + C rc^k
        rc * one, -rc * one, -rc.powf(k) * one, z,
        // flux at rc: eps_c A = eps_s (B + k C rc^(k-1))
        eps_c, -eps_s, -eps_s * k * rc.powf(k - 1.0), z,
        // potential at 1: B + C = 1 + D
        z, one, one, -one,
        // flux at 1: eps_s (B + k C) = eps_m (1 + k D)
        z, eps_s, eps_s * k, -eps_m * k,
    ]);
    let rhs = DVector::from_vec(vec![z, z, one, eps_m]);
    let sol = m.lu().solve(&rhs).unwrap();
    let dcoef = sol[3];
    // A solid ball gives D = -chi/(chi + d), so the per-volume polarizability
    // of the outer ball is -d D; rescale to the shell volume.
    -df * dcoef / (1.0 - core_fraction)
}

#[test]
fn coated_matches_transmission_solve() {
    for d in [2usize, 3] {
        for chi in [c(0.0, 1.0), c(2.0, 0.5), c(-0.5, 0.1)] {
            for f in [0.3, 0.8, 0.95] {
                let closed = coated_polarizability(chi, d, f).unwrap();
                let oracle = coated_oracle(chi, d, f);
                assert!(close(closed, oracle, 1e-11), "d={d} chi={chi} f={f}: {closed} vs {oracle}");
            }
        }
        // f = 0 is the solid ball.
        let chi = c(0.7, 0.3);
        assert!(close(coated_polarizability(chi, d, 0.0).unwrap(), ball_polarizability(chi, d).unwrap(), 1e-14));
    }
}

#[test]
fn coated_converges_to_thin_shell() {
    let chi = c(0.0, 1.0);
    let limit = thin_shell_polarizability(chi, 2).unwrap();
    let near = coated_oracle(chi, 2, 0.999);
    assert!((near - limit).norm() / limit.norm() < 1e-2);
    let mut prev = f64::INFINITY;
    for f in [0.9, 0.99, 0.999, 0.9999] {
        let gap = (coated_polarizability(chi, 3, f).unwrap() - thin_shell_polarizability(chi, 3).unwrap()).norm();
        assert!(gap < prev);
        prev = gap;
    }
}

#[test]
fn ellipse_trace_moves_monotonically_between_corners() {
    let chi = c(0.5, 1.5);
    let ball = ball_polarizability(chi, 2).unwrap();
    let mut prev = -1.0;
    for k in 0..=20 {
        let l = 0.5 - 0.5 * k as f64 / 20.0;
        let diag = ellipsoid_polarizability(chi, &[l, 1.0 - l]).unwrap();
        let avg = 0.5 * (diag[0] + diag[1]);
        let dist = (avg - ball).norm();
        assert!(dist >= prev);
        prev = dist;
    }
    let shell = thin_shell_polarizability(chi, 2).unwrap();
    let diag = ellipsoid_polarizability(chi, &[0.0, 1.0]).unwrap();
    assert!(close(0.5 * (diag[0] + diag[1]), shell, 1e-14));
}

fn lossy_chi() -> impl Strategy<Value = Complex64> {
    (-0.95f64..20.0, 1e-3f64..20.0).prop_map(|(re, im)| c(re, im))
}

fn cross_ratio(z: [Complex64; 4]) -> Complex64 {
    (z[0] - z[2]) * (z[1] - z[3]) / ((z[0] - z[3]) * (z[1] - z[2]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lens_endpoints_are_corners(chi in lossy_chi(), d in 2usize..=3) {
        let contrast = Contrast::new(chi, d).unwrap();
        let region = bm_region(&contrast).unwrap();
        let ball = ball_polarizability(chi, d).unwrap();
        let shell = thin_shell_polarizability(chi, d).unwrap();
        prop_assert!(close(region.arc1.eval(0.0), region.arc2.eval(0.0), 1e-12));
        prop_assert!(close(region.arc1.eval(1.0), region.arc2.eval(1.0), 1e-12));
        prop_assert!(close(region.arc1.eval(0.0), ball, 1e-12));
        prop_assert!(close(region.arc1.eval(1.0), shell, 1e-12));
        prop_assert!(region_contains(&region, ball, 1e-9));
        prop_assert!(region_contains(&region, shell, 1e-9));
    }

    #[test]
    fn arcs_are_circular(chi in lossy_chi(), d in 2usize..=3) {
        let contrast = Contrast::new(chi, d).unwrap();
        let (a1, a2) = bm_arcs(&contrast);
        let (m1, m2) = milton2d_curves(&Contrast::new(chi, 2).unwrap()).unwrap();
        for arc in [a1, a2, m1, m2] {
            let z = [arc.eval(0.0), arc.eval(0.3), arc.eval(0.55), arc.eval(1.0)];
            let cr = cross_ratio(z);
            prop_assert!(cr.im.abs() < 1e-10 * (1.0 + cr.norm()), "cross ratio {cr}");
        }
    }

    #[test]
    fn milton_curves_inside_lens(chi in lossy_chi()) {
        let contrast = Contrast::new(chi, 2).unwrap();
        let lens = bm_region(&contrast).unwrap();
        let (m1, m2) = milton2d_curves(&contrast).unwrap();
        for arc in [m1, m2] {
            for (_, z) in arc.sample(101) {
                prop_assert!(region_contains(&lens, z, 1e-9), "{z} outside lens for chi {chi}");
            }
        }
    }

    #[test]
    fn shapes_inside_regions(chi in lossy_chi(), f in 0.0f64..0.999, l in 0.0f64..1.0, l2 in 0.0f64..1.0) {
        for d in [2usize, 3] {
            let contrast = Contrast::new(chi, d).unwrap();
            let lens = bm_region(&contrast).unwrap();
            let factors: Vec<f64> = if d == 2 {
                vec![l, 1.0 - l]
            } else {
                vec![l * (1.0 - l2), (1.0 - l) * (1.0 - l2), l2]
            };
            let ell = ellipsoid_polarizability(chi, &factors).unwrap();
            let ell = ell.iter().sum::<Complex64>() / d as f64;
            let values = [
                ball_polarizability(chi, d).unwrap(),
                thin_shell_polarizability(chi, d).unwrap(),
                coated_polarizability(chi, d, f).unwrap(),
                ell,
            ];
            for z in values {
                prop_assert!(region_contains(&lens, z, 1e-9), "{z} outside lens, d={d}, chi={chi}");
            }
            if d == 2 {
                let milton = milton2d_region(&contrast).unwrap();
                for z in values {
                    prop_assert!(region_contains(&milton, z, 1e-9), "{z} outside 2-D region, chi={chi}");
                }
            }
        }
    }

    #[test]
    fn y_transform_round_trip(
        k1re in 0.1f64..5.0, k1im in -2.0f64..0.0, k0 in 0.2f64..4.0,
        p in 0.01f64..0.99, sre in -3.0f64..3.0, sim in -3.0f64..3.0,
    ) {
        let k1 = c(k1re, k1im);
        prop_assume!((k1 - k0).norm() > 1e-3);
        let star = c(sre, sim);
        let y = y_transform(k1, k0, p, star);
        prop_assume!(y.is_ok());
        let y = y.unwrap();
        let back = inverse_y_transform(k1, k0, p, y).unwrap();
        prop_assert!(close(back, star, 1e-12), "{back} vs {star}");
        let again = y_transform(k1, k0, p, back).unwrap();
        prop_assert!(close(again, y, 1e-10));
    }
}

#[test]
fn hs_limit_of_thin_lens() {
    for d in [2usize, 3] {
        for re in [0.1, 1.0, 9.0] {
            let contrast = Contrast::new(c(re, 1e-6), d).unwrap();
            let (a1, a2) = bm_arcs(&contrast);
            let (lo, hi) = hs_interval(&Contrast::new(c(re, 0.0), d).unwrap()).unwrap();
            for arc in [a1, a2] {
                for (_, z) in arc.sample(51) {
                    assert!(z.im.abs() < 1e-5);
                    assert!(z.re > lo - 1e-5 && z.re < hi + 1e-5);
                }
            }
        }
    }
}
