use wavebound::mobius_bounds::{bm_region, milton2d_region, region_contains, Contrast};
use wavebound::quasistatic_grid::*;
use wavebound::shape_polarizability::{ball_polarizability, ellipsoid_polarizability};
use wavebound::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn opts() -> GridOptions {
    GridOptions::default()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn no_contrast_gives_zero() {
    let inc = ProceduralShape::Disk { fill: 0.05 }.rasterize(32).unwrap();
    let col = solve_dipole(&inc, c(1.0, 0.0), &[1.0, 0.0], &opts()).unwrap();
    assert!(col.column.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn disk_matches_closed_form_after_extrapolation() {
    let eps1 = c(2.0, 0.0);
    let exact = ball_polarizability(eps1 - 1.0, 2).unwrap();
    let mut samples = Vec::new();
    for fill in [1.0 / 16.0, 1.0 / 64.0] {
        let inc = ProceduralShape::Disk { fill }.rasterize(512).unwrap();
        samples.push((inc.fill_fraction(), solve_tensor(&inc, eps1, &opts()).unwrap()));
    }
    let ext = extrapolate_dilute(&samples).unwrap();
    let err = rel(ext.trace_average(), exact);
    assert!(err < 0.02, "extrapolated {} vs {exact}", ext.trace_average());
    for (_, raw) in &samples {
        assert!(err < rel(raw.trace_average(), exact));
    }
    assert!((ext.trace_average() - c(2.0 / 3.0, 0.0)).norm() < 0.02 * 2.0 / 3.0);
}

#[test]
fn lossy_disk_on_lens_corner() {
    let eps1 = c(1.0, 1.0);
    let chi = eps1 - 1.0;
    let ext = dilute_estimate(&ProceduralShape::Disk { fill: 1.0 / 16.0 }, 512, &[1.0 / 16.0, 1.0 / 64.0], eps1, &opts())
        .unwrap();
    let exact = c(0.4, 0.8);
    assert!((ball_polarizability(chi, 2).unwrap() - exact).norm() < 1e-15);
    assert!(rel(ext.trace_average(), exact) < 0.02);
    let region = bm_region(&Contrast::new(chi, 2).unwrap()).unwrap();
    assert!(region_contains(&region, ext.trace_average(), 1e-3));
}

#[test]
fn ellipse_matches_depolarization_formula() {
    // Semi-axes 4:1 along x gives factors (0.2, 0.8).
    let eps1 = c(1.0, 1.0);
    let chi = eps1 - 1.0;
    let shape = ProceduralShape::Ellipse { fill: 1.0 / 32.0, aspect: 4.0 };
    let ext = dilute_estimate(&shape, 512, &[1.0 / 32.0, 1.0 / 128.0], eps1, &opts()).unwrap();
    let exact = ellipsoid_polarizability(chi, &[0.2, 0.8]).unwrap();
    assert!((exact[0] - c(0.0, 1.0) / c(1.0, 0.2)).norm() < 1e-15);
    for i in 0..2 {
        let got = ext.alpha_over_volume[i][i];
        assert!(rel(got, exact[i]) < 0.02, "axis {i}: {got} vs {}", exact[i]);
    }
    assert!(ext.max_off_diagonal() < 10.0 * ext.residual + 1e-12);
}

#[test]
fn tilted_shape_is_complex_symmetric_and_passive() {
    let inc = PixelInclusion::from_fn(64, 2, |x| {
        let u = 0.8 * x[0] + 0.6 * x[1];
        let v = -0.6 * x[0] + 0.8 * x[1];
        (u / 12.0).powi(2) + (v / 5.0).powi(2) <= 1.0 || (x[0] > 3.0 && x[0] < 9.0 && x[1] > -12.0 && x[1] < 0.0)
    })
    .unwrap();
    for eps1 in [c(3.0, 2.0), c(0.2, 0.5), c(-4.0, 1.0)] {
        let est = solve_tensor(&inc, eps1, &opts()).unwrap();
        assert!(est.max_off_diagonal() > 1e-3, "shape should couple the axes");
        assert!(est.asymmetry() < 10.0 * est.residual, "{} vs {}", est.asymmetry(), est.residual);
        assert!(est.trace_average().im >= -10.0 * est.residual);
    }
}

#[test]
fn square_extrapolation_is_small_and_inside_bounds() {
    for eps1 in [c(0.0, 3.0), c(5.0, 0.0)] {
        let chi = eps1 - 1.0;
        let ext = dilute_estimate(&ProceduralShape::Square { fill: 1.0 / 16.0 }, 256, &[1.0 / 16.0, 1.0 / 64.0], eps1, &opts())
            .unwrap();
        let info = ext.extrapolation_info.clone().unwrap();
        assert!(info.relative_increment < 0.05, "{info:?}");
        let value = ext.trace_average();
        if chi.im > 0.0 {
            let region = milton2d_region(&Contrast::new(chi, 2).unwrap()).unwrap();
            assert!(region_contains(&region, value, 1e-3), "{value}");
        } else {
            let (lo, hi) = wavebound::mobius_bounds::hs_interval(&Contrast::new(chi, 2).unwrap()).unwrap();
            assert!(value.re >= lo * (1.0 - 1e-3) && value.re <= hi * (1.0 + 1e-3), "{value} not in [{lo}, {hi}]");
        }
    }
}

#[test]
fn ball_in_three_dimensions() {
    let eps1 = c(3.0, 1.0);
    let exact = ball_polarizability(eps1 - 1.0, 3).unwrap();
    let ext = dilute_estimate(&ProceduralShape::Ball { fill: 1.0 / 16.0 }, 64, &[1.0 / 16.0, 1.0 / 64.0], eps1, &opts())
        .unwrap();
    // Coarse voxels: about ten across the smaller ball.
    assert!(rel(ext.trace_average(), exact) < 0.05, "{} vs {exact}", ext.trace_average());
    assert!(ext.max_off_diagonal() < 1e-6);
}

#[test]
fn extrapolation_edge_cases() {
    let est = |v: Complex64| PolarizabilityEstimate {
        alpha_over_volume: vec![vec![v, c(0.0, 0.0)], vec![c(0.0, 0.0), v]],
        residual: 1e-9,
        extrapolation_info: None,
    };
    let same = extrapolate_dilute(&[(0.1, est(c(1.0, 2.0))), (0.05, est(c(1.0, 2.0)))]).unwrap();
    assert!((same.trace_average() - c(1.0, 2.0)).norm() < 1e-14);
    assert_eq!(same.extrapolation_info.as_ref().unwrap().increment, 0.0);

    let line = extrapolate_dilute(&[
        (0.4, est(c(1.4, 0.0))),
        (0.2, est(c(1.2, 0.0))),
        (0.1, est(c(1.1, 0.0))),
    ])
    .unwrap();
    assert!((line.trace_average() - c(1.0, 0.0)).norm() < 1e-14);

    assert!(extrapolate_dilute(&[(0.1, est(c(1.0, 0.0)))]).is_err());
    assert!(extrapolate_dilute(&[(0.05, est(c(1.0, 0.0))), (0.1, est(c(1.0, 0.0)))]).is_err());
    assert!(extrapolate_dilute(&[(0.1, est(c(1.0, 0.0))), (0.07, est(c(1.0, 0.0)))]).is_err());
}

#[test]
fn non_convergence_reports_history() {
    let inc = ProceduralShape::Disk { fill: 0.05 }.rasterize(64).unwrap();
    let tight = GridOptions { tol: 1e-14, max_iter: 3, max_restarts: 1 };
    match solve_dipole(&inc, c(0.0, 10.0), &[1.0, 0.0], &tight) {
        Err(Error::NoConvergence { history, iterations, .. }) => {
            assert!(iterations <= 3);
            assert!(!history.is_empty());
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn input_validation() {
    assert!(ProceduralShape::Disk { fill: 0.5 }.rasterize(64).is_err(), "guard margin");
    assert!(ProceduralShape::Disk { fill: 0.05 }.rasterize(48).is_err(), "not a power of two");
    let inc = ProceduralShape::Disk { fill: 0.05 }.rasterize(32).unwrap();
    assert!(solve_dipole(&inc, c(-2.0, 0.0), &[1.0, 0.0], &opts()).unwrap_err().is_validation());
    assert!(solve_dipole(&inc, c(2.0, 0.0), &[1.0, 1.0], &opts()).unwrap_err().is_validation());
    assert!(PixelInclusion::from_fn(16, 2, |_| false).is_err());
}

#[test]
fn mask_file_readers() {
    let n = 8;
    let inside = |i: usize, j: usize| (3..5).contains(&i) && (2..6).contains(&j);
    let mut p1 = format!("P1\n# test\n{n} {n}\n");
    for i in 0..n {
        for j in 0..n {
            p1.push(if inside(i, j) { '1' } else { '0' });
            p1.push(' ');
        }
        p1.push('\n');
    }
    let a = PixelInclusion::from_pbm(p1.as_bytes()).unwrap();

    let mut p4 = format!("P4\n{n} {n}\n").into_bytes();
    for i in 0..n {
        let mut byte = 0u8;
        for j in 0..n {
            if inside(i, j) {
                byte |= 0x80 >> j;
            }
        }
        p4.push(byte);
    }
    let b = PixelInclusion::from_pbm(&p4).unwrap();

    let header = format!("{{'descr': '|u1', 'fortran_order': False, 'shape': ({n}, {n}), }}");
    let mut npy = b"\x93NUMPY\x01\x00".to_vec();
    let pad = 64 - (10 + header.len() + 1) % 64;
    let full = format!("{header}{}\n", " ".repeat(pad));
    npy.extend_from_slice(&(full.len() as u16).to_le_bytes());
    npy.extend_from_slice(full.as_bytes());
    for i in 0..n {
        for j in 0..n {
            npy.push(inside(i, j) as u8);
        }
    }
    let d = PixelInclusion::from_npy(&npy).unwrap();

    assert_eq!(a.mask(), b.mask());
    assert_eq!(a.mask(), d.mask());
    assert_eq!(a.pixel_count(), 8);
    assert!((a.fill_fraction() - 8.0 / 64.0).abs() < 1e-15);
    assert!(PixelInclusion::from_pbm(b"P1\n4 2\n0 0 0 0 0 0 0 0").is_err());
}

#[test]
fn solves_are_deterministic() {
    let inc = ProceduralShape::Square { fill: 0.05 }.rasterize(64).unwrap();
    let a = solve_dipole(&inc, c(2.0, 3.0), &[0.6, 0.8], &opts()).unwrap();
    let b = solve_dipole(&inc, c(2.0, 3.0), &[0.6, 0.8], &opts()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn estimate_json_shape() {
    let inc = ProceduralShape::Disk { fill: 0.05 }.rasterize(32).unwrap();
    let est = solve_tensor(&inc, c(2.0, 1.0), &opts()).unwrap();
    let v = serde_json::to_value(&est).unwrap();
    assert_eq!(v["alpha_re"].as_array().unwrap().len(), 2);
    assert!((v["alpha_im"][0][0].as_f64().unwrap() - est.alpha_over_volume[0][0].im).abs() < 1e-15);
    assert!(v["residual"].as_f64().unwrap() < 1e-8);
}
