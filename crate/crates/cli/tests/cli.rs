use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wavebound"));
    c.env_remove("WAVEBOUND_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

/// Rows of a CSV after the header, split into fields.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

const LOSSY: &str = r#"{"rho0": 1.0, "kappa0": 1.0, "rho1": [1.5, 0.2], "kappa1": [2.0, -0.3],
  "omega": 2.0, "radius": 0.5, "sweeps": {"ka": [0.5, 1.0, 2.0]}}"#;

#[test]
fn hs_interval_for_unit_susceptibility() {
    let o = run(&["hs-interval", "--chi1", "1", "--dim", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("0.75,0.8333333"), "{out}");
    let parts: Vec<f64> = out.trim().split(',').map(f).collect();
    // chi - chi^2/(chi + d) and chi - chi^2/(d (1 + chi)) at chi = 1, d = 3.
    assert_eq!(parts, vec![1.0 - 1.0 / 4.0, 1.0 - 1.0 / 6.0]);
}

#[test]
fn hs_interval_file_has_header() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let o = run(&["hs-interval", "--chi1", "2", "--dim", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(out.join("hs_interval.csv")).unwrap();
    let r = rows(&text);
    assert!(text.starts_with("lo,hi\n"));
    // chi = 2, d = 2: 2 - 4/6 and 2 - 4/4.
    assert!((f(&r[0][0]) - 1.0).abs() < 1e-15);
    assert!((f(&r[0][1]) - (2.0 - 4.0 / 6.0)).abs() < 1e-15);
}

#[test]
fn no_contrast_sphere_gives_zero_coefficients() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "m.json",
        r#"{"rho0": 1000, "kappa0": 2.25e9, "rho1": [1000, 0], "kappa1": [2.25e9, 0], "omega": 3000, "radius": 0.5}"#,
    );
    let out = dir.path().join("o");
    let o = run(&["mie-solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("coefficients.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("l,re,im"));
    let r = rows(&text);
    assert!(r.len() > 5);
    for row in &r {
        assert_eq!(&row[1..], &["0.0", "0.0"]);
    }
    for row in rows(&fs::read_to_string(out.join("far_field.csv")).unwrap()) {
        assert_eq!(&row[1..], &["0.0", "0.0"]);
    }
}

#[test]
fn malformed_json_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"rho0": 1.0, "#);
    let out = dir.path().join("o");
    let o = run(&["mie-solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_keys_and_missing_fields_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "u.json", r#"{"chi1": 1, "dim": 3, "colour": "red"}"#);
    assert_eq!(run(&["hs-interval", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let cfg = write(dir.path(), "s.json", r#"{"rho0": 1.0, "kappa0": 1.0}"#);
    assert_eq!(run(&["optical-check", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["hs-interval"]).status.code(), Some(2));
    assert_eq!(run(&["hs-interval", "--chi1", "1", "--eps1", "2"]).status.code(), Some(2));
    assert_eq!(run(&["hs-interval", "--chi1", "1", "--dim", "4"]).status.code(), Some(2));
    assert_eq!(run(&["not-a-command"]).status.code(), Some(2));
}

#[test]
fn invalid_media_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    // Gain in the inclusion density.
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"rho0": 1.0, "kappa0": 1.0, "rho1": [1.5, -0.2], "kappa1": [2.0, -0.3], "omega": 2.0, "radius": 0.5}"#,
    );
    assert_eq!(run(&["mie-solve", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn pole_exits_3() {
    let o = run(&["hs-interval", "--chi1", "-1", "--dim", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn outputs_are_deterministic_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "l.json", LOSSY);
    let mut seen: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for (i, threads) in ["1", "3", "3"].iter().enumerate() {
        let out = dir.path().join(format!("o{i}"));
        for cmd in ["optical-check", "backscatter-bound", "wrap-region", "mie-solve"] {
            let o = run(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
            assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        }
        let mut files: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
            .collect();
        files.sort();
        assert!(files.iter().all(|(n, _)| !n.starts_with('.')), "temporary files left behind");
        seen.push(files);
    }
    assert_eq!(seen[0].len(), 8);
    assert_eq!(seen[0], seen[1]);
    assert_eq!(seen[1], seen[2]);
}

#[test]
fn threads_flag_and_env_validation() {
    assert_eq!(run(&["hs-interval", "--chi1", "1", "--threads", "0"]).status.code(), Some(2));
    let o = bin().args(["hs-interval", "--chi1", "1"]).env("WAVEBOUND_THREADS", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = bin().args(["hs-interval", "--chi1", "1"]).env("WAVEBOUND_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn y_solve_matches_hand_solution() {
    // Ambient C^2, V = span(x), H = span(y), E = span(x + y), L = lambda on H.
    // Then e2 = e1 rotated into H, j1 = -lambda e1, so Y* = lambda.
    let dir = TempDir::new().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cfg = write(
        dir.path(),
        "y.json",
        &format!(r#"{{"basis_e": [[{s}], [{s}]], "basis_v": [[1], [0]], "operator_l": [[0, 0], [0, [2, 1]]], "e1": [[0, 1], 0]}}"#),
    );
    let out = dir.path().join("o");
    let o = run(&["y-solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let y = rows(&fs::read_to_string(out.join("y_star.csv")).unwrap());
    assert!((f(&y[0][2]) - 2.0).abs() < 1e-13 && (f(&y[0][3]) - 1.0).abs() < 1e-13);
    let fields = rows(&fs::read_to_string(out.join("fields.csv")).unwrap());
    // e1 = i x: j1 = -(2 + i) i x = (1 - 2i) x; e2 = i y.
    assert!((f(&fields[0][3]) - 1.0).abs() < 1e-13 && (f(&fields[0][4]) + 2.0).abs() < 1e-13);
    assert!(f(&fields[1][5]).abs() < 1e-13 && (f(&fields[1][6]) - 1.0).abs() < 1e-13);
}

#[test]
fn network_y_of_a_single_loop_is_the_admittance() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "n.json",
        r#"{"nodes": 2, "edges": [{"from": 0, "to": 1, "kind": "source"},
            {"from": 0, "to": 1, "kind": "impedance", "impedance": [2, 1]},
            {"from": 1, "to": 0, "kind": "impedance", "impedance": [0, -4]}]}"#,
    );
    let o = run(&["network-y", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o));
    // Two impedances in parallel across the source.
    let (za, zb) = (num_complex::Complex64::new(2.0, 1.0), num_complex::Complex64::new(0.0, -4.0));
    let y = 1.0 / za + 1.0 / zb;
    assert!((f(&r[0][2]) - y.re).abs() < 1e-13 && (f(&r[0][3]) - y.im).abs() < 1e-13, "{r:?}");
}

#[test]
fn shape_alpha_sphere_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "s.json", r#"{"shape": {"kind": "sphere_or_disk", "dim": 3}, "chi1": [2, 1]}"#);
    let o = run(&["shape-alpha", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let chi = num_complex::Complex64::new(2.0, 1.0);
    let want = 3.0 * chi / (chi + 3.0);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 4);
    for row in r {
        assert!((f(&row[1]) - want.re).abs() < 1e-14 && (f(&row[2]) - want.im).abs() < 1e-14);
    }
    // Flag overrides the config value.
    let o = run(&["shape-alpha", "--config", cfg.to_str().unwrap(), "--chi1", "1"]);
    assert!(stdout(&o).contains("trace,0.75,0.0"));
}

#[test]
fn bounds_region_convention_toggle_conjugates() {
    let dir = TempDir::new().unwrap();
    let a = run(&["bounds-region", "--chi1", "1,2", "--samples", "7"]);
    let cfg = write(dir.path(), "c.json", r#"{"convention": "exp_plus_i_omega_t"}"#);
    let b = run(&["bounds-region", "--config", cfg.to_str().unwrap(), "--chi1", "1,-2", "--samples", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let (ra, rb) = (rows(&stdout(&a)), rows(&stdout(&b)));
    assert_eq!(ra.len(), 14);
    for (x, y) in ra.iter().zip(&rb) {
        assert_eq!(x[1], y[1]);
        assert!((f(&x[2]) + f(&y[2])).abs() < 1e-15);
    }
    // Corner values: ball 3chi/(chi+3) at an arc endpoint.
    let chi = num_complex::Complex64::new(1.0, 2.0);
    let ball = 3.0 * chi / (chi + 3.0);
    let near = ra.iter().any(|r| (f(&r[1]) - ball.re).abs() < 1e-12 && (f(&r[2]) - ball.im).abs() < 1e-12);
    assert!(near);
}

#[test]
fn bounds_region_reports_membership() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let summary = |point: &str| -> serde_json::Value {
        let o = run(&["bounds-region", "--chi1", "1,1", "--point", point, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        serde_json::from_str(&stdout(&o)).unwrap()
    };
    let chi = num_complex::Complex64::new(1.0, 1.0);
    let ball = 3.0 * chi / (chi + 3.0);
    let shell = chi - chi * chi / (3.0 * (1.0 + chi));
    let mid = 0.5 * (ball + shell);
    for z in [ball, shell] {
        assert_eq!(summary(&format!("{},{}", z.re, z.im))["membership"]["inside"], true);
    }
    // The chord midpoint lies between the two arcs unless one of them is straight.
    assert_eq!(summary(&format!("{},{}", mid.re, mid.im))["membership"]["inside"], true);
    assert_eq!(summary("5,5")["membership"]["inside"], false);
    assert!(out.join("bounds_region.csv").exists());
}

#[test]
fn wrap_region_half_planes_contain_the_backscatter_value() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "w.json",
        r#"{"rho0": 1.0, "kappa0": 1.0, "rho1": [1.5, 0.2], "kappa1": [2.0, -0.3], "omega": 2.0, "radius": 0.5}"#,
    );
    let out = dir.path().join("o");
    let o = run(&["wrap-region", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let z = (summary["amplitude"][0].as_f64().unwrap(), summary["amplitude"][1].as_f64().unwrap());
    let planes = rows(&fs::read_to_string(out.join("wrap_half_planes.csv")).unwrap());
    assert_eq!(planes.len(), 16);
    let vertices = rows(&fs::read_to_string(out.join("wrap_vertices.csv")).unwrap());
    for p in &planes {
        let (nx, ny, b) = (f(&p[1]), f(&p[2]), f(&p[3]));
        assert!(nx * z.0 + ny * z.1 <= b);
        for v in &vertices {
            assert!(nx * f(&v[1]) + ny * f(&v[2]) <= b + 1e-9 * (1.0 + b.abs()));
        }
    }
    // Same normalized amplitude as the backscatter table.
    let o = run(&["backscatter-bound", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let table = rows(&fs::read_to_string(out.join("backscatter_bound.csv")).unwrap());
    assert!(((z.0 * z.0 + z.1 * z.1).sqrt() - f(&table[0][1])).abs() < 1e-12);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn raw_flag_scales_far_field_by_the_normalization() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "l.json", LOSSY);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let c = cfg.to_str().unwrap();
    assert_eq!(run(&["mie-solve", "--config", c, "--out", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run(&["mie-solve", "--config", c, "--out", b.to_str().unwrap(), "--raw"]).status.code(), Some(0));
    let na = rows(&fs::read_to_string(a.join("far_field.csv")).unwrap());
    let nb = rows(&fs::read_to_string(b.join("far_field.csv")).unwrap());
    // 4 pi / (p k0^2 |Omega|) with p = 1, k0 = omega sqrt(rho0/kappa0) = 2, a = 0.5.
    let scale = 4.0 * std::f64::consts::PI / (4.0 * 4.0 / 3.0 * std::f64::consts::PI * 0.125);
    for (x, y) in na.iter().zip(&nb) {
        assert!((f(&x[1]) - scale * f(&y[1])).abs() < 1e-12 * (1.0 + f(&x[1]).abs()));
        assert!((f(&x[2]) - scale * f(&y[2])).abs() < 1e-12 * (1.0 + f(&x[2]).abs()));
    }
}

#[test]
fn optical_check_sweep_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "l.json", LOSSY);
    let o = run(&["optical-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 3);
    for row in r {
        let v: Vec<f64> = row.iter().map(|s| f(s)).collect();
        // absorbed + scattered = extinction, every column nonnegative.
        assert!((v[1] + v[3] - v[4]).abs() < 1e-12 * v[4]);
        assert!((v[5] - v[4]).abs() < 1e-8 * v[4] && v[7] < 1e-6);
        assert!(v[1] > 0.0 && v[3] > 0.0);
    }
}

#[test]
fn grid_alpha_raw_multiplies_by_inclusion_volume() {
    let dir = TempDir::new().unwrap();
    // A 16 x 16 square in a 32 x 32 grid: realised fill exactly 1/4, cell area 9.
    let cfg = write(dir.path(), "g.json", r#"{"shape": {"kind": "square", "fill": 0.25}, "n": 32, "eps1": [3, 1], "cell_length": 3.0}"#);
    let c = cfg.to_str().unwrap();
    let a: serde_json::Value = serde_json::from_str(&stdout(&run(&["grid-alpha", "--config", c]))).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout(&run(&["grid-alpha", "--config", c, "--raw"]))).unwrap();
    for part in ["alpha_re", "alpha_im"] {
        let (x, y) = (a[part][0][0].as_f64().unwrap(), b[part][0][0].as_f64().unwrap());
        assert!((y - 2.25 * x).abs() < 1e-12 * y.abs(), "{part}: {x} {y}");
    }
    // Square symmetry: equal diagonal entries.
    assert!((a["alpha_re"][0][0].as_f64().unwrap() - a["alpha_re"][1][1].as_f64().unwrap()).abs() < 1e-6);
    assert_eq!(run(&["grid-alpha", "--config", c, "--chi1", "1"]).status.code(), Some(2));
}

#[test]
fn verify_all_subset_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let o = run(&["verify-all", "--only", "1,10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(out.join("verify_report.csv")).unwrap();
    assert_eq!(text, "id,name,status\n1,bound-corner attainment,PASS\n10,lossless unitarity,PASS\n");
    assert_eq!(run(&["verify-all", "--only", "42"]).status.code(), Some(2));
}

#[test]
fn help_names_the_governing_identity() {
    let cases = [
        ("hs-interval", "Hashin-Shtrikman"),
        ("bounds-region", "Bergman-Milton"),
        ("milton2d", "Milton"),
        ("shape-alpha", "depolarization"),
        ("grid-alpha", "cell problem"),
        ("y-solve", "power"),
        ("network-y", "Kirchhoff"),
        ("mie-solve", "Partial-wave"),
        ("optical-check", "optical theorem"),
        ("backscatter-bound", "contrast bound"),
        ("wrap-region", "half-plane"),
        ("verify-all", "acceptance"),
    ];
    for (cmd, phrase) in cases {
        let o = run(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(phrase), "{cmd} help lacks {phrase:?}");
    }
}
