//! One function per subcommand. Each fills `Artifacts` and returns; nothing is
//! written until the caller commits.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use wavebound::acoustic_mie::{
    backscatter_bound, optical_theorem_residual, power_budget, solve_sphere, wrap_around_region,
    AcousticMedia, PartialWaveSolution,
};
use wavebound::mobius_bounds::{
    arcs_to_csv, bm_arcs, bm_region, hs_interval, milton2d_curves, milton2d_region, region_contains,
    BoundRegion, MobiusArc,
};
use wavebound::quasistatic_grid::{dilute_estimate, solve_tensor, PixelInclusion};
use wavebound::verify;
use wavebound::y_problem::{
    complex_rows, extract_y_star, network_to_instance, power_identity_residual, solve_y, CMat, CVec, NetworkSpec,
};
use wavebound::{Error, LossConvention};

use crate::output::{json, Artifacts};
use crate::params::{ContrastParams, GridParams, ShapeParams, SphereParams, YSolveParams};

type C = Complex64;

/// `-0` prints as `0`.
fn num(x: f64) -> f64 {
    x + 0.0
}

fn pair(z: C) -> [f64; 2] {
    [num(z.re), num(z.im)]
}

fn user_arc(conv: LossConvention, arc: &MobiusArc) -> MobiusArc {
    match conv {
        LossConvention::ExpMinusIOmegaT => *arc,
        LossConvention::ExpPlusIOmegaT => arc.conj(),
    }
}

#[derive(Serialize)]
struct Membership {
    point: [f64; 2],
    inside: bool,
    /// Largest signed distance outside a bounding circle; negative inside.
    margin: f64,
}

fn membership(p: &ContrastParams, region: &BoundRegion) -> Option<Membership> {
    p.point.map(|z| {
        let zi = p.convention.to_internal(z.0);
        Membership { point: pair(z.0), inside: region_contains(region, zi, 1e-9), margin: region.margin(zi) }
    })
}

pub fn bounds_region(p: &ContrastParams, art: &mut Artifacts) -> Result<(), Error> {
    let contrast = p.contrast(3)?;
    let conv = p.convention;
    let (a1, a2) = bm_arcs(&contrast);
    let (u1, u2) = (user_arc(conv, &a1), user_arc(conv, &a2));
    let (region, interval, inside) = match bm_region(&contrast) {
        Ok(r) => {
            let m = membership(p, &r);
            (Some(r), None, m)
        }
        Err(Error::Degenerate(_)) if contrast.chi1.im == 0.0 => (None, Some(hs_interval(&contrast)?), None),
        Err(e) => return Err(e),
    };
    art.primary("bounds_region.csv", arcs_to_csv(&[("arc1", &u1), ("arc2", &u2)], p.samples));
    art.summary(json(&json!({
        "dim": contrast.dim,
        "chi1": pair(conv.from_internal(contrast.chi1)),
        "arc1": { "start": pair(u1.start()), "end": pair(u1.end()) },
        "arc2": { "start": pair(u2.start()), "end": pair(u2.end()) },
        "lossy_region": region.is_some(),
        "interval": interval,
        "membership": inside,
    })));
    Ok(())
}

pub fn hs_interval_cmd(p: &ContrastParams, art: &mut Artifacts) -> Result<(), Error> {
    let contrast = p.contrast(3)?;
    let (lo, hi) = hs_interval(&contrast)?;
    art.file("hs_interval.csv", format!("lo,hi\n{lo:?},{hi:?}\n"));
    art.summary(format!("{lo:?},{hi:?}\n"));
    Ok(())
}

pub fn milton2d(p: &ContrastParams, art: &mut Artifacts) -> Result<(), Error> {
    let contrast = p.contrast(2)?;
    let conv = p.convention;
    let (m1, m2) = milton2d_curves(&contrast)?;
    let region = milton2d_region(&contrast)?;
    let curves: Vec<(&str, MobiusArc)> = vec![
        ("milton_arc", user_arc(conv, &m1)),
        ("milton_chord", user_arc(conv, &m2)),
        ("bm_arc1", user_arc(conv, &region.extra[0])),
        ("bm_arc2", user_arc(conv, &region.extra[1])),
    ];
    let refs: Vec<(&str, &MobiusArc)> = curves.iter().map(|(n, a)| (*n, a)).collect();
    art.primary("milton2d.csv", arcs_to_csv(&refs, p.samples));
    art.summary(json(&json!({
        "chi1": pair(conv.from_internal(contrast.chi1)),
        "disk": pair(conv.from_internal(m1.start())),
        "thin_shell": pair(conv.from_internal(m1.end())),
        "membership": membership(p, &region),
    })));
    Ok(())
}

pub fn shape_alpha(p: &ShapeParams, art: &mut Artifacts) -> Result<(), Error> {
    let chi = p.chi1()?;
    let diag = p.shape.alpha_diagonal(chi)?;
    let trace = p.shape.trace_average(chi)?;
    let conv = p.convention;
    let mut csv = String::from("component,re,im\n");
    for (i, z) in diag.iter().enumerate() {
        let z = conv.from_internal(*z);
        let _ = writeln!(csv, "{i},{:?},{:?}", num(z.re), num(z.im));
    }
    let t = conv.from_internal(trace);
    let _ = writeln!(csv, "trace,{:?},{:?}", num(t.re), num(t.im));
    art.primary("shape_alpha.csv", csv);
    art.summary(json(&json!({
        "shape": p.shape,
        "alpha_diagonal": diag.iter().map(|z| pair(conv.from_internal(*z))).collect::<Vec<_>>(),
        "trace_average": pair(t),
    })));
    Ok(())
}

fn read_mask(path: &Path) -> Result<PixelInclusion, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::Domain(format!("reading mask {}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("pbm") => PixelInclusion::from_pbm(&bytes),
        Some("npy") => PixelInclusion::from_npy(&bytes),
        _ => Err(Error::Domain(format!("mask {} must have a .pbm or .npy extension", path.display()))),
    }
}

pub fn grid_alpha(p: &GridParams, base: &Path, raw: bool, art: &mut Artifacts) -> Result<(), Error> {
    let eps1 = p.eps1()?;
    let with_length = |inc: PixelInclusion| match p.cell_length {
        Some(l) => inc.with_cell_length(l),
        None => Ok(inc),
    };
    let (mut est, volume) = match (&p.shape, &p.mask) {
        (Some(shape), None) if !p.fills.is_empty() => {
            if raw {
                return Err(Error::Domain("raw output needs a single inclusion, not a fill sweep".into()));
            }
            (dilute_estimate(shape, p.n, &p.fills, eps1, &p.options)?, 1.0)
        }
        (Some(shape), None) => {
            let inc = with_length(shape.rasterize(p.n)?)?;
            (solve_tensor(&inc, eps1, &p.options)?, inc.volume())
        }
        (None, Some(path)) => {
            if !p.fills.is_empty() {
                return Err(Error::Domain("fills apply to procedural shapes only".into()));
            }
            let inc = with_length(read_mask(&base.join(path))?)?;
            (solve_tensor(&inc, eps1, &p.options)?, inc.volume())
        }
        _ => return Err(Error::Domain("give exactly one of shape or mask".into())),
    };
    let scale = if raw { volume } else { 1.0 };
    for row in est.alpha_over_volume.iter_mut() {
        for z in row.iter_mut() {
            *z = p.convention.from_internal(*z) * scale;
        }
    }
    art.primary("grid_alpha.json", json(&est));
    Ok(())
}

fn matrix_csv(m: &CMat) -> String {
    let mut s = String::from("row,col,re,im\n");
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            let _ = writeln!(s, "{r},{c},{:?},{:?}", num(z.re), num(z.im));
        }
    }
    s
}

pub fn y_solve(p: &YSolveParams, art: &mut Artifacts) -> Result<(), Error> {
    let inst = p.instance()?;
    let y = extract_y_star(&inst)?;
    art.primary("y_star.csv", matrix_csv(&y.matrix));
    let mut report = json!({ "y_star": complex_rows(&y.matrix) });
    if let Some(e1) = &p.e1 {
        let e1 = CVec::from_iterator(e1.len(), e1.iter().map(|z| z.0));
        let sol = solve_y(&inst, &e1)?;
        let residual = power_identity_residual(&inst, &e1)?;
        let (curl, div) = sol.orthogonality_residuals(&inst);
        let scale = sol.power_scale().max(f64::MIN_POSITIVE);
        if residual > 1e-9 * scale {
            return Err(Error::IdentityViolation {
                identity: "power identity <e1, Y* e1> = <e2, L e2>".into(),
                detail: format!("residual {residual:e} at power scale {scale:e}"),
            });
        }
        let mut fields = String::from("index,e1_re,e1_im,j1_re,j1_im,e2_re,e2_im,j2_re,j2_im\n");
        for i in 0..e1.len() {
            let _ = write!(fields, "{i}");
            for v in [&sol.e1, &sol.j1, &sol.e2, &sol.j2] {
                let _ = write!(fields, ",{:?},{:?}", num(v[i].re), num(v[i].im));
            }
            fields.push('\n');
        }
        art.file("fields.csv", fields);
        report["power_residual"] = json!(residual);
        report["orthogonality_residuals"] = json!([curl, div]);
    }
    art.summary(json(&report));
    Ok(())
}

pub fn network_y(spec: &NetworkSpec, art: &mut Artifacts) -> Result<(), Error> {
    let inst = network_to_instance(spec)?;
    let y = extract_y_star(&inst)?;
    art.primary("y_star.csv", matrix_csv(&y.matrix));
    art.summary(json(&json!({
        "source_edges": spec.source_edges(),
        "y_star": complex_rows(&y.matrix),
    })));
    Ok(())
}

fn volume(radius: f64) -> f64 {
    4.0 / 3.0 * PI * radius.powi(3)
}

/// Converts `P_inf` to `4 pi P_inf / (p k0^2 |Omega|)` unless `raw`.
fn amplitude_scale(sol: &PartialWaveSolution, raw: bool) -> C {
    if raw {
        C::new(1.0, 0.0)
    } else {
        4.0 * PI / (sol.wave.amplitude * sol.k0 * sol.k0 * volume(sol.radius))
    }
}

pub fn mie_solve(p: &SphereParams, raw: bool, art: &mut Artifacts) -> Result<(), Error> {
    let sol = solve_sphere(&p.media()?, &p.wave()?, p.radius)?;
    let conv = p.convention;
    let mut coeffs = String::from("l,re,im\n");
    let mut interior = String::from("l,re,im\n");
    for l in 0..=sol.l_max {
        let (a, b) = (conv.from_internal(sol.a[l]), conv.from_internal(sol.b[l]));
        let _ = writeln!(coeffs, "{l},{:?},{:?}", num(a.re), num(a.im));
        let _ = writeln!(interior, "{l},{:?},{:?}", num(b.re), num(b.im));
    }
    let scale = amplitude_scale(&sol, raw);
    let n = p.far_field_samples.max(2);
    let mut far = String::from("theta,re,im\n");
    for k in 0..n {
        let theta = PI * k as f64 / (n - 1) as f64;
        let z = conv.from_internal(sol.far_field_at(theta.cos()) * scale);
        let _ = writeln!(far, "{theta:?},{:?},{:?}", num(z.re), num(z.im));
    }
    art.primary("coefficients.csv", coeffs);
    art.file("interior_coefficients.csv", interior);
    art.file("far_field.csv", far);
    art.summary(json(&json!({
        "k0a": sol.k0 * sol.radius,
        "k1": pair(conv.from_internal(sol.k1)),
        "l_max": sol.l_max,
        "backscatter": pair(conv.from_internal(sol.far_field_at(-1.0) * scale)),
        "forward": pair(conv.from_internal(sol.far_field_at(1.0) * scale)),
    })));
    Ok(())
}

/// Media for each requested `k0 a`, or the configured one.
fn sweep_media(p: &SphereParams) -> Result<Vec<(f64, AcousticMedia)>, Error> {
    if p.sweeps.ka.is_empty() {
        let m = p.media()?;
        Ok(vec![(m.k0() * p.radius, m)])
    } else {
        p.sweeps.ka.iter().map(|&ka| Ok((ka, p.media_at(ka)?))).collect()
    }
}

/// Incident intensity times the geometric cross-section.
fn power_scale(m: &AcousticMedia, amplitude: C, radius: f64) -> f64 {
    let c0 = m.omega / m.k0();
    amplitude.norm_sqr() / (2.0 * m.rho0 * c0) * PI * radius * radius
}

pub fn optical_check(p: &SphereParams, raw: bool, art: &mut Artifacts) -> Result<(), Error> {
    let wave = p.wave()?;
    let rows = sweep_media(p)?
        .into_par_iter()
        .map(|(ka, media)| {
            let sol = solve_sphere(&media, &wave, p.radius)?;
            let budget = power_budget(&sol)?;
            let report = optical_theorem_residual(&sol)?;
            if report.residual > 1e-6 {
                return Err(Error::IdentityViolation {
                    identity: "optical theorem (absorbed + scattered = forward-amplitude extinction)".into(),
                    detail: format!("relative residual {:e} at k0 a = {ka}", report.residual),
                });
            }
            let s = if raw { 1.0 } else { 1.0 / power_scale(&media, wave.amplitude, p.radius) };
            Ok((ka, budget, report, s))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut csv = String::from("ka,absorbed,absorbed_volume,scattered,extinction,from_forward,from_volume,residual\n");
    let mut worst = 0.0f64;
    for (ka, b, r, s) in &rows {
        worst = worst.max(r.residual);
        let _ = writeln!(
            csv,
            "{ka:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            num(b.absorbed * s),
            num(b.absorbed_volume * s),
            num(b.scattered * s),
            num(b.extinction * s),
            num(r.from_forward * s),
            num(r.from_volume * s),
            r.residual
        );
    }
    art.primary("optical_check.csv", csv);
    art.summary(json(&json!({ "cases": rows.len(), "max_residual": worst })));
    Ok(())
}

pub fn backscatter(p: &SphereParams, raw: bool, art: &mut Artifacts) -> Result<(), Error> {
    let wave = p.wave()?;
    let conv = p.convention;
    let rows = sweep_media(p)?
        .into_par_iter()
        .map(|(ka, media)| Ok((ka, backscatter_bound(&media, &wave, p.radius, 0.0)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let check = |lhs: f64, rhs: f64, what: &str| {
        if lhs > rhs + 1e-9 * (1.0 + rhs.abs()) {
            Err(Error::IdentityViolation {
                identity: format!("backscatter bound ({what})"),
                detail: format!("amplitude {lhs:e} exceeds bound {rhs:e}"),
            })
        } else {
            Ok(())
        }
    };
    let mut table = String::from("ka,lhs,rhs,margin");
    table.push_str(if raw { ",amplitude_re,amplitude_im\n" } else { "\n" });
    for (ka, b) in &rows {
        check(b.lhs, b.rhs_86, "loss-weighted contrast form")?;
        let _ = write!(table, "{ka:?},{:?},{:?},{:?}", b.lhs, b.rhs_86, b.margin);
        if raw {
            let z = conv.from_internal(b.amplitude);
            let _ = write!(table, ",{:?},{:?}", num(z.re), num(z.im));
        }
        table.push('\n');
    }
    let media = p.media()?;
    let base = backscatter_bound(&media, &wave, p.radius, 0.0)?;
    let phases: Vec<f64> = if p.sweeps.phase.is_empty() {
        (0..p.n_angles).map(|j| PI * j as f64 / p.n_angles as f64).collect()
    } else {
        p.sweeps.phase.clone()
    };
    let mut by_phase = String::from("phase,lhs,rhs,margin\n");
    for &phase in &phases {
        let t0 = phase / media.omega;
        let (lhs, rhs) = (base.lhs_85_at(t0), base.rhs_85_at(t0));
        check(lhs, rhs, "time-offset form")?;
        let _ = writeln!(by_phase, "{phase:?},{lhs:?},{rhs:?},{:?}", rhs - lhs);
    }
    art.primary("backscatter_bound.csv", table);
    art.file("backscatter_phase.csv", by_phase);
    art.summary(json(&json!({
        "k0a": media.k0() * p.radius,
        "lhs": base.lhs,
        "rhs": base.rhs_86,
        "margin": base.margin,
    })));
    Ok(())
}

pub fn wrap_region(p: &SphereParams, raw: bool, art: &mut Artifacts) -> Result<(), Error> {
    let media = p.media()?;
    let wave = p.wave()?;
    let conv = p.convention;
    let region = wrap_around_region(&media, &wave, p.radius, p.n_angles)?;
    if region.margin < -1e-9 * (1.0 + region.amplitude.norm()) {
        return Err(Error::IdentityViolation {
            identity: "wrap-around half-plane bounds".into(),
            detail: format!("backscatter amplitude lies {:e} outside", -region.margin),
        });
    }
    let s = if raw { 1.0 } else { 4.0 * PI / (wave.amplitude.norm() * media.k0().powi(2) * volume(p.radius)) };
    let mut vertices = String::from("index,re,im\n");
    for (i, v) in region.vertices.iter().enumerate() {
        let z = conv.from_internal(*v * s);
        let _ = writeln!(vertices, "{i},{:?},{:?}", num(z.re), num(z.im));
    }
    // Im(w z) <= b is n . z <= b with n = i conj(w), read as a plane vector.
    let mut planes = String::from("phase,normal_re,normal_im,offset\n");
    for h in &region.half_planes {
        let n = conv.from_internal(C::i() * h.weight.conj());
        let _ = writeln!(planes, "{:?},{:?},{:?},{:?}", h.t0 * media.omega, num(n.re), num(n.im), h.bound * s);
    }
    art.primary("wrap_vertices.csv", vertices);
    art.file("wrap_half_planes.csv", planes);
    art.summary(json(&json!({
        "bounded": region.bounded,
        "amplitude": pair(conv.from_internal(region.amplitude * s)),
        "margin": region.margin * s,
        "vertices": region.vertices.len(),
    })));
    Ok(())
}

/// Returns the number of failed criteria.
pub fn verify_all(only: &[u8], seed: u64, art: &mut Artifacts) -> Result<usize, Error> {
    let ids: Vec<u8> = if only.is_empty() { verify::CRITERIA.iter().map(|c| c.0).collect() } else { only.to_vec() };
    let mut reports = Vec::new();
    for id in ids {
        let r = verify::run(id, seed).ok_or_else(|| Error::Domain(format!("no acceptance criterion {id}")))?;
        eprintln!("{r}");
        reports.push(r);
    }
    let mut csv = String::from("id,name,status\n");
    for r in &reports {
        let _ = writeln!(csv, "{},{},{}", r.id, r.name, if r.passed { "PASS" } else { "FAIL" });
    }
    art.primary("verify_report.csv", csv);
    art.file("verify_details.json", json(&reports));
    Ok(reports.iter().filter(|r| !r.passed).count())
}
