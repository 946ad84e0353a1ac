//! Finite-dimensional Y-problems.
//!
//! The space `K = C^n` splits two ways, `K = E (+) J = V (+) H`, each
//! orthogonally. Given `e1` in `V`, find `e2, j2` in `H` and `j1` in `V` with
//! `e1 + e2` in `E`, `j1 + j2` in `J` and `j2 = L e2`. Then `j1 = -Y* e1`.
//! Inner products are sesquilinear, conjugate-linear in the first slot.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::quasistatic_grid::{modified_frequency, PixelInclusion};
use crate::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

const ORTHO_TOL: f64 = 1e-12;
const COND_LIMIT: f64 = 1e12;
const MAX_AMBIENT: usize = 4096;

fn inner(u: &CVec, v: &CVec) -> Complex64 {
    u.dotc(v)
}

/// Subspace pair plus the operator `L` on `H = V^perp`.
#[derive(Debug, Clone, PartialEq)]
pub struct YProblemInstance {
    basis_e: CMat,
    basis_v: CMat,
    operator_l: CMat,
}

fn check_orthonormal(name: &str, basis: &CMat) -> Result<()> {
    let gram = basis.adjoint() * basis;
    let k = gram.nrows();
    let err = (gram - CMat::identity(k, k)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if err > ORTHO_TOL {
        return Err(Error::domain(format!("{name} columns are not orthonormal (error {err:.2e})")));
    }
    Ok(())
}

impl YProblemInstance {
    pub fn new(basis_e: CMat, basis_v: CMat, operator_l: CMat) -> Result<Self> {
        let n = operator_l.nrows();
        if operator_l.ncols() != n || basis_e.nrows() != n || basis_v.nrows() != n {
            return Err(Error::domain("bases and operator must share the ambient dimension"));
        }
        if n == 0 || n > MAX_AMBIENT {
            return Err(Error::domain(format!("ambient dimension {n} outside 1..={MAX_AMBIENT}")));
        }
        if basis_e.ncols() > n || basis_v.ncols() > n {
            return Err(Error::domain("more basis vectors than the ambient dimension"));
        }
        check_orthonormal("E basis", &basis_e)?;
        check_orthonormal("V basis", &basis_v)?;
        let inst = YProblemInstance { basis_e, basis_v, operator_l };
        let ph = inst.projector_h();
        let leak = (&inst.basis_v.adjoint() * &inst.operator_l * &ph).norm();
        if leak > 1e-12 * (1.0 + inst.operator_l.norm()) {
            return Err(Error::domain(format!("L does not map H into H (leak {leak:.2e})")));
        }
        Ok(inst)
    }

    pub fn ambient_dim(&self) -> usize {
        self.operator_l.nrows()
    }

    pub fn basis_e(&self) -> &CMat {
        &self.basis_e
    }

    pub fn basis_v(&self) -> &CMat {
        &self.basis_v
    }

    pub fn operator_l(&self) -> &CMat {
        &self.operator_l
    }

    pub fn projector_e(&self) -> CMat {
        &self.basis_e * self.basis_e.adjoint()
    }

    pub fn projector_h(&self) -> CMat {
        let n = self.ambient_dim();
        CMat::identity(n, n) - &self.basis_v * self.basis_v.adjoint()
    }

    /// The same problem with `V` described by the basis `V U` for unitary `U`.
    pub fn rebased_v(&self, unitary: &CMat) -> Result<Self> {
        YProblemInstance::new(self.basis_e.clone(), &self.basis_v * unitary, self.operator_l.clone())
    }
}

/// Fields of one solved Y-problem, as ambient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct YSolution {
    pub e1: CVec,
    pub j1: CVec,
    pub e2: CVec,
    pub j2: CVec,
}

impl YSolution {
    /// Natural magnitude of the power terms, for relative tolerances.
    pub fn power_scale(&self) -> f64 {
        self.e1.norm() * self.j1.norm() + self.e2.norm() * self.j2.norm()
    }

    /// `||(I - P_E)(e1 + e2)||` and `||P_E(j1 + j2)||`.
    pub fn orthogonality_residuals(&self, instance: &YProblemInstance) -> (f64, f64) {
        let pe = instance.projector_e();
        let e = &self.e1 + &self.e2;
        let j = &self.j1 + &self.j2;
        ((&e - &pe * &e).norm(), (&pe * &j).norm())
    }
}

/// Factorised block system shared by repeated solves.
struct YSolver<'a> {
    instance: &'a YProblemInstance,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl<'a> YSolver<'a> {
    fn new(instance: &'a YProblemInstance) -> Result<Self> {
        let e = &instance.basis_e;
        let v = &instance.basis_v;
        let (me, mv) = (e.ncols(), v.ncols());
        let size = me + mv;
        let lph = &instance.operator_l * instance.projector_h();
        let mut sys = CMat::zeros(size, size);
        // Unknowns [a; b] with e1 + e2 = E a and j1 = V b.
        sys.view_mut((0, 0), (mv, me)).copy_from(&(v.adjoint() * e));
        sys.view_mut((mv, 0), (me, me)).copy_from(&(e.adjoint() * &lph * e));
        sys.view_mut((mv, me), (me, mv)).copy_from(&(e.adjoint() * v));
        if size > 0 {
            let sv = sys.clone().svd(false, false).singular_values;
            let smax = sv.max();
            let smin = sv.min();
            let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
            if !(cond <= COND_LIMIT) {
                return Err(Error::IllConditioned(cond));
            }
        }
        Ok(YSolver { instance, lu: sys.lu() })
    }

    fn solve_coords(&self, c: &CVec) -> YSolution {
        let inst = self.instance;
        let (me, mv) = (inst.basis_e.ncols(), inst.basis_v.ncols());
        let mut rhs = CVec::zeros(me + mv);
        rhs.rows_mut(0, mv).copy_from(c);
        let x = self.lu.solve(&rhs).expect("conditioning checked at construction");
        let a = x.rows(0, me).into_owned();
        let b = x.rows(me, mv).into_owned();
        let e1 = &inst.basis_v * c;
        let e2 = &inst.basis_e * a - &e1;
        let j1 = &inst.basis_v * b;
        let j2 = &inst.operator_l * &e2;
        YSolution { e1, j1, e2, j2 }
    }

    fn y_star(&self) -> YStar {
        let mv = self.instance.basis_v.ncols();
        let mut m = CMat::zeros(mv, mv);
        for k in 0..mv {
            let mut c = CVec::zeros(mv);
            c[k] = Complex64::new(1.0, 0.0);
            let sol = self.solve_coords(&c);
            let b = self.instance.basis_v.adjoint() * sol.j1;
            m.set_column(k, &(-b));
        }
        YStar { matrix: m }
    }
}

fn coords_in_v(instance: &YProblemInstance, e1: &CVec) -> Result<CVec> {
    if e1.len() != instance.ambient_dim() {
        return Err(Error::domain("e1 has the wrong length"));
    }
    let c = instance.basis_v.adjoint() * e1;
    let off = (e1 - &instance.basis_v * &c).norm();
    if off > 1e-12 * (1.0 + e1.norm()) {
        return Err(Error::domain(format!("e1 is not in V (distance {off:.2e})")));
    }
    Ok(c)
}

/// Solves the Y-problem for one `e1` in `V` (given as an ambient vector).
pub fn solve_y(instance: &YProblemInstance, e1: &CVec) -> Result<YSolution> {
    let c = coords_in_v(instance, e1)?;
    Ok(YSolver::new(instance)?.solve_coords(&c))
}

/// `Y*` in the coordinates of the V basis.
#[derive(Debug, Clone, PartialEq)]
pub struct YStar {
    pub matrix: CMat,
}

impl Serialize for YStar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let rows = |f: fn(&Complex64) -> f64| {
            self.matrix.row_iter().map(|r| r.iter().map(f).collect()).collect()
        };
        Out { re: rows(|z| z.re), im: rows(|z| z.im) }.serialize(s)
    }
}

pub fn extract_y_star(instance: &YProblemInstance) -> Result<YStar> {
    Ok(YSolver::new(instance)?.y_star())
}

/// `|<e1, Y* e1> - <e2, L e2>|`.
pub fn power_identity_residual(instance: &YProblemInstance, e1: &CVec) -> Result<f64> {
    let c = coords_in_v(instance, e1)?;
    let solver = YSolver::new(instance)?;
    let y = solver.y_star();
    let sol = solver.solve_coords(&c);
    let ye1 = &instance.basis_v * (&y.matrix * &c);
    let lhs = inner(e1, &ye1);
    let rhs = inner(&sol.e2, &(&instance.operator_l * &sol.e2));
    Ok((lhs - rhs).norm())
}

/// `alpha = volume [(eps1 - eps0) - (eps1 - eps0)(Y* + eps1)^{-1}(eps1 - eps0)]`.
pub fn polarizability_from_y_star(y_star: &CMat, eps1: Complex64, eps0: Complex64, volume: f64) -> Result<CMat> {
    let k = y_star.nrows();
    let delta = eps1 - eps0;
    let shifted = y_star + CMat::identity(k, k) * eps1;
    let inv = shifted
        .try_inverse()
        .ok_or_else(|| Error::Singular("Y* + eps1 is not invertible".into()))?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular("Y* + eps1 is not invertible".into()));
    }
    Ok((CMat::identity(k, k) * delta - inv * (delta * delta)) * Complex64::new(volume, 0.0))
}

/// Polarizability from the instance's `Y*`; `volume` is |Omega|.
pub fn discrete_polarizability(
    instance: &YProblemInstance,
    eps1: Complex64,
    eps0: Complex64,
    volume: f64,
) -> Result<CMat> {
    if eps1 == eps0 {
        let k = instance.basis_v.ncols();
        return Ok(CMat::zeros(k, k));
    }
    polarizability_from_y_star(&extract_y_star(instance)?.matrix, eps1, eps0, volume)
}

/// Periodic pixel cell as a Y-problem: `E` holds the discrete gradient
/// fields (same projector as the grid solver), `V` the fields constant on
/// the inclusion and zero outside, and `L` multiplication by `eps(x)`.
/// Ambient layout is component-major.
pub fn dielectric_instance(inclusion: &PixelInclusion, eps1: Complex64, eps0: Complex64) -> Result<YProblemInstance> {
    let n = inclusion.n();
    let d = inclusion.dim();
    let total = n.pow(d as u32);
    let amb = d * total;
    if amb > MAX_AMBIENT {
        return Err(Error::domain(format!("cell too large for a dense Y-problem ({amb} unknowns)")));
    }
    let digits = |mut flat: usize| {
        let mut out = [0usize; 3];
        for axis in (0..d).rev() {
            out[axis] = flat % n;
            flat /= n;
        }
        out
    };
    let mut cols = Vec::new();
    let norm = 1.0 / (total as f64).sqrt();
    for k in 0..total {
        let kd = digits(k);
        let xi: Vec<f64> = (0..d).map(|a| modified_frequency(kd[a], n)).collect();
        let xn = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if xn == 0.0 {
            continue;
        }
        let mut col = CVec::zeros(amb);
        for x in 0..total {
            let xd = digits(x);
            let phase: usize = (0..d).map(|a| kd[a] * xd[a]).sum();
            let wave = Complex64::from_polar(norm, 2.0 * std::f64::consts::PI * (phase % n) as f64 / n as f64);
            for c in 0..d {
                col[c * total + x] = wave * (xi[c] / xn);
            }
        }
        cols.push(col);
    }
    let basis_e = if cols.is_empty() { CMat::zeros(amb, 0) } else { CMat::from_columns(&cols) };

    let pixels = inclusion.pixels();
    let w = 1.0 / (pixels.len() as f64).sqrt();
    let mut basis_v = CMat::zeros(amb, d);
    for c in 0..d {
        for &p in &pixels {
            basis_v[(c * total + p, c)] = Complex64::new(w, 0.0);
        }
    }
    let mut l = CMat::zeros(amb, amb);
    for (x, &inside) in inclusion.mask().iter().enumerate() {
        let eps = if inside { eps1 } else { eps0 };
        for c in 0..d {
            l[(c * total + x, c * total + x)] = eps;
        }
    }
    YProblemInstance::new(basis_e, basis_v, l)
}

/// One edge of a network: a battery or an impedance, oriented `from -> to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    /// Required for impedance edges, `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impedance: Option<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Source,
    Impedance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub nodes: usize,
    pub edges: Vec<NetworkEdge>,
}

impl NetworkSpec {
    /// Builds a spec from a signed node-by-edge incidence matrix (+1 at the
    /// tail, -1 at the head of each edge).
    pub fn from_incidence(
        incidence: &[Vec<i8>],
        impedance_edges: &[(usize, Complex64)],
        source_edges: &[usize],
    ) -> Result<Self> {
        let nodes = incidence.len();
        let nedges = incidence.first().map_or(0, |r| r.len());
        if incidence.iter().any(|r| r.len() != nedges) {
            return Err(Error::domain("incidence matrix rows differ in length"));
        }
        let mut kinds: Vec<Option<(EdgeKind, Option<Complex64>)>> = vec![None; nedges];
        for &(e, z) in impedance_edges {
            let slot = kinds.get_mut(e).ok_or_else(|| Error::domain(format!("edge {e} out of range")))?;
            if slot.is_some() {
                return Err(Error::domain(format!("edge {e} listed twice")));
            }
            *slot = Some((EdgeKind::Impedance, Some(z)));
        }
        for &e in source_edges {
            let slot = kinds.get_mut(e).ok_or_else(|| Error::domain(format!("edge {e} out of range")))?;
            if slot.is_some() {
                return Err(Error::domain(format!("edge {e} is both a source and an impedance (or repeated)")));
            }
            *slot = Some((EdgeKind::Source, None));
        }
        let mut edges = Vec::with_capacity(nedges);
        for (e, kind) in kinds.into_iter().enumerate() {
            let (kind, impedance) = kind.ok_or_else(|| Error::domain(format!("edge {e} has no kind")))?;
            let mut from = None;
            let mut to = None;
            for (node, row) in incidence.iter().enumerate() {
                match row[e] {
                    0 => {}
                    1 if from.is_none() => from = Some(node),
                    -1 if to.is_none() => to = Some(node),
                    _ => return Err(Error::domain(format!("incidence column {e} is not one +1 and one -1"))),
                }
            }
            match (from, to) {
                (Some(from), Some(to)) => edges.push(NetworkEdge { from, to, kind, impedance }),
                _ => return Err(Error::domain(format!("incidence column {e} is not one +1 and one -1"))),
            }
        }
        Ok(NetworkSpec { nodes, edges })
    }

    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nodes, self.edges.len());
        for (e, edge) in self.edges.iter().enumerate() {
            m[(edge.from, e)] = 1.0;
            m[(edge.to, e)] = -1.0;
        }
        m
    }

    pub fn source_edges(&self) -> Vec<usize> {
        self.edges.iter().enumerate().filter(|(_, e)| e.kind == EdgeKind::Source).map(|(i, _)| i).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::domain("a network needs at least two nodes"));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.from >= self.nodes || e.to >= self.nodes {
                return Err(Error::domain(format!("edge {i} references a missing node")));
            }
            if e.from == e.to {
                return Err(Error::domain(format!("edge {i} is a self loop")));
            }
            match (e.kind, e.impedance) {
                (EdgeKind::Impedance, Some(z)) if z.norm() > 0.0 && z.re.is_finite() && z.im.is_finite() => {}
                (EdgeKind::Impedance, Some(_)) => {
                    return Err(Error::domain(format!("edge {i} has zero or non-finite impedance")))
                }
                (EdgeKind::Impedance, None) => return Err(Error::domain(format!("edge {i} lacks an impedance"))),
                (EdgeKind::Source, Some(_)) => {
                    return Err(Error::domain(format!("edge {i} is both a source and an impedance")))
                }
                (EdgeKind::Source, None) => {}
            }
        }
        if self.source_edges().is_empty() {
            return Err(Error::domain("network has no source edge"));
        }
        let mut parent: Vec<usize> = (0..self.nodes).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..self.nodes).any(|x| find(&mut parent, x) != root) {
            return Err(Error::domain("network is disconnected"));
        }
        Ok(())
    }
}

/// Edge space with `E` the potential drops (range of `M^T`), `V` the source
/// edges and `L = diag(1/z)` on impedance edges. `Y*` is then the driving
/// point admittance matrix of the sources.
pub fn network_to_instance(spec: &NetworkSpec) -> Result<YProblemInstance> {
    spec.validate()?;
    let ne = spec.edges.len();
    let mt = spec.incidence_matrix().transpose();
    let svd = mt.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * smax)
        .collect();
    let basis_e = CMat::from_fn(ne, keep.len(), |r, c| Complex64::new(u[(r, keep[c])], 0.0));
    let sources = spec.source_edges();
    let mut basis_v = CMat::zeros(ne, sources.len());
    for (c, &e) in sources.iter().enumerate() {
        basis_v[(e, c)] = Complex64::new(1.0, 0.0);
    }
    let mut l = CMat::zeros(ne, ne);
    for (e, edge) in spec.edges.iter().enumerate() {
        if let Some(z) = edge.impedance {
            l[(e, e)] = 1.0 / z;
        }
    }
    YProblemInstance::new(basis_e, basis_v, l)
}

/// Converts a dense complex matrix to `[re, im]` rows for JSON output.
pub fn complex_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_loop() {
        let z = Complex64::new(2.0, 1.0);
        let spec = NetworkSpec {
            nodes: 2,
            edges: vec![
                NetworkEdge { from: 0, to: 1, kind: EdgeKind::Source, impedance: None },
                NetworkEdge { from: 0, to: 1, kind: EdgeKind::Impedance, impedance: Some(z) },
            ],
        };
        let y = extract_y_star(&network_to_instance(&spec).unwrap()).unwrap();
        assert!((y.matrix[(0, 0)] - 1.0 / z).norm() < 1e-14);
    }
}
