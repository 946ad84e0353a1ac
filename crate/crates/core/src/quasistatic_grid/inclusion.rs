use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Boolean pixel (voxel) mask of an inclusion inside a periodic cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelInclusion {
    n: usize,
    dim: usize,
    mask: Vec<bool>,
    cell_length: f64,
}

/// Procedural shapes, centred in the cell. `fill` is the target area
/// (volume) fraction; the realised fraction differs by rasterisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProceduralShape {
    Disk { fill: f64 },
    Square { fill: f64 },
    /// Semi-axes in ratio `aspect` (x over y).
    Ellipse { fill: f64, aspect: f64 },
    Ball { fill: f64 },
    Cube { fill: f64 },
}

impl ProceduralShape {
    pub fn dim(&self) -> usize {
        match self {
            ProceduralShape::Ball { .. } | ProceduralShape::Cube { .. } => 3,
            _ => 2,
        }
    }

    pub fn fill(&self) -> f64 {
        match *self {
            ProceduralShape::Disk { fill }
            | ProceduralShape::Square { fill }
            | ProceduralShape::Ellipse { fill, .. }
            | ProceduralShape::Ball { fill }
            | ProceduralShape::Cube { fill } => fill,
        }
    }

    pub fn with_fill(&self, fill: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            ProceduralShape::Disk { fill: f }
            | ProceduralShape::Square { fill: f }
            | ProceduralShape::Ellipse { fill: f, .. }
            | ProceduralShape::Ball { fill: f }
            | ProceduralShape::Cube { fill: f } => *f = fill,
        }
        out
    }

    pub fn rasterize(&self, n: usize) -> Result<PixelInclusion> {
        let fill = self.fill();
        if !(fill > 0.0 && fill < 1.0) {
            return Err(Error::domain("fill fraction must lie in (0, 1)"));
        }
        let nf = n as f64;
        match *self {
            ProceduralShape::Disk { fill } => {
                let r = nf * (fill / std::f64::consts::PI).sqrt();
                PixelInclusion::from_fn(n, 2, |x| x[0] * x[0] + x[1] * x[1] <= r * r)
            }
            ProceduralShape::Ellipse { fill, aspect } => {
                if !(aspect > 0.0) {
                    return Err(Error::domain("aspect ratio must be positive"));
                }
                let b = nf * (fill / (std::f64::consts::PI * aspect)).sqrt();
                let a = aspect * b;
                PixelInclusion::from_fn(n, 2, |x| (x[0] / a).powi(2) + (x[1] / b).powi(2) <= 1.0)
            }
            ProceduralShape::Square { fill } => {
                let half = even_side(nf * fill.sqrt()) / 2.0;
                PixelInclusion::from_fn(n, 2, |x| x[0].abs() < half && x[1].abs() < half)
            }
            ProceduralShape::Ball { fill } => {
                let r = nf * (3.0 * fill / (4.0 * std::f64::consts::PI)).cbrt();
                PixelInclusion::from_fn(n, 3, |x| x.iter().map(|c| c * c).sum::<f64>() <= r * r)
            }
            ProceduralShape::Cube { fill } => {
                let half = even_side(nf * fill.cbrt()) / 2.0;
                PixelInclusion::from_fn(n, 3, |x| x.iter().all(|c| c.abs() < half))
            }
        }
    }
}

fn even_side(side: f64) -> f64 {
    (2.0 * (side / 2.0).round()).max(2.0)
}

impl PixelInclusion {
    pub fn from_mask(n: usize, dim: usize, mask: Vec<bool>, cell_length: f64) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::domain(format!("grid size {n} must be a power of two, at least 4")));
        }
        if dim == 3 && n > 128 {
            return Err(Error::domain("three-dimensional grids are limited to n = 128"));
        }
        if mask.len() != n.pow(dim as u32) {
            return Err(Error::domain("mask length does not match n^dim"));
        }
        if !(cell_length > 0.0 && cell_length.is_finite()) {
            return Err(Error::domain("cell length must be positive"));
        }
        let inc = PixelInclusion { n, dim, mask, cell_length };
        inc.check_guard()?;
        Ok(inc)
    }

    /// Pixel centres are passed in pixel units relative to the cell centre.
    pub fn from_fn(n: usize, dim: usize, inside: impl Fn(&[f64]) -> bool) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let total = n.pow(dim as u32);
        let centre = n as f64 / 2.0;
        let mut x = vec![0.0; dim];
        let mask = (0..total)
            .map(|flat| {
                let mut rem = flat;
                for axis in (0..dim).rev() {
                    x[axis] = (rem % n) as f64 + 0.5 - centre;
                    rem /= n;
                }
                inside(&x)
            })
            .collect();
        PixelInclusion::from_mask(n, dim, mask, 1.0)
    }

    /// Plain (P1) or raw (P4) portable bitmap; 1 marks the inclusion.
    pub fn from_pbm(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let magic = pbm_token(bytes, &mut pos)?;
        let width = pbm_number(bytes, &mut pos)?;
        let height = pbm_number(bytes, &mut pos)?;
        if width != height {
            return Err(Error::domain(format!("bitmap is {width}x{height}; the cell must be square")));
        }
        let n = width;
        let mut mask = Vec::with_capacity(n * n);
        match magic.as_str() {
            "P1" => {
                while mask.len() < n * n {
                    skip_space(bytes, &mut pos);
                    match bytes.get(pos) {
                        Some(b'0') => mask.push(false),
                        Some(b'1') => mask.push(true),
                        Some(c) => return Err(Error::domain(format!("unexpected byte {c} in bitmap"))),
                        None => return Err(Error::domain("bitmap ends early")),
                    }
                    pos += 1;
                }
            }
            "P4" => {
                pos += 1;
                let row_bytes = n.div_ceil(8);
                let data = bytes.get(pos..pos + row_bytes * n).ok_or_else(|| Error::domain("bitmap ends early"))?;
                for row in data.chunks(row_bytes) {
                    for col in 0..n {
                        mask.push(row[col / 8] & (0x80 >> (col % 8)) != 0);
                    }
                }
            }
            other => return Err(Error::domain(format!("unsupported bitmap magic {other:?}"))),
        }
        PixelInclusion::from_mask(n, 2, mask, 1.0)
    }

    /// `.npy` array of dtype bool or uint8, C order, 2-D or 3-D and cubic.
    pub fn from_npy(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 10 || &bytes[..6] != b"\x93NUMPY" {
            return Err(Error::domain("not an npy file"));
        }
        let (header_len, start) = match bytes[6] {
            1 => (u16::from_le_bytes([bytes[8], bytes[9]]) as usize, 10),
            2 | 3 if bytes.len() >= 12 => (u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize, 12),
            v => return Err(Error::domain(format!("unsupported npy version {v}"))),
        };
        let header = bytes
            .get(start..start + header_len)
            .and_then(|h| std::str::from_utf8(h).ok())
            .ok_or_else(|| Error::domain("bad npy header"))?;
        if !(header.contains("'|b1'") || header.contains("'|u1'")) {
            return Err(Error::domain("npy mask must have dtype bool or uint8"));
        }
        if header.contains("'fortran_order': True") {
            return Err(Error::domain("npy mask must be C ordered"));
        }
        let shape_str = header
            .split("'shape':")
            .nth(1)
            .and_then(|s| s.split('(').nth(1))
            .and_then(|s| s.split(')').next())
            .ok_or_else(|| Error::domain("npy header has no shape"))?;
        let shape: Vec<usize> = shape_str
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| Error::domain("bad npy shape")))
            .collect::<Result<_>>()?;
        let dim = shape.len();
        if !(dim == 2 || dim == 3) || shape.iter().any(|&s| s != shape[0]) {
            return Err(Error::domain(format!("npy mask shape {shape:?} must be square or cubic")));
        }
        let n = shape[0];
        let data = bytes
            .get(start + header_len..start + header_len + n.pow(dim as u32))
            .ok_or_else(|| Error::domain("npy data ends early"))?;
        PixelInclusion::from_mask(n, dim, data.iter().map(|&b| b != 0).collect(), 1.0)
    }

    pub fn with_cell_length(mut self, cell_length: f64) -> Result<Self> {
        if !(cell_length > 0.0 && cell_length.is_finite()) {
            return Err(Error::domain("cell length must be positive"));
        }
        self.cell_length = cell_length;
        Ok(self)
    }

    fn check_guard(&self) -> Result<()> {
        let n = self.n;
        let (lo, hi) = (n / 4, 3 * n / 4);
        let mut any = false;
        for (flat, &m) in self.mask.iter().enumerate() {
            if !m {
                continue;
            }
            any = true;
            let mut rem = flat;
            for _ in 0..self.dim {
                let i = rem % n;
                rem /= n;
                if i < lo || i >= hi {
                    return Err(Error::domain(format!(
                        "inclusion reaches pixel index {i}; it must stay within [{lo}, {hi}) on every axis"
                    )));
                }
            }
        }
        if !any {
            return Err(Error::domain("mask has no inclusion pixels"));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn cell_length(&self) -> f64 {
        self.cell_length
    }

    pub fn pixel_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn pixels(&self) -> Vec<usize> {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect()
    }

    pub fn fill_fraction(&self) -> f64 {
        self.pixel_count() as f64 / self.mask.len() as f64
    }

    /// Physical inclusion volume |Omega|.
    pub fn volume(&self) -> f64 {
        self.fill_fraction() * self.cell_length.powi(self.dim as i32)
    }
}

fn skip_space(bytes: &[u8], pos: &mut usize) {
    while let Some(&c) = bytes.get(*pos) {
        if c == b'#' {
            while bytes.get(*pos).is_some_and(|&c| c != b'\n') {
                *pos += 1;
            }
        } else if c.is_ascii_whitespace() {
            *pos += 1;
        } else {
            break;
        }
    }
}

fn pbm_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    skip_space(bytes, pos);
    let start = *pos;
    while bytes.get(*pos).is_some_and(|c| !c.is_ascii_whitespace()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::domain("bitmap header truncated"));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn pbm_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    pbm_token(bytes, pos)?
        .parse()
        .map_err(|_| Error::domain("bitmap header has a bad dimension"))
}
