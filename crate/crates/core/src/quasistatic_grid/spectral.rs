//! Periodic projection onto gradient fields, applied spectrally.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Discrete frequency used by the projector along one axis. The Nyquist
/// index maps to zero so the projector stays real and symmetric.
pub fn modified_frequency(index: usize, n: usize) -> f64 {
    let half = n / 2;
    if n % 2 == 0 && index == half {
        0.0
    } else if index < half || (n % 2 == 1 && index == half) {
        index as f64
    } else {
        index as f64 - n as f64
    }
}

/// n-dimensional FFT built from one-dimensional transforms applied axis by axis.
pub(crate) struct NdFft {
    n: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    lines: Vec<Complex64>,
}

impl NdFft {
    pub fn new(n: usize, dim: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        NdFft {
            n,
            dim,
            forward,
            inverse,
            scratch: vec![Complex64::default(); scratch_len],
            lines: vec![Complex64::default(); n.pow(dim as u32)],
        }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn forward(&mut self, data: &mut [Complex64]) {
        let fft = self.forward.clone();
        self.transform(data, fft.as_ref());
    }

    /// Inverse transform including the 1/N normalisation.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let fft = self.inverse.clone();
        self.transform(data, fft.as_ref());
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    fn transform(&mut self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.n;
        debug_assert_eq!(data.len(), self.len());
        fft.process_with_scratch(data, &mut self.scratch);
        for axis in 0..self.dim - 1 {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = n * stride;
            let outer = data.len() / block;
            let mut line = 0;
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * block + inner;
                    let dst = &mut self.lines[line * n..(line + 1) * n];
                    for (k, slot) in dst.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    line += 1;
                }
            }
            fft.process_with_scratch(&mut self.lines, &mut self.scratch);
            let mut line = 0;
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * block + inner;
                    let src = &self.lines[line * n..(line + 1) * n];
                    for (k, value) in src.iter().enumerate() {
                        data[base + k * stride] = *value;
                    }
                    line += 1;
                }
            }
        }
    }
}

/// The operator `M Gamma M` restricted to the pixels of a mask, acting on
/// vector fields stored component-major (`comp * m + pixel`).
pub(crate) struct RestrictedProjector {
    n: usize,
    dim: usize,
    pixels: Vec<usize>,
    freq: Vec<f64>,
    fft: NdFft,
    grids: Vec<Vec<Complex64>>,
}

impl RestrictedProjector {
    pub fn new(n: usize, dim: usize, pixels: Vec<usize>) -> Self {
        let fft = NdFft::new(n, dim);
        let freq = (0..n).map(|i| modified_frequency(i, n)).collect();
        RestrictedProjector {
            n,
            dim,
            pixels,
            freq,
            fft,
            grids: Vec::new(),
        }
    }

    pub fn unknowns(&self) -> usize {
        self.dim * self.pixels.len()
    }

    fn ensure_grids(&mut self, count: usize) {
        let len = self.fft.len();
        while self.grids.len() < count {
            self.grids.push(vec![Complex64::default(); len]);
        }
    }

    fn mirror(&self, flat: usize) -> usize {
        let n = self.n;
        let mut rem = flat;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.dim {
            let i = rem % n;
            rem /= n;
            out += ((n - i) % n) * place;
            place *= n;
        }
        out
    }

    fn xi(&self, flat: usize, out: &mut [f64; 3]) -> f64 {
        let n = self.n;
        let mut rem = flat;
        let mut norm2 = 0.0;
        for axis in (0..self.dim).rev() {
            let f = self.freq[rem % n];
            rem /= n;
            out[axis] = f;
            norm2 += f * f;
        }
        norm2
    }

    /// `out = M Gamma M input`.
    pub fn apply(&mut self, input: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        let m = self.pixels.len();
        let has_imag = input.iter().any(|z| z.im != 0.0);
        // Real fields: d real parts, then d imaginary parts when present.
        let nfields = if has_imag { 2 * d } else { d };
        let npairs = nfields.div_ceil(2);
        self.ensure_grids(npairs);

        let field_value = |field: usize, p: usize| -> f64 {
            let z = input[(field % d) * m + p];
            if field < d { z.re } else { z.im }
        };

        for pair in 0..npairs {
            let grid = &mut self.grids[pair];
            grid.iter_mut().for_each(|z| *z = Complex64::default());
            for (p, &pix) in self.pixels.iter().enumerate() {
                let re = field_value(2 * pair, p);
                let im = if 2 * pair + 1 < nfields { field_value(2 * pair + 1, p) } else { 0.0 };
                grid[pix] = Complex64::new(re, im);
            }
        }
        for pair in 0..npairs {
            let mut grid = std::mem::take(&mut self.grids[pair]);
            self.fft.forward(&mut grid);
            self.grids[pair] = grid;
        }

        // Unpack spectra, project each group of d fields, repack.
        let len = self.fft.len();
        let groups = nfields / d;
        let mut spec = vec![Complex64::default(); nfields];
        let mut xi = [0.0; 3];
        let half = Complex64::new(0.5, 0.0);
        let minus_half_i = Complex64::new(0.0, -0.5);
        let mut packed: Vec<Vec<Complex64>> = (0..npairs).map(|_| vec![Complex64::default(); len]).collect();
        for k in 0..len {
            let km = self.mirror(k);
            for pair in 0..npairs {
                let zk = self.grids[pair][k];
                let zm = self.grids[pair][km].conj();
                spec[2 * pair] = half * (zk + zm);
                if 2 * pair + 1 < nfields {
                    spec[2 * pair + 1] = minus_half_i * (zk - zm);
                }
            }
            let norm2 = self.xi(k, &mut xi);
            for g in 0..groups {
                let block = &mut spec[g * d..(g + 1) * d];
                if norm2 == 0.0 {
                    block.iter_mut().for_each(|z| *z = Complex64::default());
                } else {
                    let s: Complex64 = block.iter().zip(&xi[..d]).map(|(z, x)| z * x).sum::<Complex64>() / norm2;
                    for (z, x) in block.iter_mut().zip(&xi[..d]) {
                        *z = s * x;
                    }
                }
            }
            for pair in 0..npairs {
                let im = if 2 * pair + 1 < nfields { spec[2 * pair + 1] } else { Complex64::default() };
                packed[pair][k] = spec[2 * pair] + Complex64::i() * im;
            }
        }

        out.iter_mut().for_each(|z| *z = Complex64::default());
        for (pair, mut grid) in packed.into_iter().enumerate() {
            self.fft.inverse(&mut grid);
            for (p, &pix) in self.pixels.iter().enumerate() {
                let z = grid[pix];
                for (field, value) in [(2 * pair, z.re), (2 * pair + 1, z.im)] {
                    if field >= nfields {
                        continue;
                    }
                    let slot = &mut out[(field % d) * m + p];
                    if field < d {
                        slot.re += value;
                    } else {
                        slot.im += value;
                    }
                }
            }
        }
    }
}
