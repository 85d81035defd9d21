//! Unitary discrete Fourier transform under the convention
//! f̂(ξ) = (2π)^{−N/2} ∫ f(x) e^{−ix·ξ} dx, evaluated on the grid lattice.

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use super::field::{Domain, Field};
use super::grid::{KeyTable, SpectralGrid};
use crate::error::Result;
use crate::par;

/// Lines transformed per parallel task.
const LINES_PER_TASK: usize = 64;

pub struct FftPlan {
    pub grid: SpectralGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// e^{2πi j c/M}, applied before the forward DFT
    pre: Vec<C64>,
    /// e^{iπ(k − c)}, applied after the forward DFT
    post: Vec<C64>,
    fwd_scale: f64,
    inv_scale: f64,
}

impl FftPlan {
    pub fn new(grid: SpectralGrid) -> Self {
        let m = grid.m;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let c = m as f64 / 2.0 - if grid.offset { 0.5 } else { 0.0 };
        let pre = (0..m).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 * c / m as f64)).collect();
        let post = (0..m).map(|k| C64::from_polar(1.0, PI * (k as f64 - c))).collect();
        let n = grid.dim as i32;
        let fwd_scale = (2.0 * PI).powf(-(n as f64) / 2.0) * grid.h().powi(n);
        let inv_scale = (2.0 * PI).powf(-(n as f64) / 2.0) * (PI / grid.half_width).powi(n);
        Self { grid, fwd, inv, pre, post, fwd_scale, inv_scale }
    }

    /// In-place forward transform of physical samples.
    pub fn forward_in_place(&self, data: &mut [C64]) {
        apply_separable(data, &self.grid, &self.pre, false, self.fwd_scale);
        fft_all_axes(data, &self.grid, &self.fwd);
        apply_separable(data, &self.grid, &self.post, false, 1.0);
    }

    /// In-place inverse transform of frequency samples.
    pub fn inverse_in_place(&self, data: &mut [C64]) {
        apply_separable(data, &self.grid, &self.post, true, self.inv_scale);
        fft_all_axes(data, &self.grid, &self.inv);
        apply_separable(data, &self.grid, &self.pre, true, 1.0);
    }

    pub fn forward(&self, f: &Field) -> Result<Field> {
        f.expect(Domain::Physical)?;
        let mut v = f.values.clone();
        self.forward_in_place(&mut v);
        Ok(Field { grid: f.grid, values: v, domain: Domain::Frequency })
    }

    pub fn inverse(&self, f: &Field) -> Result<Field> {
        f.expect(Domain::Frequency)?;
        let mut v = f.values.clone();
        self.inverse_in_place(&mut v);
        Ok(Field { grid: f.grid, values: v, domain: Domain::Physical })
    }

    /// u = F^{-1}[ m(|ξ|) · F f ] for a radial multiplier tabulated per key slot.
    pub fn apply_radial(&self, data: &mut [C64], keys: &KeyTable, table: &[C64]) {
        self.forward_in_place(data);
        multiply_radial(data, &self.grid, keys, table);
        self.inverse_in_place(data);
    }

    /// Real radial multiplier acting on a real field, returning the real part.
    pub fn apply_radial_real(&self, f: &[f64], keys: &KeyTable, table: &[f64]) -> Vec<f64> {
        let mut data: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.forward_in_place(&mut data);
        multiply_radial_real(&mut data, &self.grid, keys, table);
        self.inverse_in_place(&mut data);
        data.iter().map(|z| z.re).collect()
    }
}

/// Multiply by Π_axis v[index] (or its conjugate) times `scale`.
fn apply_separable(data: &mut [C64], grid: &SpectralGrid, v: &[C64], conj: bool, scale: f64) {
    let m = grid.m;
    let dim = grid.dim;
    let vv: Vec<C64> = if conj { v.iter().map(|z| z.conj()).collect() } else { v.to_vec() };
    par::for_each_chunk_mut(data, m, |row, line| {
        // leading axes of this row
        let mut f = C64::new(scale, 0.0);
        let mut r = row;
        for _ in 0..dim - 1 {
            f *= vv[r % m];
            r /= m;
        }
        for (z, w) in line.iter_mut().zip(vv.iter()) {
            *z *= f * w;
        }
    });
}

pub(crate) fn fft_all_axes(data: &mut [C64], grid: &SpectralGrid, fft: &Arc<dyn Fft<f64>>) {
    let m = grid.m;
    let dim = grid.dim;
    // last axis: contiguous lines
    par::for_each_chunk_mut(data, m * LINES_PER_TASK, |_, chunk| fft.process(chunk));
    if dim == 1 {
        return;
    }
    let mut buf = vec![C64::new(0.0, 0.0); data.len()];
    for axis in 0..dim - 1 {
        let stride = m.pow((dim - 1 - axis) as u32);
        let block = m * stride;
        let tb = &mut buf[..block];
        for blk in data.chunks_mut(block) {
            // gather columns of this block into contiguous lines
            {
                let src: &[C64] = blk;
                par::for_each_chunk_mut(tb, m, |c, line| {
                    for (i, z) in line.iter_mut().enumerate() {
                        *z = src[i * stride + c];
                    }
                });
            }
            par::for_each_chunk_mut(tb, m * LINES_PER_TASK, |_, chunk| fft.process(chunk));
            {
                let src: &[C64] = tb;
                par::for_each_chunk_mut(blk, stride, |i, row| {
                    for (c, z) in row.iter_mut().enumerate() {
                        *z = src[c * m + i];
                    }
                });
            }
        }
    }
}

/// Multiply frequency samples by a complex radial table.
pub fn multiply_radial(data: &mut [C64], grid: &SpectralGrid, keys: &KeyTable, table: &[C64]) {
    let m = grid.m;
    let labels: Vec<usize> = (0..m).map(|k| (grid.freq_label(k) * grid.freq_label(k)) as usize).collect();
    let dim = grid.dim;
    par::for_each_chunk_mut(data, m, |row, line| {
        let mut base = 0usize;
        let mut r = row;
        for _ in 0..dim - 1 {
            base += labels[r % m];
            r /= m;
        }
        for (z, l) in line.iter_mut().zip(labels.iter()) {
            *z *= table[keys.slot(base + l)];
        }
    });
}

pub fn multiply_radial_real(data: &mut [C64], grid: &SpectralGrid, keys: &KeyTable, table: &[f64]) {
    let m = grid.m;
    let labels: Vec<usize> = (0..m).map(|k| (grid.freq_label(k) * grid.freq_label(k)) as usize).collect();
    let dim = grid.dim;
    par::for_each_chunk_mut(data, m, |row, line| {
        let mut base = 0usize;
        let mut r = row;
        for _ in 0..dim - 1 {
            base += labels[r % m];
            r /= m;
        }
        for (z, l) in line.iter_mut().zip(labels.iter()) {
            *z *= table[keys.slot(base + l)];
        }
    });
}
