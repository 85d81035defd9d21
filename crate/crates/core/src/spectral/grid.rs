use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic box [−L, L)^N with M points per axis.
///
/// Sample j sits at x_j = −L + j·h, h = 2L/M. Frequencies are
/// ξ_k = (π/(2L))·(2k − M + σ) with σ = 1 when the half-cell offset is on
/// (the default), so that |ξ|² never vanishes and stays off the shells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub dim: usize,
    pub m: usize,
    pub half_width: f64,
    pub offset: bool,
}

impl SpectralGrid {
    pub fn new(dim: usize, m: usize, half_width: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedCase(format!("full grids support N in 1..=3, got {dim}")));
        }
        if m < 4 || !m.is_power_of_two() {
            return Err(Error::GridTooCoarse(format!("M = {m} must be a power of two >= 4")));
        }
        if !(half_width > 0.0) {
            return Err(Error::Domain(format!("half width must be positive, got {half_width}")));
        }
        Ok(Self { dim, m, half_width, offset: true })
    }

    pub fn with_offset(mut self, offset: bool) -> Self {
        self.offset = offset;
        self
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.m as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    /// Frequency-cell volume (π/L)^N.
    pub fn freq_cell_volume(&self) -> f64 {
        (PI / self.half_width).powi(self.dim as i32)
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.h()
    }

    fn sigma(&self) -> i64 {
        i64::from(self.offset)
    }

    /// Odd (offset) or even integer label 2k − M + σ of frequency index k.
    pub fn freq_label(&self, k: usize) -> i64 {
        2 * k as i64 - self.m as i64 + self.sigma()
    }

    pub fn xi(&self, k: usize) -> f64 {
        self.freq_label(k) as f64 * PI / (2.0 * self.half_width)
    }

    /// Largest |ξ| along an axis, π M/(2L).
    pub fn nyquist(&self) -> f64 {
        PI * self.m as f64 / (2.0 * self.half_width)
    }

    /// |ξ|² for an integer radius key Σ label².
    pub fn xi2_of_key(&self, key: usize) -> f64 {
        let s = PI / (2.0 * self.half_width);
        key as f64 * s * s
    }

    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for ax in (0..self.dim).rev() {
            out[ax] = idx % self.m;
            idx /= self.m;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi.iter().take(self.dim).fold(0, |acc, &k| acc * self.m + k)
    }

    /// Physical position of flat index `idx`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let mi = self.unravel(idx);
        let mut x = [0.0; 3];
        for ax in 0..self.dim {
            x[ax] = self.x(mi[ax]);
        }
        x
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.position(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Radius key Σ label² of a frequency flat index.
    pub fn key_of(&self, idx: usize) -> usize {
        let mi = self.unravel(idx);
        (0..self.dim)
            .map(|ax| {
                let l = self.freq_label(mi[ax]);
                (l * l) as usize
            })
            .sum()
    }

    /// Frequency vector of flat index `idx`.
    pub fn xi_vec(&self, idx: usize) -> [f64; 3] {
        let mi = self.unravel(idx);
        let mut xi = [0.0; 3];
        for ax in 0..self.dim {
            xi[ax] = self.xi(mi[ax]);
        }
        xi
    }

    pub fn key_table(&self) -> KeyTable {
        KeyTable::new(self)
    }

    /// min over lattice points of ||ξ|² − a| for each a.
    pub fn shell_clearance(&self, shells: &[f64]) -> f64 {
        let kt = self.key_table();
        let mut best = f64::INFINITY;
        for &key in &kt.keys {
            let s = self.xi2_of_key(key);
            for &a in shells {
                best = best.min((s - a).abs());
            }
        }
        best
    }

    /// Same grid with L scaled by `factor` (used by dilation checks).
    pub fn scaled(&self, factor: f64) -> Self {
        Self { half_width: self.half_width * factor, ..*self }
    }
}

/// Distinct lattice radii, keyed by the integer Σ label², with an O(1)
/// key → slot lookup. Radial multipliers are stored once per slot.
#[derive(Debug, Clone)]
pub struct KeyTable {
    pub keys: Vec<usize>,
    pub lookup: Vec<u32>,
    /// |ξ| for each slot.
    pub rho: Vec<f64>,
}

impl KeyTable {
    pub fn new(grid: &SpectralGrid) -> Self {
        let m = grid.m;
        let axis_sq: Vec<usize> = (0..m)
            .map(|k| {
                let l = grid.freq_label(k);
                (l * l) as usize
            })
            .collect();
        let max_sq = *axis_sq.iter().max().unwrap();
        let max_key = grid.dim * max_sq;
        // reachable sums of `dim` squares
        let mut present = vec![false; max_key + 1];
        let mut single = vec![false; max_sq + 1];
        for &s in &axis_sq {
            single[s] = true;
        }
        let singles: Vec<usize> = (0..=max_sq).filter(|&s| single[s]).collect();
        let mut cur = vec![false; max_key + 1];
        cur[0] = true;
        for _ in 0..grid.dim {
            let mut next = vec![false; max_key + 1];
            for (k, &on) in cur.iter().enumerate() {
                if on {
                    for &s in &singles {
                        if k + s <= max_key {
                            next[k + s] = true;
                        }
                    }
                }
            }
            cur = next;
        }
        present.copy_from_slice(&cur);
        let mut keys = Vec::new();
        let mut lookup = vec![u32::MAX; max_key + 1];
        for (k, &on) in present.iter().enumerate() {
            if on {
                lookup[k] = keys.len() as u32;
                keys.push(k);
            }
        }
        let rho = keys.iter().map(|&k| grid.xi2_of_key(k).sqrt()).collect();
        Self { keys, lookup, rho }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn slot(&self, key: usize) -> usize {
        self.lookup[key] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_lattice_is_symmetric_and_avoids_zero() {
        let g = SpectralGrid::new(2, 16, 3.0).unwrap();
        for k in 0..16 {
            assert!((g.xi(k) + g.xi(15 - k)).abs() < 1e-14);
            assert!(g.xi(k).abs() > 0.0);
        }
        let kt = g.key_table();
        assert!(kt.keys.iter().all(|&k| k % 8 == 2));
    }

    #[test]
    fn keys_cover_every_lattice_point() {
        let g = SpectralGrid::new(3, 8, 2.0).unwrap();
        let kt = g.key_table();
        for idx in 0..g.len() {
            let key = g.key_of(idx);
            let slot = kt.slot(key);
            assert_eq!(kt.keys[slot], key);
            let xi = g.xi_vec(idx);
            let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            assert!((kt.rho[slot] * kt.rho[slot] - r2).abs() < 1e-12);
        }
    }

    #[test]
    fn clearance_positive_with_offset() {
        let g = SpectralGrid::new(2, 128, 16.0).unwrap();
        let c = g.shell_clearance(&[1.0, -1.0]);
        assert!(c > 0.0);
        let g0 = g.with_offset(false);
        // plain lattice hits |ξ|² = 0
        assert_eq!(g0.shell_clearance(&[0.0]), 0.0);
    }

    #[test]
    fn ravel_roundtrip() {
        let g = SpectralGrid::new(3, 8, 1.0).unwrap();
        for idx in [0, 7, 63, 200, 511] {
            let mi = g.unravel(idx);
            assert_eq!(g.ravel(&mi), idx);
        }
    }
}
