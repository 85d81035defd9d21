//! Radially truncated Green kernels and their exact lattice transforms.
//!
//! For a ≥ 0 the multiplier of the shell resolvent is the Fourier transform of
//! χ·g_{a+iε}, where χ(r) = 1 for r ≤ T0, 0 for r ≥ T1 and C^∞ in between.
//! Since (−Δ − a − iε)(χ g) = δ − h with h = 2χ′g′ + (χ″ + (N−1)χ′/r) g,
//! the transform is (1 − ĥ(ξ)) / (|ξ|² − a − iε), ĥ being a radial integral
//! over the transition shell only.

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::green::{green_c, green_dr_c, wavenumber};
use crate::kernels::special::{sphere_area, sphere_average};
use crate::par;
use crate::spectral::{KeyTable, SpectralGrid};

/// Smallest admissible width T1 − T0 of the transition shell.
pub const MIN_TRANSITION: f64 = 0.25;

/// C^∞ step: 0 for t ≤ 0, 1 for t ≥ 1. Returns (S, S′, S″).
pub fn smooth_step(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let u = 1.0 - t;
    // S = A/(A+B), A = e^{−1/t}, B = e^{−1/u}
    let e = 1.0 / t - 1.0 / u;
    let s = if e > 0.0 {
        let x = (-e).exp();
        x / (1.0 + x)
    } else {
        1.0 / (1.0 + e.exp())
    };
    let p = s * (1.0 - s);
    let q = 1.0 / (t * t) + 1.0 / (u * u);
    let dq = -2.0 / (t * t * t) + 2.0 / (u * u * u);
    let dlogp = 1.0 / (t * t) - 1.0 / (u * u) - 2.0 * (s / (t * t) - (1.0 - s) / (u * u));
    let s1 = p * q;
    let s2 = p * (dlogp * q + dq);
    (s, s1, s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub t0: f64,
    pub t1: f64,
}

impl Truncation {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0 > 0.0) || !(t1 - t0 >= MIN_TRANSITION) {
            return Err(Error::Geometry(format!(
                "need 0 < T0 and T1 - T0 >= {MIN_TRANSITION}, got T0 = {t0:.4}, T1 = {t1:.4}"
            )));
        }
        Ok(Self { t0, t1 })
    }

    pub fn width(&self) -> f64 {
        self.t1 - self.t0
    }

    /// (χ, χ′, χ″) at radius r.
    pub fn cutoff(&self, r: f64) -> (f64, f64, f64) {
        let w = self.width();
        let (s, s1, s2) = smooth_step((r - self.t0) / w);
        (1.0 - s, -s1 / w, -s2 / (w * w))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { t0: self.t0 * factor, t1: self.t1 * factor }
    }
}

/// Observation region on which truncated and free-space operators agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Window {
    /// |x|_∞ ≤ W
    Cube(f64),
    /// |x| ≤ ρ
    Ball(f64),
}

impl Window {
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Window::Cube(w) => x.iter().all(|t| t.abs() <= w),
            Window::Ball(r) => x.iter().map(|t| t * t).sum::<f64>() <= r * r,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            Window::Cube(w) => Window::Cube(w * factor),
            Window::Ball(r) => Window::Ball(r * factor),
        }
    }

    /// Largest Euclidean radius of a window point.
    pub fn outer_radius(&self, dim: usize) -> f64 {
        match *self {
            Window::Cube(w) => (dim as f64).sqrt() * w,
            Window::Ball(r) => r,
        }
    }

    /// Largest coordinate of a window point.
    pub fn axis_extent(&self) -> f64 {
        match *self {
            Window::Cube(w) => w,
            Window::Ball(r) => r,
        }
    }
}

/// Source ball, observation window and the truncation radii they induce.
///
/// For sources in the ball of radius s and observation points x in the window,
/// every direct separation is ≤ T0 and every periodic image is ≥ T1 away, so
/// the truncated periodic convolution equals the free-space one on the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub window: Window,
    pub source_radius: f64,
    pub trunc: Truncation,
}

impl Geometry {
    pub fn new(grid: &SpectralGrid, window: Window, source_radius: f64) -> Result<Self> {
        let l = grid.half_width;
        let t0 = window.outer_radius(grid.dim) + source_radius;
        let t1 = 2.0 * l - window.axis_extent() - source_radius;
        let trunc = Truncation::new(t0, t1).map_err(|_| {
            Error::Geometry(format!(
                "window {window:?} with source radius {source_radius:.3} leaves no transition shell in a box of half width {l} (T0 = {t0:.3}, T1 = {t1:.3})"
            ))
        })?;
        Ok(Self { window, source_radius, trunc })
    }

    /// Cube window of half-width `fraction`·L.
    pub fn cube(grid: &SpectralGrid, fraction: f64, source_radius: f64) -> Result<Self> {
        Self::new(grid, Window::Cube(fraction * grid.half_width), source_radius)
    }

    pub fn window_mask(&self, grid: &SpectralGrid) -> Vec<bool> {
        par::map_range(grid.len(), |i| {
            let x = grid.position(i);
            self.window.contains(&x[..grid.dim])
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            window: self.window.scaled(factor),
            source_radius: self.source_radius * factor,
            trunc: self.trunc.scaled(factor),
        }
    }
}

/// Radius beyond which |f| stays below `rel_tol`·max|f|.
pub fn support_radius(grid: &SpectralGrid, values: &[C64], rel_tol: f64) -> f64 {
    let peak = par::max_range(values.len(), |i| values[i].norm());
    if peak == 0.0 {
        return 0.0;
    }
    let thr = rel_tol * peak;
    par::max_range(values.len(), |i| if values[i].norm() > thr { grid.radius(i) } else { 0.0 })
}

/// Number of Gauss–Legendre nodes across the transition shell.
fn node_count(trunc: &Truncation, rho_max: f64, k: f64) -> usize {
    let phase = (rho_max + k) * trunc.width();
    ((1.2 * phase) as usize + 200).clamp(300, 6000)
}

/// Lattice multiplier of the single-shell resolvent R_{a+iε}, one value per key slot.
pub fn shell_multiplier(a: f64, eps: f64, grid: &SpectralGrid, keys: &KeyTable, trunc: &Truncation) -> Vec<C64> {
    let ac = C64::new(a, eps);
    if a < 0.0 {
        return keys.rho.iter().map(|&rho| 1.0 / (rho * rho - ac)).collect();
    }
    let dim = grid.dim;
    let rho_max = keys.rho.iter().cloned().fold(0.0, f64::max);
    let k = wavenumber(ac).norm();
    let n = node_count(trunc, rho_max, k);
    let rule = GaussLegendre::new(n).expect("node count >= 2");
    let half = 0.5 * trunc.width();
    let mid = 0.5 * (trunc.t0 + trunc.t1);
    let area = sphere_area(dim);
    let nodes: Vec<(f64, C64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| {
            let r = mid + half * x;
            let (_, c1, c2) = trunc.cutoff(r);
            let g = green_c(ac, r, dim);
            let dg = green_dr_c(ac, r, dim);
            let h = 2.0 * c1 * dg + (c2 + (dim as f64 - 1.0) * c1 / r) * g;
            (r, h * (w * half * area * r.powi(dim as i32 - 1)))
        })
        .collect();
    par::map_range(keys.len(), |s| {
        let rho = keys.rho[s];
        let mut c = C64::new(0.0, 0.0);
        for &(r, wh) in &nodes {
            c += wh * sphere_average(dim, rho * r);
        }
        (1.0 - c) / (rho * rho - ac)
    })
}
