//! Off-lattice Fourier samples f̂(ρω) on spheres by direct nonuniform summation.

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{Domain, Field};

/// Direction sets with surface quadrature weights.
///
/// N = 2: `n_azimuth` equiangular angles θ_j = 2πj/n.
/// N = 3: Gauss–Legendre nodes in cos θ (`n_polar`) times uniform φ
/// (`n_azimuth`), polar-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Directions {
    pub dim: usize,
    pub n_polar: usize,
    pub n_azimuth: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// cos θ of each polar ring (N = 3)
    pub polar_nodes: Vec<f64>,
}

impl Directions {
    pub fn circle(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::Domain(format!("need at least 4 directions, got {n}")));
        }
        let points = (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        Ok(Self {
            dim: 2,
            n_polar: 1,
            n_azimuth: n,
            points,
            weights: vec![2.0 * PI / n as f64; n],
            polar_nodes: vec![],
        })
    }

    pub fn sphere(n_polar: usize, n_azimuth: usize) -> Result<Self> {
        if n_polar < 2 || n_azimuth < 4 {
            return Err(Error::Domain(format!("sphere raster {n_polar} x {n_azimuth} too small")));
        }
        let rule = GaussLegendre::new(n_polar).map_err(|e| Error::QuadratureFailure(e.to_string()))?;
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        let dphi = 2.0 * PI / n_azimuth as f64;
        for &(ct, w) in &pairs {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for j in 0..n_azimuth {
                let phi = j as f64 * dphi;
                points.push([st * phi.cos(), st * phi.sin(), ct]);
                weights.push(w * dphi);
            }
        }
        let polar_nodes = pairs.iter().map(|p| p.0).collect();
        Ok(Self { dim: 3, n_polar, n_azimuth, points, weights, polar_nodes })
    }

    /// 256 angles in N = 2, 32 × 64 in N = 3.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::with_refinement(dim, 1)
    }

    /// Standard counts multiplied by `factor` along each angular axis.
    pub fn with_refinement(dim: usize, factor: usize) -> Result<Self> {
        match dim {
            2 => Self::circle(256 * factor),
            3 => Self::sphere(32 * factor, 64 * factor),
            _ => Err(Error::UnsupportedCase(format!("direction sets exist for N in {{2, 3}}, got {dim}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the antipodal direction, when the raster contains it.
    pub fn antipode(&self, i: usize) -> usize {
        match self.dim {
            2 => (i + self.n_azimuth / 2) % self.n_azimuth,
            _ => {
                let (ip, ja) = (i / self.n_azimuth, i % self.n_azimuth);
                let jp = self.n_polar - 1 - ip;
                jp * self.n_azimuth + (ja + self.n_azimuth / 2) % self.n_azimuth
            }
        }
    }

    /// ∫_{S^{N−1}} |g|² dσ for samples g on this raster.
    pub fn integrate_sq(&self, g: &[C64]) -> f64 {
        g.iter().zip(&self.weights).map(|(z, w)| z.norm_sqr() * w).sum()
    }
}

/// f̂(ρω) = (2π)^{−N/2} h^N Σ_j f(x_j) e^{−iρω·x_j} for every direction ω.
pub fn sphere_restriction(f: &Field, radius: f64, dirs: &Directions) -> Result<Vec<C64>> {
    f.expect(Domain::Physical)?;
    let grid = f.grid;
    if grid.dim != dirs.dim {
        return Err(Error::GridMismatch(format!("field N = {}, directions N = {}", grid.dim, dirs.dim)));
    }
    let nyq = grid.nyquist();
    if !(radius.abs() < nyq) {
        return Err(Error::NyquistViolation { radius, nyquist: nyq });
    }
    let m = grid.m;
    let dim = grid.dim;
    let xs: Vec<f64> = (0..m).map(|j| grid.x(j)).collect();
    let rows = grid.len() / m;
    let live: Vec<usize> =
        (0..rows).filter(|&r| f.values[r * m..(r + 1) * m].iter().any(|z| z.norm_sqr() > 0.0)).collect();
    let scale = (2.0 * PI).powf(-(dim as f64) / 2.0) * grid.cell_volume();
    Ok(par::map_range(dirs.len(), |d| {
        let w = dirs.points[d];
        let phase: Vec<Vec<C64>> =
            (0..dim).map(|ax| xs.iter().map(|&x| C64::from_polar(1.0, -radius * w[ax] * x)).collect()).collect();
        let last = &phase[dim - 1];
        let mut acc = C64::new(0.0, 0.0);
        for &r in &live {
            let line = &f.values[r * m..(r + 1) * m];
            let mut s = C64::new(0.0, 0.0);
            for (z, e) in line.iter().zip(last) {
                s += z * e;
            }
            // leading axes of this row
            let mut rr = r;
            for ax in (0..dim - 1).rev() {
                s *= phase[ax][rr % m];
                rr /= m;
            }
            acc += s;
        }
        acc * scale
    }))
}
