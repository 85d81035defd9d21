//! Re G ∗ f for radial f by one-dimensional reduction, any N ≥ 2.
//!
//! For |x| = r the convolution is
//!   u(r) = |S^{N−1}| ∫_0^S f(ρ) ρ^{N−1} M(r, ρ) dρ,
//! where M(r, ρ) is the mean of Re G(|x − y|) over the sphere |y| = ρ:
//!   M(r, ρ) = c_N ∫_0^π Re G(t(θ)) sin^{N−2}θ dθ,  c_N = |S^{N−2}|/|S^{N−1}|,
//!   t(θ)² = (r − ρ)² + 4rρ sin²(θ/2).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::quad::integrate;
use crate::error::{Error, Result};
use crate::kernels::special::sphere_area;
use crate::kernels::{quartic_green, quartic_green_at_zero, ProblemParams};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialQuadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for RadialQuadrature {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-16 }
    }
}

/// Radial samples (r_i, f_i), cubic Hermite between knots and zero beyond
/// the last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r.len() < 2 || r.len() != values.len() || r[0] < 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("profile needs >= 2 samples on increasing nonnegative radii".into()));
        }
        Ok(Self { r, values })
    }

    pub fn from_fn(r: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = r.iter().map(|&x| f(x)).collect();
        Self::new(r, values)
    }

    pub fn support(&self) -> f64 {
        *self.r.last().unwrap()
    }

    fn slope(&self, i: usize) -> f64 {
        let n = self.r.len();
        let (a, b) = if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        (self.values[b] - self.values[a]) / (self.r[b] - self.r[a])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x < self.r[0] {
            return self.values[0];
        }
        if x > self.r[n - 1] {
            return 0.0;
        }
        let j = self.r.partition_point(|&k| k <= x).clamp(1, n - 1);
        let (x0, x1) = (self.r[j - 1], self.r[j]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[j - 1] + h10 * h * self.slope(j - 1) + h01 * self.values[j] + h11 * h * self.slope(j)
    }
}

fn re_green(params: &ProblemParams, t: f64) -> f64 {
    if t == 0.0 {
        return quartic_green_at_zero(params).map(|z| z.re).unwrap_or(f64::NAN);
    }
    quartic_green(params, t).map(|z| z.re).unwrap_or(f64::NAN)
}

/// Mean of Re G(|x − y|) over |y| = ρ for |x| = r.
pub fn spherical_mean_re_g(params: &ProblemParams, r: f64, rho: f64, quad: &RadialQuadrature) -> Result<f64> {
    if !(r >= 0.0 && rho >= 0.0) {
        return Err(Error::Domain(format!("radii must be nonnegative, got {r}, {rho}")));
    }
    if r == 0.0 || rho == 0.0 {
        let v = re_green(params, r.max(rho));
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::QuadratureFailure(format!("Re G is unbounded at 0 for N = {}", params.dim)))
        };
    }
    let n = params.dim;
    let c = sphere_area(n - 1) / sphere_area(n);
    let d2 = (r - rho) * (r - rho);
    let rr = 4.0 * r * rho;
    let integrand = |th: f64| {
        let s = (0.5 * th).sin();
        let t = (d2 + rr * s * s).sqrt();
        let w = if n == 2 { 1.0 } else { th.sin().powi(n as i32 - 2) };
        if w == 0.0 {
            return 0.0;
        }
        re_green(params, t) * w
    };
    Ok(c * integrate(&integrand, 0.0, PI, quad.abs_tol, quad.rel_tol)?)
}

/// (Re G ∗ f)(r) at each r of `r_grid` for f radial, supported in [0, support].
pub fn radial_resolvent<F>(
    params: &ProblemParams,
    f: F,
    support: f64,
    r_grid: &[f64],
    quad: &RadialQuadrature,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(support > 0.0 && support.is_finite()) {
        return Err(Error::Domain(format!("support radius must be positive, got {support}")));
    }
    if r_grid.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
        return Err(Error::Domain("output radii must be finite and nonnegative".into()));
    }
    let n = params.dim;
    let area = sphere_area(n);
    let out = par::map_range(r_grid.len(), |i| -> Result<f64> {
        let r = r_grid[i];
        let mut failure = None;
        let outer = |rho: f64| {
            let fr = f(rho);
            if fr == 0.0 || rho == 0.0 {
                return 0.0;
            }
            match spherical_mean_re_g(params, r, rho, quad) {
                Ok(m) => fr * rho.powi(n as i32 - 1) * m,
                Err(_) => f64::NAN,
            }
        };
        let mut total = 0.0;
        let mut pieces = vec![0.0];
        if r > 0.0 && r < support {
            pieces.push(r);
        }
        pieces.push(support);
        for w in pieces.windows(2) {
            match integrate(&outer, w[0], w[1], quad.abs_tol, quad.rel_tol) {
                Ok(v) => total += v,
                Err(e) => failure = Some(e),
            }
        }
        match failure {
            Some(e) => Err(e),
            None => Ok(area * total),
        }
    });
    out.into_iter().collect()
}

pub fn radial_resolvent_profile(
    params: &ProblemParams,
    f: &RadialProfile,
    r_grid: &[f64],
    quad: &RadialQuadrature,
) -> Result<Vec<f64>> {
    radial_resolvent(params, |x| f.eval(x), f.support(), r_grid, quad)
}

/// L u = Δ_r²u − βΔ_r u + αu on the uniform grid r_i = r_start + i h by
/// sixth-order central differences. Returns the first valid index and the
/// values at indices first..n−first.
pub fn radial_operator_fd(params: &ProblemParams, r_start: f64, h: f64, u: &[f64]) -> Result<(usize, Vec<f64>)> {
    const HALF: usize = 3;
    if u.len() < 4 * HALF + 1 || !(h > 0.0) {
        return Err(Error::Domain("need at least 13 samples on a positive uniform grid".into()));
    }
    let n = params.dim as f64;
    let lap = |v: &[f64], lo: usize, hi: usize, r0: f64| -> Vec<f64> {
        (lo..hi)
            .map(|i| {
                let s = |k: isize| v[(i as isize + k) as usize];
                let d1 = (-s(-3) + 9.0 * s(-2) - 45.0 * s(-1) + 45.0 * s(1) - 9.0 * s(2) + s(3)) / (60.0 * h);
                let d2 = (2.0 * s(-3) - 27.0 * s(-2) + 270.0 * s(-1) - 490.0 * s(0) + 270.0 * s(1) - 27.0 * s(2)
                    + 2.0 * s(3))
                    / (180.0 * h * h);
                let r = r0 + i as f64 * h;
                d2 + (n - 1.0) / r * d1
            })
            .collect()
    };
    if r_start <= 0.0 {
        return Err(Error::Domain("grid must start at r > 0".into()));
    }
    let m = u.len();
    // w on indices HALF..m−HALF, stored from 0
    let w = lap(u, HALF, m - HALF, r_start);
    let ww = lap(&w, HALF, w.len() - HALF, r_start + HALF as f64 * h);
    let first = 2 * HALF;
    let out = (0..ww.len())
        .map(|j| {
            let i = first + j;
            ww[j] - params.beta * w[i - HALF] + params.alpha * u[i]
        })
        .collect();
    Ok((first, out))
}
