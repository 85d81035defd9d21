use num_complex::Complex64 as C64;

use super::field::{Domain, Field};
use super::grid::SpectralGrid;
use crate::error::{Error, Result};
use crate::par;

/// (Σ|f|^p · h^N)^{1/p}, or max|f| for p = ∞.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    f.expect(Domain::Physical)?;
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("lp_norm needs p >= 1, got {p}")));
    }
    let v = &f.values;
    if p.is_infinite() {
        return Ok(par::max_range(v.len(), |i| v[i].norm()));
    }
    let s = par::sum_range(v.len(), |i| v[i].norm().powf(p));
    Ok((s * f.grid.cell_volume()).powf(1.0 / p))
}

/// L^p norm of a real sample vector on `grid`.
pub fn lp_norm_real(grid: &SpectralGrid, v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return par::max_range(v.len(), |i| v[i].abs());
    }
    let s = par::sum_range(v.len(), |i| v[i].abs().powf(p));
    (s * grid.cell_volume()).powf(1.0 / p)
}

/// ∫ f g dx for real samples.
pub fn integral_product(grid: &SpectralGrid, f: &[f64], g: &[f64]) -> f64 {
    par::sum_range(f.len(), |i| f[i] * g[i]) * grid.cell_volume()
}

/// Pointwise |v|^{s−2} v with 0 ↦ 0.
pub fn power_map(v: &[f64], s: f64) -> Vec<f64> {
    par::map_range(v.len(), |i| power_scalar(v[i], s))
}

#[inline]
pub fn power_scalar(x: f64, s: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(s - 2.0) * x
    }
}

/// power_map on a physical field (real part used, output real).
pub fn power_map_field(f: &Field, s: f64) -> Result<Field> {
    f.expect(Domain::Physical)?;
    if !(s > 1.0) {
        return Err(Error::Domain(format!("power_map needs s > 1, got {s}")));
    }
    let re = f.real_part();
    Field::from_real(f.grid, &power_map(&re, s))
}

/// Relative L² distance ‖a − b‖/‖b‖ restricted to a mask.
pub fn rel_l2_masked(a: &[C64], b: &[C64], mask: &[bool]) -> f64 {
    let n = a.len();
    let num = par::sum_range(n, |i| if mask[i] { (a[i] - b[i]).norm_sqr() } else { 0.0 });
    let den = par::sum_range(n, |i| if mask[i] { b[i].norm_sqr() } else { 0.0 });
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}
