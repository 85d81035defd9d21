//! Second route to the fourth-order resolvent: direct convolution with
//! closed-form kernel samples, u(x_i) = h^N Σ_j K(x_i − x_j) f(x_j), evaluated
//! by a zero-padded FFT (plain cyclic DFT of length 2M per axis, no wrap).

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kernels::{helmholtz_green, quartic_green, quartic_green_at_zero, ProblemParams};
use crate::par;
use crate::spectral::fft::fft_all_axes;
use crate::spectral::{Domain, Field, SpectralGrid};

/// Largest padded size (2M)^N accepted.
pub const MAX_PADDED_POINTS: usize = 1 << 22;

/// Convolution of f with G (or Re G when `real_kernel`).
pub fn kernel_space_apply(params: &ProblemParams, f: &Field, real_kernel: bool) -> Result<Field> {
    if f.grid.dim != params.dim {
        return Err(Error::GridMismatch(format!("field N = {}, params N = {}", f.grid.dim, params.dim)));
    }
    let g0 = quartic_green_at_zero(params)?;
    let kernel = |r: f64| {
        let g = if r == 0.0 { g0 } else { quartic_green(params, r).unwrap_or(C64::new(f64::NAN, 0.0)) };
        if real_kernel {
            C64::new(g.re, 0.0)
        } else {
            g
        }
    };
    convolve_radial(f, kernel)
}

/// h^N Σ_j K(|x_i − x_j|) f(x_j); `kernel` must accept r = 0.
pub fn convolve_radial<K>(f: &Field, kernel: K) -> Result<Field>
where
    K: Fn(f64) -> C64 + Sync + Send,
{
    f.expect(Domain::Physical)?;
    let grid = f.grid;
    if !(2..=3).contains(&grid.dim) {
        return Err(Error::UnsupportedCase(format!("kernel-space route needs N in {{2, 3}}, got {}", grid.dim)));
    }
    if (2 * grid.m).pow(grid.dim as u32) > MAX_PADDED_POINTS {
        return Err(Error::UnsupportedCase(format!("kernel-space route limited to (2M)^N <= {MAX_PADDED_POINTS}")));
    }
    let m = grid.m;
    let m2 = 2 * m;
    let dim = grid.dim;
    let pad = SpectralGrid::new(dim, m2, 2.0 * grid.half_width)?.with_offset(false);
    let h = grid.h();

    // kernel on displacement indices d ∈ [−M, M), stored at d mod 2M
    let mut kern = par::map_range(pad.len(), |i| {
        let mut idx = i;
        let mut r2 = 0.0;
        for _ in 0..dim {
            let k = idx % m2;
            idx /= m2;
            let d = if k < m { k as f64 } else { k as f64 - m2 as f64 };
            r2 += (d * h) * (d * h);
        }
        kernel(r2.sqrt())
    });
    let mut src = vec![C64::new(0.0, 0.0); pad.len()];
    for (i, v) in f.values.iter().enumerate() {
        let mi = grid.unravel(i);
        src[pad.ravel(&mi[..dim])] = *v;
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m2);
    let inv = planner.plan_fft_inverse(m2);
    fft_all_axes(&mut kern, &pad, &fwd);
    fft_all_axes(&mut src, &pad, &fwd);
    par::for_each_zip_mut(&mut src, &kern, |a, b| *a *= b);
    fft_all_axes(&mut src, &pad, &inv);
    let scale = grid.cell_volume() / pad.len() as f64;
    let out = par::map_range(grid.len(), |i| {
        let mi = grid.unravel(i);
        src[pad.ravel(&mi[..dim])] * scale
    });
    Field::new(grid, out, Domain::Physical)
}

/// Mean of g_a over the lattice cell centred at the origin (midpoint rule on
/// an even subdivision, which never samples the singular point).
pub fn helmholtz_cell_average(a: f64, h: f64, dim: usize) -> Result<C64> {
    let n = 16usize;
    let sub = h / n as f64;
    let total = n.pow(dim as u32);
    let mut acc = C64::new(0.0, 0.0);
    for idx in 0..total {
        let mut r2 = 0.0;
        let mut t = idx;
        for _ in 0..dim {
            let c = -0.5 * h + (t % n) as f64 * sub + 0.5 * sub;
            t /= n;
            r2 += c * c;
        }
        acc += helmholtz_green(a, r2.sqrt(), dim)?;
    }
    Ok(acc / total as f64)
}

/// g_a ∗ f on a grid `factor` times wider than that of f.
pub fn helmholtz_extend(a: f64, f: &Field, factor: usize) -> Result<Field> {
    let dim = f.grid.dim;
    let g0 = helmholtz_cell_average(a, f.grid.h(), dim)?;
    let kernel = |r: f64| if r == 0.0 { g0 } else { helmholtz_green(a, r, dim).unwrap_or(C64::new(f64::NAN, 0.0)) };
    convolve_radial(&embed(f, factor)?, kernel)
}

/// Embeds f (centered) in a grid `factor` times wider with the same spacing.
pub fn embed(f: &Field, factor: usize) -> Result<Field> {
    f.expect(Domain::Physical)?;
    let grid = f.grid;
    if factor == 0 || !factor.is_power_of_two() {
        return Err(Error::Domain(format!("embedding factor must be a power of two, got {factor}")));
    }
    let big = SpectralGrid::new(grid.dim, factor * grid.m, factor as f64 * grid.half_width)?.with_offset(grid.offset);
    let shift = (factor - 1) * grid.m / 2;
    let mut out = vec![C64::new(0.0, 0.0); big.len()];
    for (i, v) in f.values.iter().enumerate() {
        let mut mi = grid.unravel(i);
        for k in mi.iter_mut().take(grid.dim) {
            *k += shift;
        }
        out[big.ravel(&mi[..grid.dim])] = *v;
    }
    Field::new(big, out, Domain::Physical)
}

/// G ∗ f (or Re G ∗ f) on a grid `factor` times wider than that of f.
///
/// Since f vanishes outside its own box, this is the free-space convolution
/// at every sample of the wider box.
pub fn kernel_space_extend(params: &ProblemParams, f: &Field, factor: usize, real_kernel: bool) -> Result<Field> {
    kernel_space_apply(params, &embed(f, factor)?, real_kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let p = ProblemParams::linear(-1.0, 0.0, 2).unwrap();
        let grid = SpectralGrid::new(2, 8, 2.0).unwrap();
        let f = Field::from_fn(grid, |x| C64::new((-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp() + 0.1 * x[0], 0.0));
        let u = kernel_space_apply(&p, &f, false).unwrap();
        let g0 = quartic_green_at_zero(&p).unwrap();
        for i in [0usize, 9, 36, 63] {
            let xi = grid.position(i);
            let mut s = C64::new(0.0, 0.0);
            for j in 0..grid.len() {
                let xj = grid.position(j);
                let r = ((xi[0] - xj[0]).powi(2) + (xi[1] - xj[1]).powi(2)).sqrt();
                let g = if r < 1e-12 { g0 } else { quartic_green(&p, r).unwrap() };
                s += g * f.values[j];
            }
            s *= grid.cell_volume();
            assert!((u.values[i] - s).norm() < 1e-13 * (1.0 + s.norm()));
        }
    }

    #[test]
    fn extension_agrees_on_the_inner_box() {
        let p = ProblemParams::linear(-1.0, 0.0, 2).unwrap();
        let grid = SpectralGrid::new(2, 16, 4.0).unwrap();
        let f = Field::from_fn(grid, |x| C64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0));
        let u = kernel_space_apply(&p, &f, true).unwrap();
        let big = kernel_space_extend(&p, &f, 4, true).unwrap();
        assert_eq!(big.grid.h(), grid.h());
        for i in 0..grid.len() {
            let mut mi = grid.unravel(i);
            mi[0] += 24;
            mi[1] += 24;
            let j = big.grid.ravel(&mi[..2]);
            assert_eq!(grid.position(i)[..2], big.grid.position(j)[..2]);
            assert!((u.values[i] - big.values[j]).norm() < 1e-13);
        }
    }
}
