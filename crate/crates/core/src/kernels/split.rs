//! Resonant/nonresonant split G = G₁ + G₂ with G₁ = ψ ∗ G.
//!
//! ψ̂ is a smooth radial bump equal to 1 within √a/6 of each Helmholtz shell
//! √a and vanishing beyond √a/4. G₁ is formed on the frequency lattice as
//! ψ̂ times the transform of the radially truncated kernel χG, with χ = 1 on
//! |x| ≤ 3L/4 and χ = 0 beyond L, so every box sample is free of periodic
//! images and G₁ agrees with ψ ∗ G up to the (super-polynomially small) tail
//! of ψ beyond the truncation radius.

use num_complex::Complex64 as C64;

use super::green::{quartic_green, quartic_green_at_zero};
use super::params::{Case, ProblemParams};
use crate::error::{Error, Result};
use crate::par;
use crate::resolvent::truncation::{shell_multiplier, smooth_step, Truncation};
use crate::spectral::{Domain, FftPlan, Field, SpectralGrid};

#[derive(Debug, Clone)]
pub struct KernelSplit {
    pub g1: Field,
    pub g2: Field,
    pub psi_hat: Field,
    pub shell_radii: Vec<f64>,
}

/// Radii √a of the shells carrying a resonant part.
pub fn shell_radii(params: &ProblemParams) -> Vec<f64> {
    match params.case {
        Case::TwoHelmholtz => vec![params.a1.sqrt(), params.a2.sqrt()],
        _ => vec![params.a1.sqrt()],
    }
}

fn bump(rho: f64, k: f64) -> f64 {
    let d = (rho - k).abs();
    let (s, _, _) = smooth_step((d - k / 6.0) / (k / 12.0));
    1.0 - s
}

/// ψ̂ at |ξ| = rho.
pub fn psi_hat(params: &ProblemParams, rho: f64) -> f64 {
    shell_radii(params).iter().map(|&k| bump(rho, k)).fold(0.0, f64::max)
}

pub fn kernel_split(params: &ProblemParams, grid: &SpectralGrid) -> Result<KernelSplit> {
    if grid.dim != params.dim {
        return Err(Error::GridMismatch(format!("grid N = {}, params N = {}", grid.dim, params.dim)));
    }
    let radii = shell_radii(params);
    let k1 = radii[0];
    if grid.nyquist() <= 1.25 * k1 {
        return Err(Error::GridTooCoarse(format!(
            "Nyquist radius {:.4} must exceed 1.25 sqrt(a1) = {:.4}",
            grid.nyquist(),
            1.25 * k1
        )));
    }
    if radii.len() == 2 && radii[0] * 0.75 <= radii[1] * 1.25 {
        return Err(Error::GridTooCoarse("the two cutoff annuli overlap".into()));
    }
    let keys = grid.key_table();
    for &k in &radii {
        let n = keys
            .rho
            .iter()
            .filter(|&&r| {
                let d = (r - k).abs();
                d > k / 6.0 && d < k / 4.0
            })
            .count();
        if n < 2 {
            return Err(Error::GridTooCoarse(format!(
                "transition annulus around {k:.4} holds {n} lattice shells, need 2"
            )));
        }
    }

    let l = grid.half_width;
    let trunc = Truncation::new(0.75 * l, l)?;
    let d = params.disc();
    let m1 = shell_multiplier(params.a1, 0.0, grid, &keys, &trunc);
    let m2 = shell_multiplier(params.a2, 0.0, grid, &keys, &trunc);
    let table: Vec<C64> = (0..keys.len()).map(|s| psi_hat(params, keys.rho[s]) * (m1[s] - m2[s]) / d).collect();

    let plan = FftPlan::new(*grid);
    // delta at the origin sample, so that F[δ]·m is the transform of χG
    let origin = grid.ravel(&vec![grid.m / 2; grid.dim]);
    let mut data = vec![C64::new(0.0, 0.0); grid.len()];
    data[origin] = C64::new(1.0 / grid.cell_volume(), 0.0);
    plan.apply_radial(&mut data, &keys, &table);
    let g1 = Field::new(*grid, data, Domain::Physical)?;

    let g0 = quartic_green_at_zero(params)?;
    let samples = par::map_range(grid.len(), |i| {
        let r = grid.radius(i);
        if r == 0.0 {
            g0
        } else {
            quartic_green(params, r).unwrap_or(C64::new(f64::NAN, f64::NAN))
        }
    });
    let g2_vals: Vec<C64> = samples.iter().zip(&g1.values).map(|(g, a)| g - a).collect();
    let g2 = Field::new(*grid, g2_vals, Domain::Physical)?;

    let psi_vals = par::map_range(grid.len(), |i| {
        let xi = grid.xi_vec(i);
        let rho = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
        C64::new(psi_hat(params, rho), 0.0)
    });
    let psi = Field::new(*grid, psi_vals, Domain::Frequency)?;
    Ok(KernelSplit { g1, g2, psi_hat: psi, shell_radii: radii })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let p = ProblemParams::linear(-1.0, 0.0, 2).unwrap();
        assert_eq!(psi_hat(&p, 1.0), 1.0);
        assert_eq!(psi_hat(&p, 1.0 + 1.0 / 6.0), 1.0);
        assert_eq!(psi_hat(&p, 4.0 / 3.0), 0.0);
        assert_eq!(psi_hat(&p, 0.75), 0.0);
        let v = psi_hat(&p, 1.2);
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn two_shells() {
        let p = ProblemParams::linear(4.0, -5.0, 2).unwrap();
        assert_eq!(psi_hat(&p, 2.0), 1.0);
        assert_eq!(psi_hat(&p, 1.0), 1.0);
        assert_eq!(psi_hat(&p, 1.5), 0.0);
    }

    #[test]
    fn coarse_grid_rejected() {
        let p = ProblemParams::linear(-1.0, 0.0, 2).unwrap();
        let g = SpectralGrid::new(2, 16, 4.0).unwrap();
        assert!(matches!(kernel_split(&p, &g), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn parts_sum_to_kernel() {
        let p = ProblemParams::linear(-1.0, 0.0, 2).unwrap();
        let g = SpectralGrid::new(2, 128, 32.0).unwrap();
        let s = kernel_split(&p, &g).unwrap();
        for i in [0usize, 777, 8191, 128 * 64 + 64] {
            let r = g.radius(i);
            let want = if r == 0.0 { quartic_green_at_zero(&p).unwrap() } else { quartic_green(&p, r).unwrap() };
            assert!((s.g1.values[i] + s.g2.values[i] - want).norm() < 1e-13);
        }
        assert!(s.psi_hat.values.iter().all(|z| (0.0..=1.0).contains(&z.re)));
    }
}
