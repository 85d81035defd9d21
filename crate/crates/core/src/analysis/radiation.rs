//! Integrated radiation-condition residuals.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Case, ProblemParams};
use crate::par;
use crate::resolvent::truncation::Truncation;
use crate::spectral::{Domain, FftPlan, Field, SpectralGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiationReport {
    pub wavenumber: f64,
    pub r_values: Vec<f64>,
    pub residuals: Vec<f64>,
    /// radius where the field is smoothly cut off before differentiation
    pub taper_start: f64,
}

impl RadiationReport {
    pub fn decreasing(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1] < w[0])
    }
}

/// Spectral gradient ∂_j u, j < N.
pub fn spectral_gradient(u: &Field) -> Result<Vec<Vec<C64>>> {
    u.expect(Domain::Physical)?;
    let grid = u.grid;
    let plan = FftPlan::new(grid);
    let mut hat = u.values.clone();
    plan.forward_in_place(&mut hat);
    Ok((0..grid.dim)
        .map(|ax| {
            let mut d = par::map_range(grid.len(), |i| {
                let xi = grid.xi_vec(i)[ax];
                hat[i] * C64::new(0.0, xi)
            });
            plan.inverse_in_place(&mut d);
            d
        })
        .collect())
}

fn taper(grid: &SpectralGrid, r_max: f64) -> Result<Truncation> {
    let t1 = grid.half_width - grid.h();
    Truncation::new(r_max, t1).map_err(|_| {
        Error::Domain(format!(
            "radius {r_max} leaves no room for the cutoff below the box half width {}",
            grid.half_width
        ))
    })
}

/// (1/R) ∫_{B_R} |∇ũ − i k ũ x/|x||² dx for each R.
///
/// ũ is multiplied by a smooth cutoff equal to 1 on B_{max R} and vanishing
/// at the box edge, so the spectral gradient is exact on every ball used.
pub fn radiation_residual_k(u: &Field, k: f64, r_values: &[f64]) -> Result<RadiationReport> {
    u.expect(Domain::Physical)?;
    let grid = u.grid;
    let r_max = r_values.iter().cloned().fold(0.0, f64::max);
    if r_values.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Domain("radii must be positive".into()));
    }
    let tr = taper(&grid, r_max)?;
    let rad: Vec<f64> = par::map_range(grid.len(), |i| grid.radius(i));
    let cut: Vec<C64> = par::map_range(grid.len(), |i| u.values[i] * tr.cutoff(rad[i]).0);
    let v = Field::new(grid, cut, Domain::Physical)?;
    let grad = spectral_gradient(&v)?;
    let dim = grid.dim;
    let dens: Vec<f64> = par::map_range(grid.len(), |i| {
        let r = rad[i];
        if r == 0.0 {
            return 0.0;
        }
        let x = grid.position(i);
        let mut s = 0.0;
        for ax in 0..dim {
            let t = grad[ax][i] - C64::new(0.0, k) * v.values[i] * (x[ax] / r);
            s += t.norm_sqr();
        }
        s
    });
    let dv = grid.cell_volume();
    let residuals = r_values
        .iter()
        .map(|&big_r| par::sum_range(grid.len(), |i| if rad[i] <= big_r { dens[i] } else { 0.0 }) * dv / big_r)
        .collect();
    Ok(RadiationReport { wavenumber: k, r_values: r_values.to_vec(), residuals, taper_start: r_max })
}

/// Single-field residual with k = √a1 (cases NegAlpha and ZeroAlpha).
pub fn radiation_residual(u: &Field, params: &ProblemParams, r_values: &[f64]) -> Result<RadiationReport> {
    if params.case == Case::TwoHelmholtz {
        return Err(Error::CaseMismatch(
            "two Helmholtz factors: supply the component fields to radiation_residual_pair".into(),
        ));
    }
    radiation_residual_k(u, params.a1.sqrt(), r_values)
}

/// Component residuals of ũ_j = g_{a_j} ∗ f with k_j = √a_j (case TwoHelmholtz).
pub fn radiation_residual_pair(
    u1: &Field,
    u2: &Field,
    params: &ProblemParams,
    r_values: &[f64],
) -> Result<(RadiationReport, RadiationReport)> {
    if params.case != Case::TwoHelmholtz {
        return Err(Error::CaseMismatch("component residuals apply to two Helmholtz factors".into()));
    }
    Ok((radiation_residual_k(u1, params.a1.sqrt(), r_values)?, radiation_residual_k(u2, params.a2.sqrt(), r_values)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::helmholtz_green;
    use crate::resolvent::kernel_space::helmholtz_extend;

    #[test]
    fn gradient_of_a_gaussian() {
        let g = SpectralGrid::new(2, 64, 8.0).unwrap();
        let u = Field::from_fn(g, |x| C64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0));
        let d = spectral_gradient(&u).unwrap();
        for i in [100usize, 2000, 2080] {
            let x = g.position(i);
            let want = -2.0 * x[0] * (-(x[0] * x[0] + x[1] * x[1])).exp();
            assert!((d[0][i].re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let g = SpectralGrid::new(2, 32, 8.0).unwrap();
        let u = Field::zeros(g, Domain::Physical);
        let rep = radiation_residual_k(&u, 1.0, &[2.0, 4.0]).unwrap();
        assert!(rep.residuals.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn outgoing_decreases_and_incoming_does_not() {
        // mollified outgoing kernel g_1 ∗ φ against its conjugate, N = 3
        let small = SpectralGrid::new(3, 16, 4.0).unwrap();
        let f = Field::from_fn(small, |x| C64::new((-2.0 * x.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0));
        let u = helmholtz_extend(1.0, &f, 4).unwrap();
        let radii = [4.0, 6.0, 8.0, 10.0];
        let out = radiation_residual_k(&u, 1.0, &radii).unwrap();
        let inc = radiation_residual_k(&u.conj(), 1.0, &radii).unwrap();
        assert!(out.decreasing(), "{:?}", out.residuals);
        assert!(inc.residuals[3] > 10.0 * out.residuals[3], "{:?} {:?}", inc.residuals, out.residuals);
        // closed form check of the outgoing field away from the source
        let i = u.grid.ravel(&[32, 32, 52]);
        let r = u.grid.radius(i);
        let mass = (PI_HALF).powf(1.5);
        let want = helmholtz_green(1.0, r, 3).unwrap() * mass * (-1.0f64 / 8.0).exp();
        assert!((u.values[i] - want).norm() < 1e-3 * want.norm(), "{} {}", u.values[i], want);
    }

    const PI_HALF: f64 = std::f64::consts::FRAC_PI_2;
}
