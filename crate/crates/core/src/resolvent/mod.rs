//! Limiting-absorption resolvents on the truncated box.
//!
//! Each shell resolvent R_{a+iε} is realized by the lattice transform of the
//! radially truncated kernel χ·g_{a+iε} (see [`truncation`]); the fourth-order
//! resolvent is (R_{a1} − R_{a2})/√(β² − 4α), extrapolated to ε = 0 along a
//! geometric ε schedule. Results equal the free-space operators on the
//! observation window of the [`Geometry`] for sources inside its source ball.

pub mod kernel_space;
pub mod truncation;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Case, ProblemParams};
use crate::par;
use crate::spectral::fft::{multiply_radial, multiply_radial_real};
use crate::spectral::ops::{integral_product, rel_l2_masked};
use crate::spectral::{Domain, FftPlan, Field, KeyTable, SpectralGrid};

pub use truncation::{shell_multiplier, support_radius, Geometry, Truncation, Window};

/// Geometric ε ladder for the ε → 0 extrapolation, stored largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsSchedule {
    pub eps_values: Vec<f64>,
    pub extrapolation_order: usize,
}

impl EpsSchedule {
    pub fn geometric(eps0: f64, levels: usize) -> Result<Self> {
        if !(eps0 > 0.0) || levels < 2 {
            return Err(Error::Domain(format!("schedule needs eps0 > 0 and at least 2 levels, got {eps0}, {levels}")));
        }
        let eps_values = (0..levels).map(|j| eps0 * 0.5f64.powi(j as i32)).collect();
        Ok(Self { eps_values, extrapolation_order: levels - 1 })
    }

    /// Six levels from ε₀ = clearance/4, clearance measured against both shells.
    pub fn for_grid(grid: &SpectralGrid, params: &ProblemParams) -> Result<Self> {
        let c = grid.shell_clearance(&[params.a1, params.a2]);
        if !(c > 0.0) {
            return Err(Error::GridTooCoarse("a lattice point lies on a singular shell".into()));
        }
        Self::geometric(c / 4.0, 6)
    }

    pub fn with_order(mut self, order: usize) -> Result<Self> {
        if order == 0 || order >= self.eps_values.len() {
            return Err(Error::Domain(format!(
                "extrapolation order must be in 1..{}, got {order}",
                self.eps_values.len()
            )));
        }
        self.extrapolation_order = order;
        Ok(self)
    }

    pub fn validate(&self, clearance: f64) -> Result<()> {
        let mut e = self.eps_values.clone();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if e.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::Domain("all eps values must be positive".into()));
        }
        if e[0] > clearance / 4.0 * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("eps0 = {:.3e} exceeds clearance/4 = {:.3e}", e[0], clearance / 4.0)));
        }
        for w in e.windows(2) {
            if ((w[1] / w[0]) - 0.5).abs() > 1e-9 {
                return Err(Error::Domain("eps values must be geometric with ratio 1/2".into()));
            }
        }
        if self.extrapolation_order == 0 || self.extrapolation_order >= e.len() {
            return Err(Error::Domain("extrapolation order out of range".into()));
        }
        Ok(())
    }

    fn sorted(&self) -> Vec<f64> {
        let mut e = self.eps_values.clone();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        e
    }
}

/// Differences below this fraction of the table scale count as converged.
pub const ROUNDOFF_FLOOR: f64 = 1e-9;

/// Richardson extrapolation to ε = 0 of tables sampled on a ratio-1/2 ladder.
///
/// The tables are assumed smooth in t = ε^γ. Returns the extrapolated table
/// and a per-slot error estimate (difference of the two highest orders).
pub fn richardson(tables: &[Vec<C64>], order: usize, gamma: f64) -> Result<(Vec<C64>, Vec<f64>)> {
    let n = tables.len();
    if n < 2 || order == 0 || order >= n {
        return Err(Error::Domain(format!("need 1 <= order < levels, got order {order}, {n} levels")));
    }
    let width = tables[0].len();
    let ratio = 2f64.powf(gamma);
    // last row of the Neville tableau, orders 0..=order
    let mut row: Vec<Vec<C64>> = Vec::with_capacity(order + 1);
    let mut col: Vec<Vec<C64>> = tables.to_vec();
    row.push(col[n - 1].clone());
    for k in 1..=order {
        let f = 1.0 / (ratio.powi(k as i32) - 1.0);
        let next: Vec<Vec<C64>> =
            (1..col.len()).map(|j| col[j].iter().zip(&col[j - 1]).map(|(&a, &b)| a + (a - b) * f).collect()).collect();
        col = next;
        row.push(col[col.len() - 1].clone());
    }
    let scale = row[order].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let delta: Vec<f64> =
        (1..=order).map(|k| row[k].iter().zip(&row[k - 1]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)).collect();
    if order >= 2 {
        let last = delta[order - 1];
        let prev = delta[order - 2];
        if last > ROUNDOFF_FLOOR * scale.max(1e-300) && last > 0.5 * prev {
            return Err(Error::ExtrapolationDiverged { prev, last });
        }
    }
    let err = (0..width).map(|s| (row[order][s] - row[order - 1][s]).norm()).collect();
    Ok((row[order].clone(), err))
}

/// ε = 0 limit of the single-shell multiplier with its error estimate.
pub fn shell_limit_table(
    a: f64,
    sched: &EpsSchedule,
    grid: &SpectralGrid,
    keys: &KeyTable,
    trunc: &Truncation,
) -> Result<(Vec<C64>, Vec<f64>)> {
    if a < 0.0 {
        // nonvanishing symbol: ε = 0 is evaluated directly
        return Ok((shell_multiplier(a, 0.0, grid, keys, trunc), vec![0.0; keys.len()]));
    }
    let tables: Vec<Vec<C64>> = sched.sorted().iter().map(|&e| shell_multiplier(a, e, grid, keys, trunc)).collect();
    // a = 0 puts the branch point of √(a + iε) at the limit: expand in √ε
    let gamma = if a == 0.0 { 0.5 } else { 1.0 };
    richardson(&tables, sched.extrapolation_order, gamma)
}

#[derive(Debug, Clone)]
pub struct ResolventOutput {
    pub field: Field,
    /// ‖(error table)·f̂‖₂ / ‖output‖₂
    pub extrapolation_error: f64,
}

/// Fourth-order resolvent with its multiplier tables built once.
pub struct QuarticResolvent {
    pub params: ProblemParams,
    pub grid: SpectralGrid,
    pub geometry: Geometry,
    pub schedule: EpsSchedule,
    keys: KeyTable,
    plan: FftPlan,
    table: Vec<C64>,
    real_table: Vec<f64>,
    err_table: Vec<f64>,
}

impl QuarticResolvent {
    pub fn new(params: &ProblemParams, grid: &SpectralGrid, geometry: Geometry, schedule: EpsSchedule) -> Result<Self> {
        if grid.dim != params.dim {
            return Err(Error::GridMismatch(format!("grid N = {}, params N = {}", grid.dim, params.dim)));
        }
        let clearance = grid.shell_clearance(&[params.a1, params.a2]);
        if !(clearance > 0.0) {
            return Err(Error::GridTooCoarse("a lattice point lies on a singular shell".into()));
        }
        schedule.validate(clearance)?;
        let keys = grid.key_table();
        let trunc = geometry.trunc;
        let (m1, e1) = shell_limit_table(params.a1, &schedule, grid, &keys, &trunc)?;
        let (m2, e2) = shell_limit_table(params.a2, &schedule, grid, &keys, &trunc)?;
        let d = params.disc();
        let table: Vec<C64> = m1.iter().zip(&m2).map(|(a, b)| (a - b) / d).collect();
        let err_table = e1.iter().zip(&e2).map(|(a, b)| (a + b) / d).collect();
        let real_table = table.iter().map(|z| z.re).collect();
        Ok(Self {
            params: params.clone(),
            grid: *grid,
            geometry,
            schedule,
            keys,
            plan: FftPlan::new(*grid),
            table,
            real_table,
            err_table,
        })
    }

    /// Default schedule from the grid clearance.
    pub fn with_default_schedule(params: &ProblemParams, grid: &SpectralGrid, geometry: Geometry) -> Result<Self> {
        let sched = EpsSchedule::for_grid(grid, params)?;
        Self::new(params, grid, geometry, sched)
    }

    pub fn keys(&self) -> &KeyTable {
        &self.keys
    }

    pub fn plan(&self) -> &FftPlan {
        &self.plan
    }

    pub fn table(&self) -> &[C64] {
        &self.table
    }

    pub fn real_table(&self) -> &[f64] {
        &self.real_table
    }

    fn check(&self, f: &Field) -> Result<()> {
        f.expect(Domain::Physical)?;
        if f.grid != self.grid {
            return Err(Error::GridMismatch("field grid differs from the resolvent grid".into()));
        }
        Ok(())
    }

    /// 𝕽f with the extrapolation-error estimate.
    pub fn apply(&self, f: &Field) -> Result<ResolventOutput> {
        self.check(f)?;
        let mut data = f.values.clone();
        self.plan.forward_in_place(&mut data);
        let fh = data.clone();
        multiply_radial(&mut data, &self.grid, &self.keys, &self.table);
        let num = par::sum_range(fh.len(), |i| {
            let e = self.err_table[self.keys.slot(self.grid.key_of(i))];
            e * e * fh[i].norm_sqr()
        });
        let den = par::sum_range(data.len(), |i| data[i].norm_sqr());
        self.plan.inverse_in_place(&mut data);
        let extrapolation_error = if den > 0.0 { (num / den).sqrt() } else { 0.0 };
        Ok(ResolventOutput { field: Field::new(self.grid, data, Domain::Physical)?, extrapolation_error })
    }

    /// 𝐑f = Re 𝕽f on real samples.
    pub fn apply_real(&self, f: &[f64]) -> Vec<f64> {
        self.plan.apply_radial_real(f, &self.keys, &self.real_table)
    }

    pub fn apply_real_field(&self, f: &Field) -> Result<Field> {
        self.check(f)?;
        Field::from_real(self.grid, &self.apply_real(&f.real_part()))
    }

    /// Spectral application of L = Δ² − βΔ + α.
    pub fn apply_operator(&self, u: &[C64]) -> Vec<C64> {
        apply_symbol(&self.plan, &self.keys, &self.params, u)
    }
}

fn apply_symbol(plan: &FftPlan, keys: &KeyTable, params: &ProblemParams, u: &[C64]) -> Vec<C64> {
    let grid = plan.grid;
    let sym: Vec<f64> = keys.rho.iter().map(|&r| params.symbol(r * r)).collect();
    let mut data = u.to_vec();
    plan.forward_in_place(&mut data);
    multiply_radial_real(&mut data, &grid, keys, &sym);
    plan.inverse_in_place(&mut data);
    data
}

/// R_{a+iε} f at a single ε.
pub fn apply_resolvent_eps(a: f64, eps: f64, f: &Field, geometry: &Geometry) -> Result<Field> {
    f.expect(Domain::Physical)?;
    if eps < 0.0 || (eps == 0.0 && a >= 0.0) {
        return Err(Error::Domain(format!("eps must be positive for a >= 0, got {eps}")));
    }
    let grid = f.grid;
    let keys = grid.key_table();
    let table = shell_multiplier(a, eps, &grid, &keys, &geometry.trunc);
    let mut data = f.values.clone();
    FftPlan::new(grid).apply_radial(&mut data, &keys, &table);
    Field::new(grid, data, Domain::Physical)
}

/// ε → 0 limit of R_a f along the schedule.
pub fn apply_resolvent_limit(a: f64, f: &Field, sched: &EpsSchedule, geometry: &Geometry) -> Result<Field> {
    f.expect(Domain::Physical)?;
    let grid = f.grid;
    let keys = grid.key_table();
    let (table, _) = shell_limit_table(a, sched, &grid, &keys, &geometry.trunc)?;
    let mut data = f.values.clone();
    FftPlan::new(grid).apply_radial(&mut data, &keys, &table);
    Field::new(grid, data, Domain::Physical)
}

pub fn apply_quartic_resolvent(
    params: &ProblemParams,
    f: &Field,
    sched: &EpsSchedule,
    geometry: &Geometry,
) -> Result<ResolventOutput> {
    QuarticResolvent::new(params, &f.grid, *geometry, sched.clone())?.apply(f)
}

pub fn apply_real_resolvent(
    params: &ProblemParams,
    f: &Field,
    sched: &EpsSchedule,
    geometry: &Geometry,
) -> Result<Field> {
    if f.values.iter().any(|z| z.im != 0.0) {
        return Err(Error::Domain("apply_real_resolvent needs a real field".into()));
    }
    QuarticResolvent::new(params, &f.grid, *geometry, sched.clone())?.apply_real_field(f)
}

/// |∫(𝐑f)g − ∫f(𝐑g)| / (‖f‖₂‖g‖₂).
pub fn symmetry_defect(res: &QuarticResolvent, f: &[f64], g: &[f64]) -> f64 {
    let grid = res.grid;
    let rf = res.apply_real(f);
    let rg = res.apply_real(g);
    let lhs = integral_product(&grid, &rf, g);
    let rhs = integral_product(&grid, f, &rg);
    let nf = integral_product(&grid, f, f).sqrt();
    let ng = integral_product(&grid, g, g).sqrt();
    (lhs - rhs).abs() / (nf * ng)
}

pub fn check_symmetry(
    params: &ProblemParams,
    f: &Field,
    g: &Field,
    sched: &EpsSchedule,
    geometry: &Geometry,
) -> Result<f64> {
    f.same_grid(g)?;
    g.expect(Domain::Physical)?;
    let res = QuarticResolvent::new(params, &f.grid, *geometry, sched.clone())?;
    Ok(symmetry_defect(&res, &f.real_part(), &g.real_part()))
}

/// Dilation identity (R_a f)(x) = a^{−1} R_1(f(·/√a))(√a x), both sides at
/// matched ε (ε/a on the right). The right side lives on the grid dilated by
/// √a, where the samples of f(·/√a) coincide with those of f. Returns the
/// relative max-norm defect over the window.
pub fn check_scaling(a: f64, f: &Field, eps: f64, geometry: &Geometry) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("scaling check needs a > 0, got {a}")));
    }
    f.expect(Domain::Physical)?;
    let grid = f.grid;
    let s = a.sqrt();
    let grid2 = grid.scaled(s);
    let rho_max = grid2.nyquist() * (grid.dim as f64).sqrt();
    if rho_max * rho_max <= 1.0 {
        return Err(Error::GridTooCoarse(format!(
            "dilated lattice (radius {rho_max:.3}) does not reach the unit shell"
        )));
    }
    let lhs = apply_resolvent_eps(a, eps, f, geometry)?;
    let f2 = Field::new(grid2, f.values.clone(), Domain::Physical)?;
    let rhs = apply_resolvent_eps(1.0, eps / a, &f2, &geometry.scaled(s))?;
    let mask = geometry.window_mask(&grid);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        num = num.max((lhs.values[i] - rhs.values[i] / a).norm());
        den = den.max(lhs.values[i].norm());
    }
    Ok(if den > 0.0 { num / den } else { num })
}

/// ‖Lu − f‖₂/‖f‖₂, optionally restricted to a mask.
pub fn pde_residual(u: &Field, f: &Field, params: &ProblemParams, mask: Option<&[bool]>) -> Result<f64> {
    u.expect(Domain::Physical)?;
    f.expect(Domain::Physical)?;
    u.same_grid(f)?;
    let grid = u.grid;
    let plan = FftPlan::new(grid);
    let keys = grid.key_table();
    let lu = apply_symbol(&plan, &keys, params, &u.values);
    let all;
    let m = match mask {
        Some(m) => m,
        None => {
            all = vec![true; grid.len()];
            &all
        }
    };
    Ok(rel_l2_masked(&lu, &f.values, m))
}

/// Case NegAlpha: ‖𝕽f − (R_{a1}f − S_{a2}f)/√(β²−4α)‖/‖𝕽f‖ with S_{a2} the
/// ε = 0 Schrödinger resolvent, each term computed separately.
pub fn neg_alpha_consistency(
    params: &ProblemParams,
    f: &Field,
    sched: &EpsSchedule,
    geometry: &Geometry,
) -> Result<f64> {
    if params.case != Case::NegAlpha {
        return Err(Error::CaseMismatch("consistency check applies to alpha < 0".into()));
    }
    let q = apply_quartic_resolvent(params, f, sched, geometry)?.field;
    let r1 = apply_resolvent_limit(params.a1, f, sched, geometry)?;
    let grid = f.grid;
    let mut s2 = f.values.clone();
    let plan = FftPlan::new(grid);
    plan.forward_in_place(&mut s2);
    for (i, z) in s2.iter_mut().enumerate() {
        let xi = grid.xi_vec(i);
        let r2: f64 = xi.iter().map(|t| t * t).sum();
        *z /= r2 - params.a2;
    }
    plan.inverse_in_place(&mut s2);
    let d = params.disc();
    let other: Vec<C64> = r1.values.iter().zip(&s2).map(|(a, b)| (a - b) / d).collect();
    Ok(rel_l2_masked(&other, &q.values, &vec![true; grid.len()]))
}

/// Normalized Gaussian of width σ, or the lattice delta 1/h^N at the origin
/// sample when σ ≤ 0.
pub fn mollified_delta(grid: &SpectralGrid, sigma: f64) -> Field {
    if sigma <= 0.0 {
        let mut f = Field::zeros(*grid, Domain::Physical);
        let origin = grid.ravel(&vec![grid.m / 2; grid.dim]);
        f.values[origin] = C64::new(1.0 / grid.cell_volume(), 0.0);
        return f;
    }
    let n = grid.dim as i32;
    let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-(n as f64) / 2.0);
    Field::from_fn(*grid, |x| {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        C64::new(norm * (-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::quartic_green;

    fn bump(grid: SpectralGrid, c: [f64; 3], sigma: f64, k: [f64; 3]) -> Field {
        Field::from_fn(grid, |x| {
            let mut r2 = 0.0;
            let mut ph = 0.0;
            for ax in 0..grid.dim {
                r2 += (x[ax] - c[ax]).powi(2);
                ph += k[ax] * x[ax];
            }
            C64::new((-r2 / (2.0 * sigma * sigma)).exp() * ph.cos(), 0.0)
        })
    }

    #[test]
    fn richardson_removes_polynomial_terms() {
        let eps: Vec<f64> = (0..5).map(|j| 0.1 * 0.5f64.powi(j)).collect();
        let tables: Vec<Vec<C64>> =
            eps.iter().map(|&e| vec![C64::new(2.0 + 3.0 * e - e * e + 0.5 * e * e * e, e)]).collect();
        let (t, err) = richardson(&tables, 4, 1.0).unwrap();
        assert!((t[0] - C64::new(2.0, 0.0)).norm() < 1e-13);
        assert!(err[0] < 1e-10);
    }

    #[test]
    fn richardson_half_powers() {
        let eps: Vec<f64> = (0..6).map(|j| 0.01 * 0.5f64.powi(j)).collect();
        let tables: Vec<Vec<C64>> =
            eps.iter().map(|&e| vec![C64::new(1.0 + e.sqrt() + 2.0 * e + e.powf(1.5), 0.0)]).collect();
        let (t, _) = richardson(&tables, 5, 0.5).unwrap();
        assert!((t[0].re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn richardson_flags_noise() {
        let tables: Vec<Vec<C64>> = [1.0, -1.0, 1.0, -1.0, 1.0].iter().map(|&s| vec![C64::new(s, 0.0)]).collect();
        assert!(matches!(richardson(&tables, 4, 1.0), Err(Error::ExtrapolationDiverged { .. })));
    }

    #[test]
    fn schedule_validation() {
        let s = EpsSchedule::geometric(0.01, 6).unwrap();
        assert!(s.validate(0.04).is_ok());
        assert!(s.validate(0.039).is_err());
        assert_eq!(s.extrapolation_order, 5);
        assert!(EpsSchedule::geometric(0.0, 6).is_err());
    }

    #[test]
    fn inverse_on_window_2d() {
        let p = ProblemParams::linear(-1.0, 0.0, 2).unwrap();
        let grid = SpectralGrid::new(2, 128, 12.0).unwrap();
        let geo = Geometry::cube(&grid, 0.375, 6.0).unwrap();
        let res = QuarticResolvent::with_default_schedule(&p, &grid, geo).unwrap();
        let f = bump(grid, [0.5, -1.0, 0.0], 0.7, [1.2, 0.3, 0.0]);
        let out = res.apply(&f).unwrap();
        assert!(out.extrapolation_error < 1e-8);
        let mask = geo.window_mask(&grid);
        let r = pde_residual(&out.field, &f, &p, Some(&mask)).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn symmetric_and_linear() {
        let p = ProblemParams::linear(4.0, -5.0, 2).unwrap();
        let grid = SpectralGrid::new(2, 32, 8.0).unwrap();
        let geo = Geometry::cube(&grid, 0.25, 3.0).unwrap();
        let res = QuarticResolvent::with_default_schedule(&p, &grid, geo).unwrap();
        let f = bump(grid, [0.0, 0.0, 0.0], 0.8, [0.5, 0.0, 0.0]).real_part();
        let g = bump(grid, [1.0, 0.5, 0.0], 0.6, [0.0, 1.5, 0.0]).real_part();
        assert!(symmetry_defect(&res, &f, &g) < 1e-12);
        let h: Vec<f64> = f.iter().zip(&g).map(|(a, b)| 2.5 * a + b).collect();
        let rh = res.apply_real(&h);
        let rf = res.apply_real(&f);
        let rg = res.apply_real(&g);
        for i in 0..h.len() {
            assert!((rh[i] - 2.5 * rf[i] - rg[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling_identity() {
        let grid = SpectralGrid::new(2, 64, 10.0).unwrap();
        let geo = Geometry::cube(&grid, 0.3, 5.0).unwrap();
        let f = bump(grid, [0.0, 0.3, 0.0], 0.8, [0.0, 0.0, 0.0]);
        assert!(check_scaling(1.0, &f, 0.01, &geo).unwrap() < 1e-13);
        let d = check_scaling(4.0, &f, 0.01, &geo).unwrap();
        assert!(d < 1e-8, "defect {d}");
    }

    #[test]
    fn neg_alpha_split_matches() {
        let p = ProblemParams::linear(-2.0, 1.0, 2).unwrap();
        let grid = SpectralGrid::new(2, 32, 8.0).unwrap();
        let geo = Geometry::cube(&grid, 0.25, 3.0).unwrap();
        let sched = EpsSchedule::for_grid(&grid, &p).unwrap();
        let f = bump(grid, [0.0, 0.0, 0.0], 0.7, [0.0, 0.0, 0.0]);
        assert!(neg_alpha_consistency(&p, &f, &sched, &geo).unwrap() < 1e-10);
    }

    #[test]
    fn green_samples_3d_small() {
        let p = ProblemParams::linear(-1.0, 0.0, 3).unwrap();
        let grid = SpectralGrid::new(3, 64, 12.0).unwrap();
        let geo = Geometry::cube(&grid, 0.5, 0.5).unwrap();
        let sched = EpsSchedule::for_grid(&grid, &p).unwrap();
        let u = apply_real_resolvent(&p, &mollified_delta(&grid, 0.0), &sched, &geo).unwrap();
        let mask = geo.window_mask(&grid);
        let want: Vec<C64> = (0..grid.len())
            .map(|i| {
                let r = grid.radius(i);
                if r == 0.0 {
                    C64::new(1.0 / (8.0 * std::f64::consts::PI), 0.0)
                } else {
                    C64::new(quartic_green(&p, r).unwrap().re, 0.0)
                }
            })
            .collect();
        let e = rel_l2_masked(&u.values, &want, &mask);
        assert!(e < 1e-2, "windowed error {e}");
    }
}
