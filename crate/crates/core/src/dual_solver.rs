//! Dual variational formulation and a Nehari-projected ascent solver.
//!
//! With w = Γ^{1/p}, the dual equation is w·𝐑(w·v) = |v|^{p′−2}v and the
//! dual energy J(v) = ‖v‖_{p′}^{p′}/p′ − ½∫v·K v, K = w𝐑w.
//!
//! On the box the coefficient is replaced by Γ_env = Γ·χ_s, χ_s a C^∞ radial
//! envelope equal to 1 for r ≤ s − t and 0 for r ≥ s. With kernel truncation
//! radii T0 = 2s, T1 = 2L − 2s the operator K is then exactly the free-space
//! one on the envelope support, and the recovered u solves the PDE with the
//! original Γ on the ball r ≤ s − t.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{GammaSpec, ProblemParams};
use crate::par;
use crate::resolvent::truncation::smooth_step;
use crate::resolvent::{pde_residual, EpsSchedule, Geometry, QuarticResolvent, Window};
use crate::spectral::ops::{integral_product, lp_norm_real, power_map};
use crate::spectral::{Domain, FftPlan, Field, SpectralGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Init {
    AscentZ,
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Bound on grad_norm and on the critical-identity defect.
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
    /// Frequency margin of the initial guess: ẑ lives on |ξ|² ≥ a1 + margin.
    pub margin: f64,
    /// Average the iterate over axis reflections and permutations.
    pub symmetrize: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 2000, init: Init::AscentZ, margin: 1.0, symmetrize: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub j: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct DualState {
    pub v: Field,
    pub j_value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    pub seed: Option<u64>,
}

impl DualState {
    /// |J − (1/p′ − 1/2)‖v‖_{p′}^{p′}| / |J|.
    pub fn identity_defect(&self, problem: &DualProblem) -> f64 {
        let pc = problem.params.p_conj();
        let a = norm_pow(&problem.grid, &self.v.real_part(), pc);
        let target = (1.0 / pc - 0.5) * a;
        (self.j_value - target).abs() / self.j_value.abs().max(1e-300)
    }
}

fn norm_pow(grid: &SpectralGrid, v: &[f64], q: f64) -> f64 {
    par::sum_range(v.len(), |i| v[i].abs().powf(q)) * grid.cell_volume()
}

/// Dual operator data: resolvent tables, Γ envelope and its p-th root.
pub struct DualProblem {
    pub params: ProblemParams,
    pub grid: SpectralGrid,
    pub resolvent: QuarticResolvent,
    pub source_radius: f64,
    pub taper: f64,
    /// Γ_env samples
    pub gamma_env: Vec<f64>,
    /// Γ_env^{1/p}
    pub weight: Vec<f64>,
}

impl DualProblem {
    pub fn new(
        params: &ProblemParams,
        grid: &SpectralGrid,
        source_radius: f64,
        taper: f64,
        sched: Option<EpsSchedule>,
    ) -> Result<Self> {
        if !(taper > 0.0 && taper < source_radius) {
            return Err(Error::Domain(format!("taper {taper} must lie in (0, {source_radius})")));
        }
        if let GammaSpec::Grid(g) = &params.gamma {
            if g.len() != grid.len() {
                return Err(Error::GridMismatch(format!("Gamma has {} samples, grid has {}", g.len(), grid.len())));
            }
        }
        let geometry = Geometry::new(grid, Window::Ball(source_radius), source_radius)?;
        let sched = match sched {
            Some(s) => s,
            None => EpsSchedule::for_grid(grid, params)?,
        };
        let resolvent = QuarticResolvent::new(params, grid, geometry, sched)?;
        let gamma_env = par::map_range(grid.len(), |i| {
            let r = grid.radius(i);
            let (s, _, _) = smooth_step((r - (source_radius - taper)) / taper);
            params.gamma.at(i) * (1.0 - s)
        });
        let p = params.p;
        let weight = gamma_env.iter().map(|&g| g.powf(1.0 / p)).collect();
        Ok(Self { params: params.clone(), grid: *grid, resolvent, source_radius, taper, gamma_env, weight })
    }

    /// Source radius 15L/32 with taper L/8.
    pub fn standard(params: &ProblemParams, grid: &SpectralGrid) -> Result<Self> {
        let l = grid.half_width;
        Self::new(params, grid, 0.46875 * l, 0.125 * l, None)
    }

    /// Radius of the ball where Γ_env = Γ.
    pub fn exact_radius(&self) -> f64 {
        self.source_radius - self.taper
    }

    pub fn exact_mask(&self) -> Vec<bool> {
        let r0 = self.exact_radius();
        par::map_range(self.grid.len(), |i| self.grid.radius(i) <= r0)
    }

    /// K v = w·𝐑(w·v).
    pub fn k_map(&self, v: &[f64]) -> Vec<f64> {
        let wv: Vec<f64> = v.iter().zip(&self.weight).map(|(a, b)| a * b).collect();
        let r = self.resolvent.apply_real(&wv);
        r.iter().zip(&self.weight).map(|(a, b)| a * b).collect()
    }

    pub fn k_map_field(&self, v: &Field) -> Result<Field> {
        v.expect(Domain::Physical)?;
        Field::from_real(self.grid, &self.k_map(&v.real_part()))
    }

    pub fn j_functional(&self, v: &[f64]) -> f64 {
        let pc = self.params.p_conj();
        let kv = self.k_map(v);
        norm_pow(&self.grid, v, pc) / pc - 0.5 * integral_product(&self.grid, v, &kv)
    }

    /// |v|^{p′−2}v − K v.
    pub fn j_gradient(&self, v: &[f64]) -> Vec<f64> {
        let kv = self.k_map(v);
        let s = power_map(v, self.params.p_conj());
        s.iter().zip(&kv).map(|(a, b)| a - b).collect()
    }

    /// ‖|v|^{p′−2}v − Kv‖_p / ‖|v|^{p′−2}v‖_p.
    pub fn grad_norm(&self, v: &[f64], kv: &[f64]) -> f64 {
        let p = self.params.p;
        let s = power_map(v, self.params.p_conj());
        let r: Vec<f64> = s.iter().zip(kv).map(|(a, b)| a - b).collect();
        let den = lp_norm_real(&self.grid, &s, p);
        if den == 0.0 {
            return 0.0;
        }
        lp_norm_real(&self.grid, &r, p) / den
    }
}

/// Real z whose spectrum is a smooth shell bump inside |ξ|² ≥ a1 + margin.
pub fn build_ascent_z(params: &ProblemParams, grid: &SpectralGrid, margin: f64) -> Result<Field> {
    let (inner, width) = ascent_band(params, margin)?;
    if grid.nyquist() <= inner + 2.0 * width {
        return Err(Error::GridTooCoarse(format!(
            "Nyquist radius {:.3} must exceed the ascent band edge {:.3}",
            grid.nyquist(),
            inner + 2.0 * width
        )));
    }
    let spec = par::map_range(grid.len(), |i| {
        let xi = grid.xi_vec(i);
        let rho = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
        C64::new(shell_bump(rho, inner, width), 0.0)
    });
    let mut data = spec;
    FftPlan::new(*grid).inverse_in_place(&mut data);
    let re: Vec<f64> = data.iter().map(|z| z.re).collect();
    Field::from_real(*grid, &re)
}

fn ascent_band(params: &ProblemParams, margin: f64) -> Result<(f64, f64)> {
    if !(margin > 0.0) {
        return Err(Error::Domain(format!("margin must be positive, got {margin}")));
    }
    let inner = (params.a1 + margin).sqrt();
    Ok((inner, 0.5 * inner))
}

/// C^∞ bump on [inner, inner + 2·width].
fn shell_bump(rho: f64, inner: f64, width: f64) -> f64 {
    let t = (rho - inner - width) / width;
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

fn random_init(params: &ProblemParams, grid: &SpectralGrid, margin: f64, seed: u64) -> Result<Field> {
    let (inner, width) = ascent_band(params, margin)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<C64> = (0..grid.len())
        .map(|i| {
            let xi = grid.xi_vec(i);
            let rho = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
            let b = shell_bump(rho, inner, width);
            let z = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            z * b
        })
        .collect();
    FftPlan::new(*grid).inverse_in_place(&mut data);
    let re: Vec<f64> = data.iter().map(|z| z.re).collect();
    Field::from_real(*grid, &re)
}

/// Average over the hyperoctahedral group (axis reflections x_k ↦ −x_k and
/// axis permutations). On the offset grid index j reflects to M − j.
pub fn symmetrize(grid: &SpectralGrid, v: &[f64]) -> Vec<f64> {
    let m = grid.m;
    let dim = grid.dim;
    let refl = |j: usize| (m - j) % m;
    let mut cur = v.to_vec();
    for ax in 0..dim {
        let prev = cur.clone();
        cur = par::map_range(prev.len(), |i| {
            let mut mi = grid.unravel(i);
            mi[ax] = refl(mi[ax]);
            0.5 * (prev[i] + prev[grid.ravel(&mi[..dim])])
        });
    }
    let perms: Vec<Vec<usize>> = match dim {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]],
    };
    let w = 1.0 / perms.len() as f64;
    par::map_range(cur.len(), |i| {
        let mi = grid.unravel(i);
        let mut s = 0.0;
        for p in &perms {
            let mut mj = [0usize; 3];
            for ax in 0..dim {
                mj[ax] = mi[p[ax]];
            }
            s += cur[grid.ravel(&mj[..dim])];
        }
        s * w
    })
}

struct Ray {
    a: f64,
    b: f64,
}

fn ray(problem: &DualProblem, v: &[f64], kv: &[f64]) -> Ray {
    let pc = problem.params.p_conj();
    Ray { a: norm_pow(&problem.grid, v, pc), b: integral_product(&problem.grid, v, kv) }
}

/// Maximum of t ↦ J(tv) for B = ∫vKv > 0.
fn ray_max(pc: f64, r: &Ray) -> f64 {
    (1.0 / pc - 0.5) * (r.a.powf(2.0 / pc) / r.b).powf(pc / (2.0 - pc))
}

/// Run the iteration; the returned state records whether it converged.
pub fn mountain_pass_run(problem: &DualProblem, opts: &SolverOptions) -> Result<DualState> {
    let grid = problem.grid;
    let pc = problem.params.p_conj();
    let p = problem.params.p;
    let (z, seed) = match opts.init {
        Init::AscentZ => (build_ascent_z(&problem.params, &grid, opts.margin)?, None),
        Init::Random(s) => (random_init(&problem.params, &grid, opts.margin, s)?, Some(s)),
    };
    let sym = |x: Vec<f64>| if opts.symmetrize { symmetrize(&grid, &x) } else { x };
    let ball = problem.source_radius;
    let z = z.real_part();
    let mut v: Vec<f64> = (0..grid.len()).map(|i| if grid.radius(i) <= ball { z[i] } else { 0.0 }).collect();
    v = sym(v);
    let mut kv = problem.k_map(&v);
    let mut r = ray(problem, &v, &kv);
    if !(r.b > 0.0) {
        return Err(Error::Domain(format!("initial guess has nonpositive quadratic form {:.3e}", r.b)));
    }
    let project = |v: &mut Vec<f64>, kv: &mut Vec<f64>, r: &Ray| -> Result<()> {
        let t = (r.a / r.b).powf(1.0 / (2.0 - pc));
        for x in v.iter_mut() {
            *x *= t;
        }
        for x in kv.iter_mut() {
            *x *= t;
        }
        let n = norm_pow(&grid, v, pc).powf(1.0 / pc);
        if !(n >= 1e-12) {
            return Err(Error::DegenerateCollapse(n));
        }
        Ok(())
    };
    project(&mut v, &mut kv, &r)?;
    r = ray(problem, &v, &kv);

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut gn = problem.grad_norm(&v, &kv);
    let mut j = ray_max(pc, &r);
    while iterations < opts.max_iter {
        let defect = (j - (1.0 / pc - 0.5) * r.a).abs() / j.abs();
        if gn <= opts.tol && defect <= opts.tol {
            converged = true;
            break;
        }
        let t = power_map(&kv, p);
        let d: Vec<f64> = t.iter().zip(&v).map(|(a, b)| a - b).collect();
        let kd = problem.k_map(&d);
        let phi0 = j;
        let mut theta = 1.0;
        let (vn, kn, rn) = loop {
            let vn: Vec<f64> = v.iter().zip(&d).map(|(a, b)| a + theta * b).collect();
            let kn: Vec<f64> = kv.iter().zip(&kd).map(|(a, b)| a + theta * b).collect();
            let rn = ray(problem, &vn, &kn);
            if rn.b > 0.0 && ray_max(pc, &rn) <= phi0 {
                break (vn, kn, rn);
            }
            theta *= 0.5;
            if theta < 1e-12 {
                break (vn, kn, rn);
            }
        };
        if theta < 1e-12 {
            // no descent along the fixed-point direction
            break;
        }
        v = vn;
        kv = kn;
        project(&mut v, &mut kv, &rn)?;
        if opts.symmetrize {
            v = sym(v);
            kv = sym(kv);
        }
        r = ray(problem, &v, &kv);
        j = ray_max(pc, &r);
        gn = problem.grad_norm(&v, &kv);
        iterations += 1;
        trace.push(TraceEntry { j, grad_norm: gn, step: theta });
    }
    if !converged {
        let defect = (j - (1.0 / pc - 0.5) * r.a).abs() / j.abs();
        converged = gn <= opts.tol && defect <= opts.tol;
    }
    let j_value = r.a / pc - 0.5 * r.b;
    Ok(DualState { v: Field::from_real(grid, &v)?, j_value, grad_norm: gn, iterations, trace, converged, seed })
}

/// As [`mountain_pass_run`], failing with NoConvergence when the tolerance is missed.
pub fn mountain_pass_solve(problem: &DualProblem, opts: &SolverOptions) -> Result<DualState> {
    let st = mountain_pass_run(problem, opts)?;
    if st.converged {
        Ok(st)
    } else {
        Err(Error::NoConvergence { iterations: st.iterations, grad_norm: st.grad_norm })
    }
}

#[derive(Debug, Clone)]
pub struct Primal {
    pub u: Field,
    pub f: Field,
    /// ‖v − Γ_env^{1/p′}|u|^{p−2}u‖_{p′} / ‖v‖_{p′}
    pub consistency: f64,
    /// ‖Lu − f‖₂/‖f‖₂ on the ball where Γ_env = Γ
    pub pde_residual: f64,
}

/// u = 𝐑(Γ_env^{1/p} v), f = Γ_env|u|^{p−2}u with both defects.
pub fn recover_primal_unchecked(problem: &DualProblem, v: &Field) -> Result<Primal> {
    v.expect(Domain::Physical)?;
    let grid = problem.grid;
    let p = problem.params.p;
    let pc = problem.params.p_conj();
    let vr = v.real_part();
    let wv: Vec<f64> = vr.iter().zip(&problem.weight).map(|(a, b)| a * b).collect();
    let u = problem.resolvent.apply_real(&wv);
    let pu = power_map(&u, p);
    let f: Vec<f64> = pu.iter().zip(&problem.gamma_env).map(|(a, g)| a * g).collect();
    let back: Vec<f64> =
        pu.iter().zip(&problem.gamma_env).zip(&vr).map(|((a, g), x)| x - g.powf(1.0 / pc) * a).collect();
    let vn = lp_norm_real(&grid, &vr, pc);
    let consistency = if vn > 0.0 { lp_norm_real(&grid, &back, pc) / vn } else { lp_norm_real(&grid, &back, pc) };
    let uf = Field::from_real(grid, &u)?;
    let ff = Field::from_real(grid, &f)?;
    let pde = if f.iter().all(|&x| x == 0.0) {
        0.0
    } else {
        pde_residual(&uf, &ff, &problem.params, Some(&problem.exact_mask()))?
    };
    Ok(Primal { u: uf, f: ff, consistency, pde_residual: pde })
}

pub fn recover_primal(problem: &DualProblem, state: &DualState, tol_consistency: f64, tol_pde: f64) -> Result<Primal> {
    let pr = recover_primal_unchecked(problem, &state.v)?;
    if pr.consistency > tol_consistency || pr.pde_residual > tol_pde {
        return Err(Error::ConsistencyFailure { dual: pr.consistency, pde: pr.pde_residual });
    }
    Ok(pr)
}
