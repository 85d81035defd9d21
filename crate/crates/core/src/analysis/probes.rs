//! Empirical probes of the restriction and resolvent estimates.
//!
//! None of these certify an operator norm; they report ratios over seeded
//! families and the trends predicted by the estimates.

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::decay::least_squares;
use super::region::{in_estimate_region, Q};
use super::restriction::{sphere_restriction, Directions};
use crate::error::{Error, Result};
use crate::kernels::special::{sphere_area, sphere_average};
use crate::kernels::{quartic_green, ProblemParams};
use crate::par;
use crate::resolvent::truncation::smooth_step;
use crate::resolvent::{Geometry, QuarticResolvent, Window};
use crate::spectral::{lp_norm, Field, SpectralGrid};

/// Growth exponents within this distance of 0 count as logarithmic.
pub const LOG_BAND: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailVerdict {
    Convergent,
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub r_exponent: f64,
    pub radii: Vec<f64>,
    /// ∫_{1<|x|<R} |G|^r dx for each R
    pub integrals: Vec<f64>,
    /// fitted exponent s in dI/d(log R) ~ R^s over the outer radii
    pub growth_rate: f64,
    pub verdict: TailVerdict,
    pub logarithmic: bool,
    /// the analytic criterion r(N−1)/2 > N
    pub analytic_convergent: bool,
    /// |I(R_last) − I(R_prev)| / I(R_last)
    pub last_relative_increment: f64,
}

/// Radial quadrature of |G|^r over 1 < |x| < R for increasing R.
pub fn tail_integrability(params: &ProblemParams, r_exponent: f64, radii: &[f64]) -> Result<TailReport> {
    if radii.len() < 3 || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 1.0) {
        return Err(Error::Domain("need at least three increasing radii above 1".into()));
    }
    if !(r_exponent > 0.0) {
        return Err(Error::ExponentOutOfRange(r_exponent));
    }
    let dim = params.dim;
    let rule = GaussLegendre::new(8).map_err(|e| Error::QuadratureFailure(e.to_string()))?;
    let nodes = rule.as_node_weight_pairs();
    let area = sphere_area(dim);
    let seg = 0.5;
    let mut edges = vec![1.0];
    edges.extend_from_slice(radii);
    let pieces: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
    let increments: Vec<f64> = pieces
        .iter()
        .map(|&(a, b)| {
            let n = ((b - a) / seg).ceil().max(1.0) as usize;
            let h = (b - a) / n as f64;
            par::sum_range(n, |j| {
                let lo = a + j as f64 * h;
                let mut s = 0.0;
                for &(x, w) in nodes.iter() {
                    let r = lo + 0.5 * h * (x + 1.0);
                    let g = quartic_green(params, r).map(|z| z.norm()).unwrap_or(f64::NAN);
                    s += w * 0.5 * h * g.powf(r_exponent) * r.powi(dim as i32 - 1);
                }
                s
            }) * area
        })
        .collect();
    let mut integrals = Vec::with_capacity(radii.len());
    let mut acc = 0.0;
    for inc in &increments {
        acc += inc;
        integrals.push(acc);
    }
    if integrals.iter().any(|v| !v.is_finite()) {
        return Err(Error::QuadratureFailure("non-finite kernel values in the tail".into()));
    }
    // density per unit log-radius on the outer shells (skip the first piece from 1)
    let fit_from = pieces.len().saturating_sub(4).max(1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (fit_from..pieces.len())
        .map(|k| {
            let (a, b) = pieces[k];
            ((a * b).sqrt().ln(), (increments[k] / (b / a).ln()).ln())
        })
        .unzip();
    let (growth_rate, _) = least_squares(&xs, &ys);
    let logarithmic = growth_rate.abs() <= LOG_BAND;
    let verdict = if growth_rate < -LOG_BAND { TailVerdict::Convergent } else { TailVerdict::Divergent };
    let n = dim as f64;
    let last = integrals.len() - 1;
    Ok(TailReport {
        r_exponent,
        radii: radii.to_vec(),
        last_relative_increment: (integrals[last] - integrals[last - 1]).abs() / integrals[last],
        integrals,
        growth_rate,
        verdict,
        logarithmic,
        analytic_convergent: r_exponent * (n - 1.0) / 2.0 > n,
    })
}

/// Dyadic radii 2, 4, …, 2^k.
pub fn dyadic_radii(k: u32) -> Vec<f64> {
    (1..=k).map(|j| 2f64.powi(j as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl RatioStats {
    pub fn of(v: &[f64]) -> Self {
        let count = v.len();
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = if count > 0 { v.iter().sum::<f64>() / count as f64 } else { f64::NAN };
        Self { count, min, max, mean }
    }
}

/// Upper end 2(N+1)/(N+3) of the Stein–Tomas exponent range.
pub fn stein_tomas_endpoint(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * (n + 1.0) / (n + 3.0)
}

/// (∫_{S^{N−1}} |ĝ(rω)|² dσ)^{1/2} / (r^{−N(1−1/p)} ‖g‖_p) for each r.
pub fn stein_tomas_probe(g: &Field, radii: &[f64], p: f64) -> Result<Vec<f64>> {
    let dim = g.grid.dim;
    if !(p >= 1.0 && p <= stein_tomas_endpoint(dim) * (1.0 + 1e-12)) {
        return Err(Error::ExponentOutOfRange(p));
    }
    let dirs = Directions::standard(dim)?;
    let norm = lp_norm(g, p)?;
    if !(norm > 0.0) {
        return Err(Error::Domain("zero field".into()));
    }
    let n = dim as f64;
    radii
        .iter()
        .map(|&r| {
            let vals = sphere_restriction(g, r, &dirs)?;
            Ok(dirs.integrate_sq(&vals).sqrt() / (r.powf(-n * (1.0 - 1.0 / p)) * norm))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub count: usize,
    pub seed: u64,
    /// all bumps vanish outside this radius
    pub support_radius: f64,
    pub sigma_range: (f64, f64),
    pub max_modulation: f64,
}

impl FamilySpec {
    pub fn new(count: usize, seed: u64, support_radius: f64) -> Self {
        Self { count, seed, support_radius, sigma_range: (0.5, 1.0), max_modulation: 2.0 }
    }
}

/// Seeded modulated Gaussian bumps, smoothly cut off at the support radius.
/// Members are generated from independent streams, so member j depends only
/// on (seed, j).
pub fn bump_family(grid: &SpectralGrid, spec: &FamilySpec) -> Vec<Field> {
    let dim = grid.dim;
    (0..spec.count)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(j as u64);
            let sigma = rng.random_range(spec.sigma_range.0..=spec.sigma_range.1);
            let reach = (spec.support_radius - 1.0 - 2.0 * sigma).max(0.0);
            let mut c = [0.0; 3];
            for ck in c.iter_mut().take(dim) {
                *ck = rng.random_range(-1.0..=1.0) * reach / (dim as f64).sqrt();
            }
            let mut k = [0.0; 3];
            for kk in k.iter_mut().take(dim) {
                *kk = rng.random_range(-1.0..=1.0) * spec.max_modulation / (dim as f64).sqrt();
            }
            let phase = rng.random_range(0.0..2.0 * PI);
            let s = spec.support_radius;
            Field::from_fn(*grid, move |x| {
                let mut d2 = 0.0;
                let mut kx = 0.0;
                let mut r2 = 0.0;
                for a in 0..x.len() {
                    d2 += (x[a] - c[a]).powi(2);
                    kx += k[a] * x[a];
                    r2 += x[a] * x[a];
                }
                let cut = 1.0 - smooth_step(r2.sqrt() - (s - 1.0)).0;
                C64::new(cut * (-d2 / (2.0 * sigma * sigma)).exp() * (kx + phase).cos(), 0.0)
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinTomasFamilyReport {
    pub p: f64,
    pub radii: Vec<f64>,
    /// ratios[j][i]: member j at radius i
    pub ratios: Vec<Vec<f64>>,
    pub stats: RatioStats,
}

pub fn stein_tomas_family(
    grid: &SpectralGrid,
    radii: &[f64],
    p: f64,
    spec: &FamilySpec,
) -> Result<SteinTomasFamilyReport> {
    let fam = bump_family(grid, spec);
    let ratios = fam.iter().map(|g| stein_tomas_probe(g, radii, p)).collect::<Result<Vec<_>>>()?;
    let flat: Vec<f64> = ratios.iter().flatten().cloned().collect();
    Ok(SteinTomasFamilyReport { p, radii: radii.to_vec(), stats: RatioStats::of(&flat), ratios })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialRestrictionReport {
    pub r_exponent: f64,
    pub sphere_radii: Vec<f64>,
    pub transform: Vec<f64>,
    pub norm: f64,
    pub ratio: f64,
}

/// sup_ρ |f̂(ρ)| / ‖f‖_r for a radial profile f(|x|) supported in [0, support].
///
/// f̂(ρ) = (2π)^{−N/2} |S^{N−1}| ∫ f(s) Λ_N(ρs) s^{N−1} ds with Λ_N the
/// normalized spherical mean of e^{−iξ·x}.
pub fn radial_restriction_probe<F>(
    dim: usize,
    profile: F,
    support: f64,
    r_exponent: f64,
    sphere_radii: &[f64],
) -> Result<RadialRestrictionReport>
where
    F: Fn(f64) -> f64 + Sync,
{
    let n = dim as f64;
    if !(r_exponent >= 1.0) || r_exponent * (n + 1.0) >= 2.0 * n {
        return Err(Error::ExponentOutOfRange(r_exponent));
    }
    let rule = GaussLegendre::new(16).map_err(|e| Error::QuadratureFailure(e.to_string()))?;
    let pairs = rule.as_node_weight_pairs();
    let pieces = (support / 0.125).ceil().max(1.0) as usize;
    let h = support / pieces as f64;
    let mut nodes = Vec::with_capacity(pieces * pairs.len());
    for j in 0..pieces {
        for &(x, w) in pairs.iter() {
            let s = j as f64 * h + 0.5 * h * (x + 1.0);
            nodes.push((s, w * 0.5 * h * s.powi(dim as i32 - 1), profile(s)));
        }
    }
    let area = sphere_area(dim);
    let norm = (area * nodes.iter().map(|&(_, w, f)| w * f.abs().powf(r_exponent)).sum::<f64>()).powf(1.0 / r_exponent);
    let c = (2.0 * PI).powf(-n / 2.0) * area;
    let transform: Vec<f64> = sphere_radii
        .iter()
        .map(|&rho| c * nodes.iter().map(|&(s, w, f)| w * f * sphere_average(dim, rho * s)).sum::<f64>())
        .collect();
    let sup = transform.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(RadialRestrictionReport { r_exponent, sphere_radii: sphere_radii.to_vec(), transform, norm, ratio: sup / norm })
}

/// Seeded radial profiles: Gaussian cores and Gaussian shells, cut off at 8.
pub fn radial_restriction_family(
    dim: usize,
    r_exponent: f64,
    sphere_radii: &[f64],
    count: usize,
    seed: u64,
) -> Result<(Vec<f64>, RatioStats)> {
    let ratios = (0..count)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let sigma = rng.random_range(0.3..=1.5);
            let centre = if j % 2 == 0 { 0.0 } else { rng.random_range(1.0..=4.0) };
            let prof =
                move |s: f64| (-(s - centre).powi(2) / (2.0 * sigma * sigma)).exp() * (1.0 - smooth_step(s - 7.0).0);
            radial_restriction_probe(dim, prof, 8.0, r_exponent, sphere_radii).map(|r| r.ratio)
        })
        .collect::<Result<Vec<f64>>>()?;
    let stats = RatioStats::of(&ratios);
    Ok((ratios, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormProbeSpec {
    pub family: FamilySpec,
    pub points_per_axis: usize,
    pub half_width: f64,
    /// observation ball radius; the probe also runs at twice this value
    pub window: f64,
}

impl NormProbeSpec {
    pub fn standard(dim: usize, seed: u64) -> Self {
        match dim {
            2 => Self { family: FamilySpec::new(20, seed, 4.0), points_per_axis: 256, half_width: 32.0, window: 8.0 },
            _ => Self { family: FamilySpec::new(20, seed, 2.0), points_per_axis: 64, half_width: 16.0, window: 4.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormProbeReport {
    pub inv_p: String,
    pub inv_q: String,
    pub in_region: bool,
    pub windows: [f64; 2],
    pub ratios: [Vec<f64>; 2],
    pub stats: [RatioStats; 2],
    /// |max(2W) − max(W)| / max(W)
    pub relative_change: f64,
    pub stable: bool,
    /// stability is only a claim inside the region
    pub stability_asserted: bool,
    pub note: String,
}

/// Contract threshold on the window-doubling change of the max ratio.
pub const NORM_PROBE_STABILITY: f64 = 0.25;

fn q_to_f64(v: Q) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

/// ‖𝕽f‖_{L^q(B_W)} / ‖f‖_p over a seeded family at W and 2W.
pub fn norm_probe(params: &ProblemParams, inv_p: Q, inv_q: Q, spec: &NormProbeSpec) -> Result<NormProbeReport> {
    let dim = params.dim;
    let in_region = in_estimate_region(dim as u32, inv_p, inv_q);
    let grid = SpectralGrid::new(dim, spec.points_per_axis, spec.half_width)?;
    let p = 1.0 / q_to_f64(inv_p);
    let qv = if *inv_q.numer() == 0 { f64::INFINITY } else { 1.0 / q_to_f64(inv_q) };
    if !(p >= 1.0) || !(qv >= 1.0) {
        return Err(Error::ExponentOutOfRange(p.min(qv)));
    }
    let fam = bump_family(&grid, &spec.family);
    let windows = [spec.window, 2.0 * spec.window];
    let mut ratios: [Vec<f64>; 2] = [vec![], vec![]];
    for (wi, &w) in windows.iter().enumerate() {
        let geo = Geometry::new(&grid, Window::Ball(w), spec.family.support_radius)?;
        let res = QuarticResolvent::with_default_schedule(params, &grid, geo)?;
        let mask = geo.window_mask(&grid);
        for f in &fam {
            let u = res.apply(f)?.field;
            let mut masked = u.clone();
            for (z, &m) in masked.values.iter_mut().zip(&mask) {
                if !m {
                    *z = C64::new(0.0, 0.0);
                }
            }
            ratios[wi].push(lp_norm(&masked, qv)? / lp_norm(f, p)?);
        }
    }
    let stats = [RatioStats::of(&ratios[0]), RatioStats::of(&ratios[1])];
    let relative_change = (stats[1].max - stats[0].max).abs() / stats[0].max;
    Ok(NormProbeReport {
        inv_p: inv_p.to_string(),
        inv_q: inv_q.to_string(),
        in_region,
        windows,
        ratios,
        stats,
        relative_change,
        stable: relative_change < NORM_PROBE_STABILITY,
        stability_asserted: in_region,
        note: "ratios over a finite family; stability under window doubling is a surrogate, not an operator norm"
            .into(),
    })
}
