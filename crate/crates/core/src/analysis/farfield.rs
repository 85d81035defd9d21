//! Farfield amplitudes U_f and the annular farfield error.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::restriction::{sphere_restriction, Directions};
use crate::error::{Error, Result};
use crate::kernels::{Case, ProblemParams};
use crate::par;
use crate::spectral::{Domain, Field, SpectralGrid};

/// Inner radius below which Re U_f is not synthesized.
pub const DEFAULT_INNER_CUTOFF: f64 = 2.0;

/// Angular oversampling of the interpolation tables.
const TABLE_OVERSAMPLE: usize = 16;

/// U_f(x) = A1(ω) e^{i(k1 r − φ)}/r^d − A2(ω) e^{i(k2 r − φ)}/r^d − m/r
/// with ω = x/r, φ = (N−3)π/4 and d = (N−1)/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarfieldAmplitude {
    pub case: Case,
    pub dim: usize,
    pub k1: f64,
    pub k2: Option<f64>,
    pub directions: Directions,
    pub amp1: Vec<C64>,
    pub amp2: Option<Vec<C64>>,
    pub monopole: Option<f64>,
    pub phase_shift: f64,
    pub decay_exponent: f64,
}

fn prefactor(params: &ProblemParams, a: f64) -> f64 {
    let n = params.dim as f64;
    a.powf((n - 3.0) / 4.0) / params.disc() * (PI / 2.0).sqrt()
}

pub fn farfield_amplitude(f: &Field, params: &ProblemParams, dirs: &Directions) -> Result<FarfieldAmplitude> {
    f.expect(Domain::Physical)?;
    if f.grid.dim != params.dim {
        return Err(Error::GridMismatch(format!("field N = {}, params N = {}", f.grid.dim, params.dim)));
    }
    if f.values.iter().any(|z| z.im != 0.0) {
        return Err(Error::Domain("farfield amplitudes are defined for real f".into()));
    }
    let k1 = params.a1.sqrt();
    let c1 = prefactor(params, params.a1);
    let amp1 = sphere_restriction(f, k1, dirs)?.into_iter().map(|z| z * c1).collect();
    let (k2, amp2) = match params.case {
        Case::TwoHelmholtz => {
            let k2 = params.a2.sqrt();
            let c2 = prefactor(params, params.a2);
            (Some(k2), Some(sphere_restriction(f, k2, dirs)?.into_iter().map(|z| z * c2).collect()))
        }
        _ => (None, None),
    };
    let monopole = match (params.case, params.dim) {
        (Case::ZeroAlpha, 3) => {
            let total: f64 = par::sum_range(f.values.len(), |i| f.values[i].re) * f.grid.cell_volume();
            Some(total / (4.0 * PI * params.beta.abs()))
        }
        (Case::ZeroAlpha, _) => {
            return Err(Error::CaseMismatch("alpha = 0 farfield on a grid requires N = 3".into()));
        }
        _ => None,
    };
    let n = params.dim as f64;
    Ok(FarfieldAmplitude {
        case: params.case,
        dim: params.dim,
        k1,
        k2,
        directions: dirs.clone(),
        amp1,
        amp2,
        monopole,
        phase_shift: (n - 3.0) * PI / 4.0,
        decay_exponent: (n - 1.0) / 2.0,
    })
}

/// Periodic table of a trigonometric interpolant with 4-point Lagrange lookup.
#[derive(Debug, Clone)]
struct Ring {
    table: Vec<C64>,
}

impl Ring {
    fn new(samples: &[C64]) -> Self {
        let n = samples.len();
        let half = n / 2;
        let coef: Vec<(i64, C64)> = (0..n)
            .map(|mm| {
                let m = mm as i64 - half as i64;
                let mut c = C64::new(0.0, 0.0);
                for (j, a) in samples.iter().enumerate() {
                    c += a * C64::from_polar(1.0, -2.0 * PI * (m * j as i64) as f64 / n as f64);
                }
                // the Nyquist mode is split evenly between ±n/2
                let w = if n.is_multiple_of(2) && mm == 0 { 0.5 } else { 1.0 };
                (m, c * (w / n as f64))
            })
            .collect();
        let mut coef = coef;
        if n.is_multiple_of(2) {
            let (_, c) = coef[0];
            coef.push((half as i64, c));
        }
        let nt = TABLE_OVERSAMPLE * n;
        let table = par::map_range(nt, |t| {
            let th = 2.0 * PI * t as f64 / nt as f64;
            coef.iter().map(|&(m, c)| c * C64::from_polar(1.0, m as f64 * th)).sum()
        });
        Self { table }
    }

    fn eval(&self, theta: f64) -> C64 {
        let nt = self.table.len();
        let s = theta.rem_euclid(2.0 * PI) / (2.0 * PI) * nt as f64;
        let i = s.floor() as i64;
        let t = s - i as f64;
        let at = |k: i64| self.table[k.rem_euclid(nt as i64) as usize];
        // cubic Lagrange on nodes −1, 0, 1, 2
        let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        at(i - 1) * w0 + at(i) * w1 + at(i + 1) * w2 + at(i + 2) * w3
    }
}

/// Angular interpolant of amplitude samples on a direction raster.
#[derive(Debug, Clone)]
pub struct AngularInterpolant {
    rings: Vec<Ring>,
    nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl AngularInterpolant {
    pub fn new(dirs: &Directions, samples: &[C64]) -> Self {
        let na = dirs.n_azimuth;
        let rings: Vec<Ring> = samples.chunks(na).map(Ring::new).collect();
        let nodes = dirs.polar_nodes.clone();
        let bary = (0..nodes.len())
            .map(|i| {
                let p: f64 = (0..nodes.len()).filter(|&j| j != i).map(|j| nodes[i] - nodes[j]).product();
                1.0 / p
            })
            .collect();
        Self { rings, nodes, bary }
    }

    /// Value at the unit direction ω.
    pub fn eval(&self, w: &[f64]) -> C64 {
        let phi = w[1].atan2(w[0]);
        if self.nodes.is_empty() {
            return self.rings[0].eval(phi);
        }
        let t = w[2].clamp(-1.0, 1.0);
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for (i, ring) in self.rings.iter().enumerate() {
            let d = t - self.nodes[i];
            if d == 0.0 {
                return ring.eval(phi);
            }
            let c = self.bary[i] / d;
            num += ring.eval(phi) * c;
            den += c;
        }
        num / den
    }
}

/// Pointwise evaluator of U_f.
#[derive(Debug, Clone)]
pub struct FarfieldSynth {
    amp: FarfieldAmplitude,
    i1: AngularInterpolant,
    i2: Option<AngularInterpolant>,
}

impl FarfieldSynth {
    pub fn new(amp: &FarfieldAmplitude) -> Self {
        let i1 = AngularInterpolant::new(&amp.directions, &amp.amp1);
        let i2 = amp.amp2.as_ref().map(|a| AngularInterpolant::new(&amp.directions, a));
        Self { amp: amp.clone(), i1, i2 }
    }

    /// U_f(x) for x ≠ 0.
    pub fn eval(&self, x: &[f64]) -> C64 {
        let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        let mut w = [0.0; 3];
        for (k, t) in x.iter().enumerate() {
            w[k] = t / r;
        }
        let a = &self.amp;
        let decay = r.powf(-a.decay_exponent);
        let mut u = self.i1.eval(&w) * C64::from_polar(decay, a.k1 * r - a.phase_shift);
        if let (Some(i2), Some(k2)) = (&self.i2, a.k2) {
            u -= i2.eval(&w) * C64::from_polar(decay, k2 * r - a.phase_shift);
        }
        if let Some(m) = a.monopole {
            u -= m / r;
        }
        u
    }
}

/// Re U_f on every sample with |x| ≥ r_min, zero inside.
pub fn synthesize_re_uf(amp: &FarfieldAmplitude, grid: &SpectralGrid, r_min: f64) -> Result<Field> {
    if grid.dim != amp.dim {
        return Err(Error::GridMismatch(format!("grid N = {}, amplitude N = {}", grid.dim, amp.dim)));
    }
    let synth = FarfieldSynth::new(amp);
    Ok(Field::from_fn(*grid, |x| {
        let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if r < r_min || r == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(synth.eval(x).re, 0.0)
        }
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarfieldErrorReport {
    pub r_values: Vec<f64>,
    pub errors: Vec<f64>,
    pub inner_cutoff: f64,
    pub directions: usize,
}

impl FarfieldErrorReport {
    /// Whether the errors of the last `count` radii strictly decrease.
    pub fn decreasing_tail(&self, count: usize) -> bool {
        let n = self.errors.len();
        n >= count && self.errors[n - count..].windows(2).all(|w| w[1] < w[0])
    }
}

/// (1/R) ∫_{r_min ≤ |x| ≤ R} |u − Re U_f|² dx for each R.
///
/// u lives on its own grid, which may be wider than that of f.
pub fn farfield_error_with(
    u: &Field,
    amp: &FarfieldAmplitude,
    r_values: &[f64],
    r_min: f64,
) -> Result<FarfieldErrorReport> {
    u.expect(Domain::Physical)?;
    let grid = u.grid;
    for &r in r_values {
        if !(r > r_min) || r > grid.half_width {
            return Err(Error::Domain(format!(
                "radius {r} must lie in ({r_min}, {}] (the ball inscribed in the box)",
                grid.half_width
            )));
        }
    }
    let synth = synthesize_re_uf(amp, &grid, r_min)?;
    let rad: Vec<f64> = par::map_range(grid.len(), |i| grid.radius(i));
    let dv = grid.cell_volume();
    let errors = r_values
        .iter()
        .map(|&big_r| {
            let s = par::sum_range(grid.len(), |i| {
                let r = rad[i];
                if r >= r_min && r <= big_r {
                    (u.values[i].re - synth.values[i].re).powi(2)
                } else {
                    0.0
                }
            });
            s * dv / big_r
        })
        .collect();
    Ok(FarfieldErrorReport {
        r_values: r_values.to_vec(),
        errors,
        inner_cutoff: r_min,
        directions: amp.directions.len(),
    })
}

/// farfield_error_with using the standard direction set and inner cutoff.
pub fn farfield_error(u: &Field, f: &Field, params: &ProblemParams, r_values: &[f64]) -> Result<FarfieldErrorReport> {
    let dirs = Directions::standard(params.dim)?;
    let amp = farfield_amplitude(f, params, &dirs)?;
    farfield_error_with(u, &amp, r_values, DEFAULT_INNER_CUTOFF)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(grid: SpectralGrid) -> Field {
        Field::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|t| t * t).sum();
            C64::new((-r2).exp() * (1.0 + 0.5 * x[0]), 0.0)
        })
    }

    #[test]
    fn three_dimensional_prefactor_has_no_phase() {
        let p = ProblemParams::linear(-1.0, 0.0, 3).unwrap();
        let g = SpectralGrid::new(3, 32, 7.0).unwrap();
        let f = Field::from_fn(g, |x| C64::new((-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0));
        let d = Directions::sphere(4, 8).unwrap();
        let a = farfield_amplitude(&f, &p, &d).unwrap();
        assert_eq!(a.phase_shift, 0.0);
        let want = (PI / 2.0).sqrt() / 2.0 * (-0.5f64).exp();
        for z in &a.amp1 {
            assert!((z.re - want).abs() < 1e-10 && z.im.abs() < 1e-10);
        }
        assert!(a.amp2.is_none() && a.monopole.is_none());
    }

    #[test]
    fn zero_alpha_monopole_is_scaled_mass() {
        let p = ProblemParams::linear(0.0, -2.0, 3).unwrap();
        let g = SpectralGrid::new(3, 32, 7.0).unwrap();
        let f = Field::from_fn(g, |x| C64::new((-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0));
        let a = farfield_amplitude(&f, &p, &Directions::sphere(4, 8).unwrap()).unwrap();
        let mass = (2.0 * PI).powf(1.5);
        let m = a.monopole.unwrap();
        assert!(m > 0.0);
        assert!((m - mass / (8.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn two_helmholtz_radii_and_prefactor() {
        let p = ProblemParams::linear(4.0, -5.0, 2).unwrap();
        let g = SpectralGrid::new(2, 32, 8.0).unwrap();
        let f = blob(g);
        let d = Directions::circle(16).unwrap();
        let a = farfield_amplitude(&f, &p, &d).unwrap();
        assert_eq!(a.k1, 2.0);
        assert_eq!(a.k2, Some(1.0));
        let raw1 = sphere_restriction(&f, 2.0, &d).unwrap();
        let raw2 = sphere_restriction(&f, 1.0, &d).unwrap();
        let c = (PI / 2.0).sqrt() / 3.0;
        for i in 0..d.len() {
            assert!((a.amp1[i] - raw1[i] * c * 4f64.powf(-0.25)).norm() < 1e-14);
            assert!((a.amp2.as_ref().unwrap()[i] - raw2[i] * c).norm() < 1e-14);
        }
    }

    #[test]
    fn interpolant_reproduces_band_limited_data() {
        let d = Directions::circle(32).unwrap();
        let f = |t: f64| C64::new((3.0 * t).cos(), (2.0 * t).sin() + 0.3);
        let s: Vec<C64> = d.points.iter().map(|p| f(p[1].atan2(p[0]))).collect();
        let ip = AngularInterpolant::new(&d, &s);
        for &t in &[0.1f64, 1.234, -2.5, 3.0] {
            assert!((ip.eval(&[t.cos(), t.sin()]) - f(t)).norm() < 1e-5);
        }
        // polynomial in cos θ on each azimuthal mode: exact up to the table lookup
        let d3 = Directions::sphere(8, 16).unwrap();
        let g = |w: &[f64]| C64::new(w[2] * w[2] + w[2], w[2].powi(3));
        let s3: Vec<C64> = d3.points.iter().map(|p| g(p)).collect();
        let ip3 = AngularInterpolant::new(&d3, &s3);
        for w in [[0.0, 0.6, 0.8], [0.48, -0.6, 0.64], [1.0, 0.0, 0.0]] {
            assert!((ip3.eval(&w) - g(&w)).norm() < 1e-10);
        }
        // odd azimuthal modes carry a sin θ factor and converge algebraically
        let d3 = Directions::standard(3).unwrap();
        let g = |w: &[f64]| C64::new(w[0] + w[1] * w[2], 0.0);
        let s3: Vec<C64> = d3.points.iter().map(|p| g(p)).collect();
        let ip3 = AngularInterpolant::new(&d3, &s3);
        for w in [[0.0, 0.6, 0.8], [0.48, -0.6, 0.64], [1.0, 0.0, 0.0]] {
            assert!((ip3.eval(&w) - g(&w)).norm() < 1e-3);
        }
    }

    #[test]
    fn exact_farfield_has_zero_error_and_spurious_wave_plateaus() {
        let p = ProblemParams::linear(-1.0, 0.0, 2).unwrap();
        let g = SpectralGrid::new(2, 64, 8.0).unwrap();
        let f = blob(g);
        let amp = farfield_amplitude(&f, &p, &Directions::standard(2).unwrap()).unwrap();
        let big = SpectralGrid::new(2, 256, 32.0).unwrap();
        let u = synthesize_re_uf(&amp, &big, DEFAULT_INNER_CUTOFF).unwrap();
        let radii = [8.0, 16.0, 24.0, 32.0];
        let rep = farfield_error_with(&u, &amp, &radii, DEFAULT_INNER_CUTOFF).unwrap();
        assert!(rep.errors.iter().all(|&e| e == 0.0));
        let mut bad = u.clone();
        for (i, z) in bad.values.iter_mut().enumerate() {
            let r = big.radius(i);
            if r >= DEFAULT_INNER_CUTOFF {
                z.re += 0.1 * (1.7 * r).cos() / r.sqrt();
            }
        }
        let rep = farfield_error_with(&bad, &amp, &radii, DEFAULT_INNER_CUTOFF).unwrap();
        let last = rep.errors[3];
        assert!(last > 0.01);
        assert!((rep.errors[2] - last).abs() < 0.2 * last);
    }
}
