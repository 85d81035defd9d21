//! Shooting from the origin for radial solutions of Δ²u − βΔu + αu = Γ|u|^{p−2}u.
//!
//! With w = Δ_r u the equation becomes the first-order system in
//! (u, u′, w, w′):
//!   u″ + (N−1)/r·u′ = w,
//!   w″ + (N−1)/r·w′ = βw − αu + Γ(r)|u|^{p−2}u.

use ode_solvers::{Dop853, OutputType, System, Vector5};
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::kernels::{GammaSpec, ProblemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    BoundedOscillatory,
    Blowup,
    Undetermined,
}

/// Radial coefficient Γ(r).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadialGamma {
    Constant(f64),
    /// Piecewise linear in r, constant beyond the first and last knots.
    Tabulated {
        r: Vec<f64>,
        values: Vec<f64>,
    },
}

impl RadialGamma {
    pub fn at(&self, r: f64) -> f64 {
        match self {
            RadialGamma::Constant(c) => *c,
            RadialGamma::Tabulated { r: knots, values } => {
                let n = knots.len();
                if r <= knots[0] {
                    return values[0];
                }
                if r >= knots[n - 1] {
                    return values[n - 1];
                }
                let j = knots.partition_point(|&k| k <= r);
                let t = (r - knots[j - 1]) / (knots[j] - knots[j - 1]);
                values[j - 1] * (1.0 - t) + values[j] * t
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            RadialGamma::Constant(c) if c.is_finite() => Ok(()),
            RadialGamma::Tabulated { r, values }
                if !r.is_empty()
                    && r.len() == values.len()
                    && r.windows(2).all(|w| w[1] > w[0])
                    && values.iter().all(|v| v.is_finite()) =>
            {
                Ok(())
            }
            _ => Err(Error::Domain("radial Gamma needs finite values on increasing knots".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootOptions {
    pub rtol: f64,
    /// absolute tolerance in units of max(|u0|, |u2|)
    pub atol: f64,
    /// start of integration; the series expansion covers [0, r0]
    pub r0: f64,
    pub h_max: f64,
    pub max_steps: u32,
    pub overflow: f64,
    pub bound_factor: f64,
    pub min_sign_changes: usize,
    /// overrides the constant Γ of the parameters
    pub gamma: Option<RadialGamma>,
    /// rerun at a 10× looser tolerance and report the change in u(r_end)
    pub estimate_error: bool,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            r0: 1e-3,
            h_max: 0.25,
            max_steps: 2_000_000,
            overflow: 1e6,
            bound_factor: 2.0,
            min_sign_changes: 3,
            gamma: None,
            estimate_error: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTrajectory {
    pub dim: usize,
    pub u0: f64,
    pub u2: f64,
    pub r_max: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
    pub classification: Classification,
    pub blowup_radius: Option<f64>,
    /// identically zero data and trajectory
    pub trivial: bool,
    /// |u(r_end) − u_loose(r_end)| against a run at 10× the tolerance
    pub error_estimate: Option<f64>,
    pub accepted_steps: u32,
    pub rejected_steps: u32,
}

impl RadialTrajectory {
    pub fn u_end(&self) -> f64 {
        *self.u.last().unwrap_or(&0.0)
    }

    pub fn r_end(&self) -> f64 {
        *self.r.last().unwrap_or(&0.0)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,u,du,w,dw")?;
        for i in 0..self.r.len() {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.r[i], self.u[i], self.du[i], self.w[i], self.dw[i]
            )?;
        }
        Ok(())
    }
}

struct RadialSystem {
    dim: f64,
    alpha: f64,
    beta: f64,
    p: f64,
    gamma: RadialGamma,
    overflow: f64,
}

impl RadialSystem {
    fn power(&self, u: f64) -> f64 {
        u.abs().powf(self.p - 2.0) * u
    }
}

// r rides along as y[4] so the system is autonomous: the DOP853 tableau in
// ode_solvers 0.6 evaluates its twelfth stage at c = 0 instead of 1, which
// drops the order to one whenever f depends on the abscissa.
impl System<f64, Vector5<f64>> for RadialSystem {
    fn system(&self, _x: f64, y: &Vector5<f64>, dy: &mut Vector5<f64>) {
        let r = y[4];
        let c = (self.dim - 1.0) / r;
        dy[0] = y[1];
        dy[1] = y[2] - c * y[1];
        dy[2] = y[3];
        dy[3] = self.beta * y[2] - self.alpha * y[0] + self.gamma.at(r) * self.power(y[0]) - c * y[3];
        dy[4] = 1.0;
    }

    fn solout(&mut self, _r: f64, y: &Vector5<f64>, _dy: &Vector5<f64>) -> bool {
        !(y[0].abs() <= self.overflow)
    }
}

/// State at r0 from the regular series u = u0 + c1 r² + c2 r⁴, w = w0 + d1 r²
/// with c1 = u2/2, w0 = N u2, d1 = (βw0 − αu0 + Γ(0)|u0|^{p−2}u0)/(2N) and
/// c2 = d1/(4(N+2)).
pub fn taylor_start(params: &ProblemParams, gamma0: f64, u0: f64, u2: f64, r0: f64) -> [f64; 4] {
    let n = params.dim as f64;
    let w0 = n * u2;
    let rhs = params.beta * w0 - params.alpha * u0 + gamma0 * u0.abs().powf(params.p - 2.0) * u0;
    let d1 = rhs / (2.0 * n);
    let c1 = 0.5 * u2;
    let c2 = d1 / (4.0 * (n + 2.0));
    let r2 = r0 * r0;
    [u0 + c1 * r2 + c2 * r2 * r2, 2.0 * c1 * r0 + 4.0 * c2 * r2 * r0, w0 + d1 * r2, 2.0 * d1 * r0]
}

fn resolve_gamma(params: &ProblemParams, opts: &ShootOptions) -> Result<RadialGamma> {
    let g = match (&opts.gamma, &params.gamma) {
        (Some(g), _) => g.clone(),
        (None, GammaSpec::Constant(c)) => RadialGamma::Constant(*c),
        (None, GammaSpec::Grid(_)) => {
            return Err(Error::Domain("grid Gamma has no radial form; pass a RadialGamma".into()));
        }
    };
    g.validate()?;
    Ok(g)
}

fn check_options(opts: &ShootOptions, r_max: f64) -> Result<()> {
    let ok = opts.rtol > 0.0
        && opts.atol > 0.0
        && opts.r0 > 0.0
        && opts.h_max > 0.0
        && opts.overflow > 0.0
        && opts.bound_factor > 0.0
        && r_max.is_finite()
        && r_max > 4.0 * opts.r0;
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("invalid shooting options or r_max = {r_max}")))
    }
}

struct RawRun {
    r: Vec<f64>,
    y: Vec<[f64; 4]>,
    overflowed_at: Option<f64>,
    accepted: u32,
    rejected: u32,
}

#[allow(clippy::too_many_arguments)]
fn integrate(
    params: &ProblemParams,
    gamma: &RadialGamma,
    u0: f64,
    u2: f64,
    r_max: f64,
    opts: &ShootOptions,
    rtol: f64,
    atol: f64,
) -> Result<RawRun> {
    let start = taylor_start(params, gamma.at(0.0), u0, u2, opts.r0);
    let sys = RadialSystem {
        dim: params.dim as f64,
        alpha: params.alpha,
        beta: params.beta,
        p: params.p,
        gamma: gamma.clone(),
        overflow: opts.overflow,
    };
    let y0 = Vector5::new(start[0], start[1], start[2], start[3], opts.r0);
    let mut stepper = Dop853::from_param(
        sys,
        opts.r0,
        r_max,
        0.0,
        y0,
        rtol,
        atol,
        0.9,
        0.0,
        0.333,
        6.0,
        opts.h_max,
        0.0,
        opts.max_steps,
        u32::MAX,
        OutputType::Sparse,
    );
    let stats = stepper.integrate().map_err(|e| {
        use ode_solvers::dop_shared::IntegrationError as E;
        match e {
            E::StepSizeUnderflow { x } | E::MaxNumStepReached { x, .. } | E::StiffnessDetected { x } => {
                Error::StepFailure(x)
            }
        }
    })?;
    let mut r = vec![opts.r0];
    let mut y = vec![start];
    for (x, v) in stepper.x_out().iter().zip(stepper.y_out()) {
        if *x > *r.last().unwrap() {
            r.push(*x);
            y.push([v[0], v[1], v[2], v[3]]);
        }
    }
    // the stop hook fires on the step that crossed the threshold, which is the last sample
    let last = y.last().unwrap()[0];
    let overflowed_at = (!(last.abs() <= opts.overflow)).then(|| *r.last().unwrap());
    Ok(RawRun { r, y, overflowed_at, accepted: stats.accepted_steps, rejected: stats.rejected_steps })
}

/// Sign changes of u at samples with r ≥ r_from (exact zeros are skipped).
pub fn sign_changes(r: &[f64], u: &[f64], r_from: f64) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for (x, v) in r.iter().zip(u) {
        if *x < r_from || *v == 0.0 {
            continue;
        }
        if last != 0.0 && last.signum() != v.signum() {
            count += 1;
        }
        last = *v;
    }
    count
}

/// Classification of a run that reached r_max without overflow.
pub fn classify_bounded(
    r: &[f64],
    u: &[f64],
    r_max: f64,
    bound_factor: f64,
    min_sign_changes: usize,
) -> Classification {
    let half = 0.5 * r_max;
    let (mut inner, mut outer) = (0.0f64, 0.0f64);
    for (x, v) in r.iter().zip(u) {
        if *x < half {
            inner = inner.max(v.abs());
        } else {
            outer = outer.max(v.abs());
        }
    }
    let bounded = inner > 0.0 && outer <= bound_factor * inner;
    if bounded && sign_changes(r, u, 0.75 * r_max) >= min_sign_changes {
        Classification::BoundedOscillatory
    } else {
        Classification::Undetermined
    }
}

/// Integrates the radial system from the regular data u(0) = u0, u″(0) = u2
/// (u′(0) = u‴(0) = 0) up to r_max or until |u| exceeds the overflow level.
pub fn radial_shoot(
    params: &ProblemParams,
    u0: f64,
    u2: f64,
    r_max: f64,
    opts: &ShootOptions,
) -> Result<RadialTrajectory> {
    check_options(opts, r_max)?;
    if !(u0.is_finite() && u2.is_finite()) {
        return Err(Error::Domain("initial data must be finite".into()));
    }
    let gamma = resolve_gamma(params, opts)?;
    let atol = opts.atol * u0.abs().max(u2.abs()).max(f64::MIN_POSITIVE);
    let run = integrate(params, &gamma, u0, u2, r_max, opts, opts.rtol, atol)?;
    let trivial = u0 == 0.0 && u2 == 0.0 && run.y.iter().all(|y| y[0] == 0.0);
    let r_end = *run.r.last().unwrap();
    let u: Vec<f64> = run.y.iter().map(|y| y[0]).collect();
    let (classification, blowup_radius) = match run.overflowed_at {
        Some(rb) if rb < r_max => (Classification::Blowup, Some(rb)),
        _ if trivial => (Classification::Undetermined, None),
        _ => (classify_bounded(&run.r, &u, r_max, opts.bound_factor, opts.min_sign_changes), None),
    };
    let error_estimate = if opts.estimate_error && blowup_radius.is_none() {
        let loose = integrate(params, &gamma, u0, u2, r_max, opts, 10.0 * opts.rtol, 10.0 * atol)?;
        let ul = loose.y.last().unwrap()[0];
        let rl = *loose.r.last().unwrap();
        ((rl - r_end).abs() <= 1e-9 * r_max).then(|| (ul - u.last().unwrap()).abs())
    } else {
        None
    };
    Ok(RadialTrajectory {
        dim: params.dim,
        u0,
        u2,
        r_max,
        du: run.y.iter().map(|y| y[1]).collect(),
        w: run.y.iter().map(|y| y[2]).collect(),
        dw: run.y.iter().map(|y| y[3]).collect(),
        u,
        r: run.r,
        classification,
        blowup_radius,
        trivial,
        error_estimate,
        accepted_steps: run.accepted,
        rejected_steps: run.rejected,
    })
}
