use serde_json::json;
use std::io::BufWriter;

use quartic_helmholtz::kernels::{GammaSpec, ProblemParams};
use quartic_helmholtz::radial::{dichotomy_sweep, radial_shoot, AmplitudeGrid, RadialGamma, ShootOptions};

use crate::args::{NonlinearArgs, RadialShootArgs, RadialSweepArgs, ShootArgs};
use crate::context::{nonlinear_params, parse_gamma, read_radial_table, Ctx, GammaSource};
use crate::error::{usage, CliError, CliResult};

/// Parameters plus shooting options; a tabulated Γ(r) is validated through
/// its smallest value.
fn setup(op: &NonlinearArgs, s: &ShootArgs) -> CliResult<(ProblemParams, ShootOptions)> {
    let mut opts =
        ShootOptions { rtol: s.rtol, overflow: s.overflow, bound_factor: s.bound_factor, ..Default::default() };
    let gamma = match parse_gamma(&op.gamma)? {
        GammaSource::Constant(c) => GammaSpec::Constant(c),
        GammaSource::File(p) => {
            let (r, values) = read_radial_table(&p)?;
            if r.is_empty() {
                return usage(format!("{} holds no r,value rows", p.display()));
            }
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            opts.gamma = Some(RadialGamma::Tabulated { r, values });
            GammaSpec::Constant(lo)
        }
    };
    Ok((nonlinear_params(op, gamma)?, opts))
}

fn record(ctx: &mut Ctx, p: &ProblemParams, o: &ShootOptions) {
    ctx.manifest.set_params(p);
    ctx.manifest.tolerance("rtol", o.rtol);
    ctx.manifest.tolerance("atol", o.atol);
    ctx.manifest.tolerance("overflow", o.overflow);
    ctx.manifest.tolerance("bound_factor", o.bound_factor);
}

pub fn shoot(a: &RadialShootArgs, ctx: &mut Ctx) -> CliResult<()> {
    let (params, opts) = setup(&a.op, &a.shoot)?;
    record(ctx, &params, &opts);
    let t = radial_shoot(&params, a.u0, a.u2, a.rmax, &opts)?;
    let path = ctx.artifact(&a.out)?;
    t.write_csv(BufWriter::new(std::fs::File::create(path)?))?;
    let max_u = t.u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let report = json!({
        "inputs": {
            "alpha": params.alpha, "beta": params.beta, "p": params.p, "N": params.dim,
            "gamma": a.op.gamma, "u0": a.u0, "u2": a.u2, "rmax": a.rmax,
            "rtol": opts.rtol, "r0": opts.r0,
        },
        "classification": format!("{:?}", t.classification),
        "trivial": t.trivial,
        "blowup_radius": t.blowup_radius,
        "r_end": t.r_end(),
        "u_end": json!({"value": t.u_end(), "error_estimate": t.error_estimate}),
        "max_abs_u": json!({"value": max_u, "error_estimate": t.error_estimate}),
        "samples": t.r.len(),
        "accepted_steps": t.accepted_steps,
        "rejected_steps": t.rejected_steps,
        "trajectory": a.out,
    });
    ctx.write_report(&a.summary, "qhelm.radial-shoot.v1", report)?;
    Ok(())
}

pub fn sweep(a: &RadialSweepArgs, ctx: &mut Ctx) -> CliResult<()> {
    let (params, opts) = setup(&a.op, &a.shoot)?;
    let grid = AmplitudeGrid::parse(&a.grid_spec).map_err(|e| CliError::Usage(e.to_string()))?;
    record(ctx, &params, &opts);
    ctx.manifest.seeds = vec![a.seed];
    let rep = dichotomy_sweep(&params, &grid, a.rmax, a.seed, &opts);
    let path = ctx.artifact(&a.out)?;
    rep.write_csv(BufWriter::new(std::fs::File::create(path)?))?;
    let n = rep.entries.len();
    // binomial standard error of a fraction over n independent samples
    let se = |f: f64| if n > 0 { (f * (1.0 - f) / n as f64).sqrt() } else { f64::NAN };
    let frac = |k: usize| if n > 0 { k as f64 / n as f64 } else { 0.0 };
    let report = json!({
        "inputs": {
            "alpha": params.alpha, "beta": params.beta, "p": params.p, "N": params.dim,
            "gamma": a.op.gamma, "grid_spec": a.grid_spec, "rmax": a.rmax, "seed": a.seed,
        },
        "count": n,
        "bounded": rep.bounded,
        "blowup": rep.blowup,
        "undetermined": rep.undetermined,
        "failed": rep.failed,
        "trivial": rep.entries.iter().filter(|e| e.trivial).count(),
        "bounded_fraction": json!({"value": rep.bounded_fraction(), "stderr": se(rep.bounded_fraction())}),
        "blowup_fraction": json!({"value": rep.blowup_fraction(), "stderr": se(rep.blowup_fraction())}),
        "undetermined_fraction": json!({"value": frac(rep.undetermined), "stderr": se(frac(rep.undetermined))}),
        "map": a.out,
    });
    ctx.write_report(&a.summary, "qhelm.radial-sweep.v1", report)?;
    Ok(())
}
