use serde_json::{json, Value};
use std::fmt::Write as _;

use quartic_helmholtz::analysis::decay::decay_fit;
use quartic_helmholtz::analysis::farfield::FarfieldErrorReport;
use quartic_helmholtz::analysis::radiation::RadiationReport;
use quartic_helmholtz::analysis::{farfield_error, radiation_residual, radiation_residual_pair};
use quartic_helmholtz::kernels::{quartic_green, Case, ProblemParams};
use quartic_helmholtz::resolvent::kernel_space::{helmholtz_extend, kernel_space_extend};
use quartic_helmholtz::resolvent::{
    mollified_delta, pde_residual, support_radius, EpsSchedule, Geometry, QuarticResolvent,
};
use quartic_helmholtz::spectral::io::{load_any, save_any};
use quartic_helmholtz::spectral::{Domain, Field, SpectralGrid};

use crate::args::{FarfieldArgs, KernelTableArgs, RadiationArgs, ResolventArgs};
use crate::context::{linear_params, loglog_slope, measured, parse_grid, parse_list, Ctx};
use crate::error::{usage, CliResult};
use crate::manifest::GridMeta;

fn load_source(path: &std::path::Path, params: &ProblemParams) -> CliResult<Field> {
    let f = load_any(path)?;
    f.expect(Domain::Physical)?;
    if f.grid.dim != params.dim {
        return usage(format!("{} holds an N = {} field, --N is {}", path.display(), f.grid.dim, params.dim));
    }
    Ok(f)
}

fn slope_json(x: &[f64], y: &[f64]) -> Value {
    match loglog_slope(x, y) {
        Some((b, se)) => measured(b, "stderr", se),
        None => json!(null),
    }
}

pub fn resolvent_apply(a: &ResolventArgs, ctx: &mut Ctx) -> CliResult<()> {
    let params = linear_params(&a.op)?;
    let f = match &a.input {
        Some(p) => {
            let f = load_source(p, &params)?;
            if let Some(g) = &a.grid {
                let (m, l) = parse_grid(g)?;
                if f.grid.m != m || f.grid.half_width != l {
                    return usage(format!(
                        "--grid {g} disagrees with the input grid {},{}",
                        f.grid.m, f.grid.half_width
                    ));
                }
            }
            f
        }
        None => {
            let (m, l) = parse_grid(a.grid.as_deref().unwrap_or("128,16"))?;
            mollified_delta(&SpectralGrid::new(params.dim, m, l)?, a.delta)
        }
    };
    let grid = f.grid;
    let s = a.source_radius.unwrap_or_else(|| support_radius(&grid, &f.values, 1e-12));
    let geometry = Geometry::cube(&grid, a.window_fraction, s)?;
    let sched = match a.eps0 {
        Some(e) => EpsSchedule::geometric(e, a.levels)?,
        None => {
            let c = grid.shell_clearance(&[params.a1, params.a2]);
            EpsSchedule::geometric(c / 4.0, a.levels)?
        }
    };
    ctx.manifest.set_params(&params);
    ctx.manifest.grid = Some(GridMeta::new(&grid, &params));
    ctx.manifest.eps_schedule = Some(sched.clone());
    let res = QuarticResolvent::new(&params, &grid, geometry, sched.clone())?;
    let out = res.apply(&f)?;
    let u = if a.real {
        if f.values.iter().any(|z| z.im != 0.0) {
            return usage("--real needs a real input field");
        }
        Field::from_real(grid, &out.field.real_part())?
    } else {
        out.field
    };
    let mask = geometry.window_mask(&grid);
    let residual = pde_residual(&u, &f, &params, Some(&mask))?;
    save_any(&u, &ctx.artifact(&a.out)?)?;
    let inside = mask.iter().filter(|&&b| b).count() as f64 / mask.len() as f64;
    let report = json!({
        "inputs": {
            "alpha": params.alpha, "beta": params.beta, "N": params.dim,
            "grid": {"M": grid.m, "L": grid.half_width},
            "input": a.input.as_ref().map(|p| p.display().to_string()),
            "delta": if a.input.is_none() { json!(a.delta) } else { json!(null) },
            "real": a.real,
        },
        "extrapolation_error": measured(out.extrapolation_error, "eps_min", *sched.eps_values.last().unwrap_or(&0.0)),
        "residual": measured(residual, "extrapolation_error", out.extrapolation_error),
        "window_fraction": a.window_fraction,
        "window_sample_fraction": inside,
        "geometry": geometry,
        "eps_schedule": sched,
        "grid": GridMeta::new(&grid, &params),
        "output": a.out,
    });
    ctx.write_report(&a.report, "qhelm.resolvent-apply.v1", report)?;
    Ok(())
}

fn default_radii(half_width: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| half_width * k as f64 / 8.0).collect()
}

fn farfield_json(rep: &FarfieldErrorReport) -> Value {
    let all_decreasing = rep.decreasing_tail(rep.errors.len());
    json!({
        "r_values": rep.r_values,
        "errors": rep.errors,
        "inner_cutoff": rep.inner_cutoff,
        "directions": rep.directions,
        "slope": slope_json(&rep.r_values, &rep.errors),
        "verdict": {"strictly_decreasing": all_decreasing, "decreasing_last_4": rep.decreasing_tail(4)},
    })
}

pub fn farfield(a: &FarfieldArgs, ctx: &mut Ctx) -> CliResult<()> {
    let params = linear_params(&a.op)?;
    let f = load_source(&a.f, &params)?;
    let u = match &a.u {
        Some(p) => load_any(p)?,
        None => kernel_space_extend(&params, &f, a.extend, true)?,
    };
    let radii = match &a.radii {
        Some(s) => parse_list(s, "radii")?,
        None => default_radii(u.grid.half_width, 8),
    };
    ctx.manifest.set_params(&params);
    ctx.manifest.grid = Some(GridMeta::new(&f.grid, &params));
    let rep = farfield_error(&u, &f, &params, &radii)?;
    let lo = 0.5 * f.grid.half_width;
    let decay = match decay_fit(&u, lo, u.grid.half_width) {
        Ok(fit) => json!({
            "range": [lo, u.grid.half_width],
            "slope": measured(fit.slope, "stderr", fit.stderr),
            "expected_slope": (1.0 - params.dim as f64) / 2.0,
        }),
        Err(e) => json!({"error": e.to_string()}),
    };
    let mut csv = String::from("r,error\n");
    for (r, e) in rep.r_values.iter().zip(&rep.errors) {
        let _ = writeln!(csv, "{r:.17e},{e:.17e}");
    }
    let csv_name = crate::manifest::sibling(&a.out, "csv");
    ctx.write_text(&csv_name, &csv)?;
    let report = json!({
        "inputs": {
            "alpha": params.alpha, "beta": params.beta, "N": params.dim,
            "f": a.f.display().to_string(),
            "u": a.u.as_ref().map(|p| p.display().to_string()),
            "extend": a.extend, "u_half_width": u.grid.half_width,
        },
        "case": format!("{:?}", params.case),
        "farfield_error": farfield_json(&rep),
        "decay": decay,
        "csv": csv_name,
    });
    ctx.write_report(&a.out, "qhelm.farfield.v1", report)?;
    Ok(())
}

fn radiation_json(out: &RadiationReport, inc: &RadiationReport) -> Value {
    let last = out.residuals.len().saturating_sub(1);
    let ratio = if out.residuals.is_empty() { f64::NAN } else { inc.residuals[last] / out.residuals[last] };
    json!({
        "wavenumber": out.wavenumber,
        "r_values": out.r_values,
        "outgoing": out.residuals,
        "incoming": inc.residuals,
        "taper_start": out.taper_start,
        "outgoing_slope": slope_json(&out.r_values, &out.residuals),
        "incoming_to_outgoing_at_max_r": ratio,
        "verdict": {"outgoing_decreasing": out.decreasing(), "incoming_larger": ratio > 1.0},
    })
}

pub fn radiation_check(a: &RadiationArgs, ctx: &mut Ctx) -> CliResult<()> {
    let params = linear_params(&a.op)?;
    let f = load_source(&a.f, &params)?;
    ctx.manifest.set_params(&params);
    ctx.manifest.grid = Some(GridMeta::new(&f.grid, &params));
    let lx = f.grid.half_width * a.extend as f64;
    let radii = match &a.radii {
        Some(s) => parse_list(s, "radii")?,
        None => default_radii(lx, 6),
    };
    let components: Vec<Value> = if params.case == Case::TwoHelmholtz {
        let u1 = helmholtz_extend(params.a1, &f, a.extend)?;
        let u2 = helmholtz_extend(params.a2, &f, a.extend)?;
        let (o1, o2) = radiation_residual_pair(&u1, &u2, &params, &radii)?;
        let (i1, i2) = radiation_residual_pair(&u1.conj(), &u2.conj(), &params, &radii)?;
        vec![radiation_json(&o1, &i1), radiation_json(&o2, &i2)]
    } else {
        let ut = kernel_space_extend(&params, &f, a.extend, false)?;
        let o = radiation_residual(&ut, &params, &radii)?;
        let i = radiation_residual(&ut.conj(), &params, &radii)?;
        vec![radiation_json(&o, &i)]
    };
    let pass = components.iter().all(|c| {
        c["verdict"]["outgoing_decreasing"].as_bool() == Some(true)
            && c["verdict"]["incoming_larger"].as_bool() == Some(true)
    });
    let report = json!({
        "inputs": {
            "alpha": params.alpha, "beta": params.beta, "N": params.dim,
            "f": a.f.display().to_string(), "extend": a.extend, "half_width": lx,
        },
        "case": format!("{:?}", params.case),
        "components": components,
        "verdict": {"outgoing_condition_holds": pass},
    });
    ctx.write_report(&a.out, "qhelm.radiation-check.v1", report)?;
    Ok(())
}

pub fn kernel_table(a: &KernelTableArgs, ctx: &mut Ctx) -> CliResult<()> {
    let params = linear_params(&a.op)?;
    if !(a.rmax > 0.0) || a.count < 2 {
        return usage("kernel-table needs --rmax > 0 and --count >= 2");
    }
    let rmin = a.rmin.unwrap_or(a.rmax / a.count as f64);
    if !(rmin > 0.0 && rmin < a.rmax) {
        return usage(format!("--rmin must lie in (0, {})", a.rmax));
    }
    ctx.manifest.set_params(&params);
    let mut csv = String::from("r,Re,Im\n");
    for i in 0..a.count {
        let r = rmin + (a.rmax - rmin) * i as f64 / (a.count - 1) as f64;
        let g = quartic_green(&params, r)?;
        let _ = writeln!(csv, "{r:.17e},{:.17e},{:.17e}", g.re, g.im);
    }
    ctx.write_text(&a.out, &csv)?;
    Ok(())
}
