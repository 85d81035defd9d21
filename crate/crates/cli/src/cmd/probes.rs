use serde_json::json;

use quartic_helmholtz::analysis::probes::{
    dyadic_radii, stein_tomas_endpoint, stein_tomas_family, FamilySpec, NormProbeSpec, NORM_PROBE_STABILITY,
};
use quartic_helmholtz::analysis::region::reciprocal_of;
use quartic_helmholtz::analysis::{norm_probe, tail_integrability};
use quartic_helmholtz::spectral::SpectralGrid;

use crate::args::{NormProbeArgs, SteinTomasArgs, TailArgs};
use crate::context::{linear_params, measured, parse_grid, parse_list, Ctx};
use crate::error::{usage, CliResult};

pub fn norm(a: &NormProbeArgs, ctx: &mut Ctx) -> CliResult<()> {
    let params = linear_params(&a.op)?;
    let Some(inv_p) = reciprocal_of(&a.p_exp) else {
        return usage(format!("--p-exp '{}' is not a positive exponent", a.p_exp));
    };
    let Some(inv_q) = reciprocal_of(&a.q_exp) else {
        return usage(format!("--q-exp '{}' is not a positive exponent", a.q_exp));
    };
    let mut spec = NormProbeSpec::standard(params.dim, a.seed);
    spec.family.count = a.count;
    ctx.manifest.set_params(&params);
    ctx.manifest.seeds = vec![a.seed];
    ctx.manifest.tolerance("stability", NORM_PROBE_STABILITY);
    let rep = norm_probe(&params, inv_p, inv_q, &spec)?;
    let report = json!({
        "inputs": {
            "alpha": params.alpha, "beta": params.beta, "N": params.dim,
            "p": a.p_exp, "q": a.q_exp, "seed": a.seed, "count": a.count,
            "grid": {"M": spec.points_per_axis, "L": spec.half_width},
            "support_radius": spec.family.support_radius,
        },
        "in_region": rep.in_region,
        "windows": rep.windows,
        "ratios": rep.ratios,
        "stats": rep.stats,
        "relative_change": measured(rep.relative_change, "tolerance", NORM_PROBE_STABILITY),
        "verdict": {"stable": rep.stable, "stability_asserted": rep.stability_asserted},
        "note": rep.note,
    });
    ctx.write_report(&a.out, "qhelm.norm-probe.v1", report)?;
    Ok(())
}

pub fn tail(a: &TailArgs, ctx: &mut Ctx) -> CliResult<()> {
    let params = linear_params(&a.op)?;
    if a.levels < 4 {
        return usage("--levels must be at least 4");
    }
    ctx.manifest.set_params(&params);
    let rep = tail_integrability(&params, a.r, &dyadic_radii(a.levels))?;
    let report = json!({
        "inputs": {"alpha": params.alpha, "beta": params.beta, "N": params.dim, "r": a.r, "levels": a.levels},
        "radii": rep.radii,
        "integrals": rep.integrals,
        "growth_rate": measured(rep.growth_rate, "last_relative_increment", rep.last_relative_increment),
        "threshold": 2.0 * params.dim as f64 / (params.dim as f64 - 1.0),
        "verdict": {
            "numerical": format!("{:?}", rep.verdict),
            "logarithmic": rep.logarithmic,
            "analytic_convergent": rep.analytic_convergent,
            "agree": (rep.verdict == quartic_helmholtz::analysis::TailVerdict::Convergent) == rep.analytic_convergent,
        },
    });
    ctx.write_report(&a.out, "qhelm.tail-check.v1", report)?;
    Ok(())
}

pub fn stein_tomas(a: &SteinTomasArgs, ctx: &mut Ctx) -> CliResult<()> {
    let (m, l) = parse_grid(&a.grid)?;
    let grid = SpectralGrid::new(a.dim, m, l)?;
    let radii = parse_list(&a.radii, "radii")?;
    ctx.manifest.seeds = vec![a.seed];
    let spec = FamilySpec::new(a.count, a.seed, a.support);
    let rep = stein_tomas_family(&grid, &radii, a.p, &spec)?;
    // spread of the ratio across radii relative to its mean
    let spread = if rep.stats.mean > 0.0 { (rep.stats.max - rep.stats.min) / rep.stats.mean } else { f64::NAN };
    let report = json!({
        "inputs": {
            "N": a.dim, "p": a.p, "grid": {"M": m, "L": l}, "radii": radii,
            "seed": a.seed, "count": a.count, "support_radius": a.support,
        },
        "endpoint": stein_tomas_endpoint(a.dim),
        "nyquist": grid.nyquist(),
        "ratios": rep.ratios,
        "stats": rep.stats,
        "max_ratio": measured(rep.stats.max, "relative_spread", spread),
        "verdict": {"finite": rep.stats.max.is_finite()},
    });
    ctx.write_report(&a.out, "qhelm.stein-tomas.v1", report)?;
    Ok(())
}
