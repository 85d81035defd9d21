use num_complex::Complex64 as C64;
use serde_json::json;

use quartic_helmholtz::analysis::probes::{dyadic_radii, radial_restriction_probe};
use quartic_helmholtz::analysis::region::reciprocal_of;
use quartic_helmholtz::analysis::{
    in_estimate_region, sphere_restriction, tail_integrability, Directions, TailVerdict,
};
use quartic_helmholtz::dual_solver::{recover_primal_unchecked, DualProblem};
use quartic_helmholtz::kernels::{split_roots, symbol_partial_fractions, Case, GammaSpec, ProblemParams};
use quartic_helmholtz::radial::{dichotomy_sweep, radial_shoot, AmplitudeGrid, ShootOptions};
use quartic_helmholtz::resolvent::{pde_residual, EpsSchedule, Geometry, QuarticResolvent};
use quartic_helmholtz::spectral::ops::power_map;
use quartic_helmholtz::spectral::{forward_ft, inverse_ft, lp_norm, Domain, Field, SpectralGrid};
use quartic_helmholtz::{Error, Result};

use crate::args::SelfcheckArgs;
use crate::context::Ctx;
use crate::error::{CliError, CliResult};

struct Check {
    name: &'static str,
    defect: f64,
    tolerance: f64,
}

fn gaussian(grid: SpectralGrid) -> Field {
    Field::from_fn(grid, |x| C64::new((-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0))
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn rel_max(a: &[C64], b: &[C64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

fn checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut push = |name, defect, tolerance| out.push(Check { name, defect, tolerance });

    let roots = [
        ((-1.0, 0.0), (1.0, -1.0, Case::NegAlpha)),
        ((4.0, -5.0), (4.0, 1.0, Case::TwoHelmholtz)),
        ((0.0, -2.0), (2.0, 0.0, Case::ZeroAlpha)),
    ];
    let mut d = 0.0f64;
    for ((al, be), (a1, a2, c)) in roots {
        let (r1, r2, rc) = split_roots(al, be)?;
        d = d.max((r1 - a1).abs()).max((r2 - a2).abs()).max(flag(rc == c));
    }
    push("split_roots on the three reference pairs", d, 1e-14);

    let boundary = split_roots(4.0, -4.0);
    push("beta = -2 sqrt(alpha) is excluded", flag(matches!(boundary, Err(Error::ParamsOutsideA1(_)))), 0.0);

    let neg = ProblemParams::linear(-1.0, 0.0, 3)?;
    push("partial fractions at |xi|^2 = 2 give 1/3", (symbol_partial_fractions(&neg, 2.0) - 1.0 / 3.0).abs(), 1e-15);

    let g2 = SpectralGrid::new(2, 128, 12.0)?;
    let f = gaussian(g2);
    let fh = forward_ft(&f)?;
    let want: Vec<C64> = (0..g2.len())
        .map(|i| {
            let xi = g2.xi_vec(i);
            C64::new((-0.5 * (xi[0] * xi[0] + xi[1] * xi[1])).exp(), 0.0)
        })
        .collect();
    push("Gaussian is its own transform", rel_max(&fh.values, &want), 1e-8);

    let fg = Field::from_fn(g2, |x| {
        C64::new((-(x[0] - 0.4).powi(2) - 0.5 * x[1] * x[1]).exp() * (1.0 + x[0]), 0.3 * x[1] * (-x[1] * x[1]).exp())
    });
    let n_x = lp_norm(&fg, 2.0)?;
    let gh = forward_ft(&fg)?;
    let n_xi = (gh.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * g2.freq_cell_volume()).sqrt();
    push("Parseval", (n_x - n_xi).abs() / n_x, 1e-12);
    push("inverse after forward", rel_max(&inverse_ft(&gh)?.values, &fg.values), 1e-12);

    let mut scaled = fg.clone();
    scaled.scale(C64::new(-3.5, 0.0));
    push(
        "Lp norm is homogeneous",
        (lp_norm(&scaled, 3.0)? - 3.5 * lp_norm(&fg, 3.0)?).abs() / lp_norm(&scaled, 3.0)?,
        1e-13,
    );

    let pm = power_map(&[-2.0, 0.0], 3.0);
    let pz = power_map(&[0.0], 1.5);
    push("power map: (-2, s=3) -> -4 and 0 -> 0", (pm[0] + 4.0).abs() + pm[1].abs() + pz[0].abs(), 0.0);

    let gs = SpectralGrid::new(2, 32, 8.0)?;
    let np = ProblemParams::linear(-1.0, 0.0, 2)?;
    let geo = Geometry::cube(&gs, 0.25, 2.0)?;
    let res = QuarticResolvent::new(&np, &gs, geo, EpsSchedule::for_grid(&gs, &np)?)?;
    let zero = Field::zeros(gs, Domain::Physical);
    let rz = res.apply(&zero)?.field;
    push("resolvent of zero is zero", rz.values.iter().map(|z| z.norm()).fold(0.0, f64::max), 0.0);
    let fs = gaussian(gs);
    push("pde residual of u = 0 is 1", (pde_residual(&zero, &fs, &np, None)? - 1.0).abs(), 1e-15);

    let nl = ProblemParams::new(-1.0, 0.0, 7.0, 2, GammaSpec::Constant(1.0))?;
    let dp = DualProblem::standard(&nl, &gs)?;
    let z = vec![0.0; gs.len()];
    let grad0 = dp.j_gradient(&z).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    push("J(0) = 0 and its gradient vanishes", dp.j_functional(&z).abs() + grad0, 0.0);
    let pr = recover_primal_unchecked(&dp, &zero)?;
    let pmax = pr.u.values.iter().chain(&pr.f.values).map(|z| z.norm()).fold(0.0, f64::max);
    push("v = 0 recovers u = 0 and f = 0", pmax, 0.0);

    let gd = SpectralGrid::new(2, 64, 8.0)?;
    let a: f64 = 2.0;
    let vals = sphere_restriction(&gaussian(gd), a.sqrt(), &Directions::circle(64)?)?;
    let dev = vals.iter().map(|v| (v - (-a / 2.0).exp()).norm()).fold(0.0, f64::max);
    push("restriction of a Gaussian is exp(-a/2) on every direction", dev, 1e-12);

    let (ip, iq) = (reciprocal_of("3/2").unwrap(), reciprocal_of("3").unwrap());
    push("N = 3, q = p' = 3 lies outside the estimate region", flag(!in_estimate_region(3, ip, iq)), 0.0);

    let t = radial_restriction_probe(3, |s: f64| (-s * s).exp(), 4.0, 1.5, &[1.0]);
    push("radial restriction exponent 2N/(N+1) is rejected", flag(matches!(t, Err(Error::ExponentOutOfRange(_)))), 0.0);
    let tail = tail_integrability(&neg, 4.0, &dyadic_radii(10))?;
    push(
        "N = 3, |G|^4 is integrable at infinity",
        flag(tail.verdict == TailVerdict::Convergent && tail.analytic_convergent),
        0.0,
    );

    let rp = ProblemParams::new(-1.0, 0.0, 5.0, 3, GammaSpec::Constant(1.0))?;
    let tr = radial_shoot(&rp, 0.0, 0.0, 20.0, &ShootOptions::default())?;
    let umax = tr.u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    push("zero radial data stays zero and is flagged trivial", umax + flag(tr.trivial), 0.0);
    let sw = dichotomy_sweep(&rp, &AmplitudeGrid::Points(vec![]), 20.0, 1, &ShootOptions::default());
    push("empty amplitude grid gives an empty map", sw.entries.len() as f64, 0.0);

    Ok(out)
}

pub fn run(a: &SelfcheckArgs, ctx: &mut Ctx) -> CliResult<()> {
    let list = checks()?;
    let mut failed = 0;
    let rows: Vec<_> = list
        .iter()
        .map(|c| {
            let pass = c.defect <= c.tolerance;
            if !pass {
                failed += 1;
            }
            println!(
                "{} {}: defect {:.3e} (tol {:.1e})",
                if pass { "PASS" } else { "FAIL" },
                c.name,
                c.defect,
                c.tolerance
            );
            json!({"name": c.name, "defect": c.defect, "tolerance": c.tolerance, "pass": pass})
        })
        .collect();
    ctx.write_report(&a.out, "qhelm.selfcheck.v1", json!({"checks": rows, "failed": failed, "total": list.len()}))?;
    if failed > 0 {
        return Err(CliError::Tolerance(format!("{failed} of {} self checks failed", list.len())));
    }
    Ok(())
}
