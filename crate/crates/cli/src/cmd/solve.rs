use serde_json::json;
use std::fmt::Write as _;

use quartic_helmholtz::analysis::decay_fit;
use quartic_helmholtz::dual_solver::{mountain_pass_solve, recover_primal_unchecked, DualProblem, Init, SolverOptions};
use quartic_helmholtz::resolvent::kernel_space::kernel_space_extend;
use quartic_helmholtz::spectral::io::save_binary;
use quartic_helmholtz::spectral::ops::lp_norm_real;
use quartic_helmholtz::spectral::{Field, SpectralGrid};

use crate::args::SolveArgs;
use crate::context::{grid_gamma, measured, nonlinear_params, parse_grid, parse_list, Ctx};
use crate::error::{CliError, CliResult};
use crate::manifest::GridMeta;

pub fn run(a: &SolveArgs, ctx: &mut Ctx) -> CliResult<()> {
    let (m, l) = parse_grid(&a.grid)?;
    let grid = SpectralGrid::new(a.op.linear.dim, m, l)?;
    let params = nonlinear_params(&a.op, grid_gamma(&a.op.gamma, &grid)?)?;
    let s = a.source_radius.unwrap_or(0.46875 * l);
    let taper = a.taper.unwrap_or(0.125 * l);
    let problem = DualProblem::new(&params, &grid, s, taper, None)?;
    ctx.manifest.set_params(&params);
    ctx.manifest.grid = Some(GridMeta::new(&grid, &params));
    ctx.manifest.eps_schedule = Some(problem.resolvent.schedule.clone());
    ctx.manifest.seeds = a.seed.into_iter().collect();
    ctx.manifest.tolerance("tol", a.tol);
    ctx.manifest.tolerance("consistency_tol", a.consistency_tol);
    ctx.manifest.tolerance("pde_tol", a.pde_tol);

    let opts = SolverOptions {
        tol: a.tol,
        max_iter: a.max_iter,
        init: a.seed.map(Init::Random).unwrap_or(Init::AscentZ),
        symmetrize: !a.no_symmetrize,
        ..SolverOptions::default()
    };
    let state = mountain_pass_solve(&problem, &opts)?;
    let primal = recover_primal_unchecked(&problem, &state.v)?;
    let identity = state.identity_defect(&problem);

    // extrapolation error of u = 𝐑(Γ_env^{1/p} v)
    let wv: Vec<f64> = state.v.real_part().iter().zip(&problem.weight).map(|(x, w)| x * w).collect();
    let u_err = problem.resolvent.apply(&Field::from_real(grid, &wv)?)?.extrapolation_error;

    save_binary(&state.v, &ctx.artifact(&format!("{}.v.bin", a.out))?)?;
    save_binary(&primal.u, &ctx.artifact(&format!("{}.u.bin", a.out))?)?;
    save_binary(&primal.f, &ctx.artifact(&format!("{}.f.bin", a.out))?)?;
    let mut trace = String::from("iteration,j,grad_norm,step\n");
    for (i, t) in state.trace.iter().enumerate() {
        let _ = writeln!(trace, "{i},{:.17e},{:.17e},{:.17e}", t.j, t.grad_norm, t.step);
    }
    ctx.write_text(&format!("{}.trace.csv", a.out), &trace)?;

    let p = params.p;
    let pc = params.p_conj();
    let v = state.v.real_part();
    let u = primal.u.real_part();
    let u_max = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let extension = match a.extend {
        None => json!(null),
        Some(k) => {
            let ue = kernel_space_extend(&params, &primal.f, k, true)?;
            save_binary(&ue, &ctx.artifact(&format!("{}.u_ext.bin", a.out))?)?;
            let (lo, hi) = match &a.decay_range {
                Some(r) => {
                    let v = parse_list(r, "decay range")?;
                    if v.len() != 2 {
                        return Err(CliError::Usage(format!("decay range '{r}' must be lo,hi")));
                    }
                    (v[0], v[1])
                }
                None => (0.5 * l, ue.grid.half_width),
            };
            let decay = match decay_fit(&ue, lo, hi) {
                Ok(fit) => json!({
                    "range": [lo, hi],
                    "slope": measured(fit.slope, "stderr", fit.stderr),
                    "expected_slope": (1.0 - params.dim as f64) / 2.0,
                    "super_polynomial": fit.super_polynomial,
                    "shells": fit.shells,
                }),
                Err(e) => json!({"range": [lo, hi], "error": e.to_string()}),
            };
            json!({"factor": k, "half_width": ue.grid.half_width, "decay": decay})
        }
    };

    let ok_consistency = primal.consistency <= a.consistency_tol;
    let ok_pde = primal.pde_residual <= a.pde_tol;
    let report = json!({
        "inputs": {
            "alpha": params.alpha, "beta": params.beta, "p": p, "N": params.dim,
            "gamma": a.op.gamma, "grid": {"M": m, "L": l},
            "tol": a.tol, "max_iter": a.max_iter, "seed": a.seed,
            "symmetrize": opts.symmetrize,
            "source_radius": s, "taper": taper, "exact_radius": problem.exact_radius(),
        },
        "case": format!("{:?}", params.case),
        "roots": {"a1": params.a1, "a2": params.a2},
        "j": measured(state.j_value, "grad_norm", state.grad_norm),
        "grad_norm": measured(state.grad_norm, "tolerance", a.tol),
        "identity_defect": measured(identity, "tolerance", a.tol),
        "iterations": state.iterations,
        "converged": state.converged,
        "consistency": measured(primal.consistency, "tolerance", a.consistency_tol),
        "pde_residual": measured(primal.pde_residual, "tolerance", a.pde_tol),
        "norms": {
            "v_lp_conj": measured(lp_norm_real(&grid, &v, pc), "relative_defect", primal.consistency),
            "u_lp": measured(lp_norm_real(&grid, &u, p), "relative_error_estimate", u_err),
            "u_l2": measured(lp_norm_real(&grid, &u, 2.0), "relative_error_estimate", u_err),
            "u_max": measured(u_max, "relative_error_estimate", u_err),
        },
        "extension": extension,
        "grid": GridMeta::new(&grid, &params),
        "eps_schedule": problem.resolvent.schedule,
        "artifacts": {
            "v": format!("{}.v.bin", a.out), "u": format!("{}.u.bin", a.out),
            "f": format!("{}.f.bin", a.out), "trace": format!("{}.trace.csv", a.out),
        },
        "status": if ok_consistency && ok_pde { "ok" } else { "tolerance_violated" },
    });
    ctx.write_report(&format!("{}.report.json", a.out), "qhelm.solve.v1", report)?;
    if a.strict && !(ok_consistency && ok_pde) {
        return Err(CliError::Tolerance(format!(
            "consistency {:.3e} (tol {:.1e}), pde residual {:.3e} (tol {:.1e})",
            primal.consistency, a.consistency_tol, primal.pde_residual, a.pde_tol
        )));
    }
    Ok(())
}
