//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `DOCUMENTED_FAILURES` are known not to hold at the
//! stated tolerances; they still run and print their measured values. Any
//! other FAIL, or an error in any criterion, makes the target fail.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

use quartic_helmholtz::analysis::decay::least_squares;
use quartic_helmholtz::analysis::farfield::{farfield_error_with, DEFAULT_INNER_CUTOFF};
use quartic_helmholtz::analysis::probes::dyadic_radii;
use quartic_helmholtz::analysis::region::Q;
use quartic_helmholtz::analysis::{
    decay_fit, farfield_amplitude, farfield_error, in_estimate_region, radiation_residual, stated_diagonal_range,
    synthesize_re_uf, tail_integrability, Directions, TailVerdict,
};
use quartic_helmholtz::dual_solver::{
    mountain_pass_solve, recover_primal_unchecked, DualProblem, Primal, SolverOptions,
};
use quartic_helmholtz::kernels::{
    hankel1, quartic_green, quartic_green_at_zero, symbol_partial_fractions, GammaSpec, ProblemParams,
};
use quartic_helmholtz::radial::{dichotomy_sweep, AmplitudeGrid, ShootOptions};
use quartic_helmholtz::resolvent::kernel_space::kernel_space_extend;
use quartic_helmholtz::resolvent::{
    apply_real_resolvent, check_scaling, mollified_delta, pde_residual, symmetry_defect, EpsSchedule, Geometry,
    QuarticResolvent,
};
use quartic_helmholtz::spectral::ops::integral_product;
use quartic_helmholtz::spectral::{Field, SpectralGrid};
use quartic_helmholtz::Result;

const DOCUMENTED_FAILURES: &[&str] = &["C3", "C6", "C11"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    least_squares(&lx, &ly).0
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// s² + βs + α by compensated Horner, accurate as if evaluated in twice the
/// working precision.
fn symbol_compensated(alpha: f64, beta: f64, s: f64) -> f64 {
    let two_sum = |a: f64, b: f64| {
        let x = a + b;
        let z = x - a;
        (x, (a - (x - z)) + (b - z))
    };
    let two_prod = |a: f64, b: f64| {
        let x = a * b;
        (x, a.mul_add(b, -x))
    };
    let (p1, e1) = two_prod(s, s);
    let (p2, e2) = two_prod(beta, s);
    let (h1, e3) = two_sum(p1, p2);
    let (h2, e4) = two_sum(h1, alpha);
    h2 + (e1 + e2 + e3 + e4)
}

fn random_params(rng: &mut ChaCha8Rng, k: usize) -> (f64, f64) {
    match k % 3 {
        0 => (-rng.random_range(0.1..5.0), rng.random_range(-4.0..4.0)),
        1 => {
            let alpha: f64 = rng.random_range(0.1..5.0);
            (alpha, -2.0 * alpha.sqrt() - rng.random_range(0.2..3.0))
        }
        _ => (0.0, -rng.random_range(0.2..5.0)),
    }
}

fn c1() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let (alpha, beta) = random_params(&mut rng, k);
        let dim = 3 + k % 2;
        let params = ProblemParams::linear(alpha, beta, dim)?;
        let reach = 3.0 * params.a1.max(1.0).sqrt();
        for _ in 0..10_000 {
            let s: f64 = (0..dim).map(|_| rng.random_range(-reach..reach)).map(|t: f64| t * t).sum();
            let direct = 1.0 / symbol_compensated(alpha, beta, s);
            let pf = symbol_partial_fractions(&params, s);
            worst = worst.max(((pf - direct) / direct).abs());
        }
    }
    Ok(outcome(worst <= 1e-12, format!("max relative defect {worst:.2e} over 1e5 points (tol 1e-12)")))
}

fn c2() -> Result<Outcome> {
    let params = ProblemParams::linear(-1.0, 0.0, 3)?;
    let mut worst = 0.0f64;
    for r in log_space(1e-3, 100.0, 2000) {
        // e^{ir} − e^{−r} without cancellation at small r
        let num = C64::new(-2.0 * (0.5 * r).sin().powi(2) - (-r).exp_m1(), r.sin());
        let exact = num / (8.0 * PI * r);
        let g = quartic_green(&params, r)?;
        worst = worst.max((g - exact).norm() / exact.norm());
    }
    let g0 = quartic_green_at_zero(&params)?;
    let lim = C64::new(1.0, 1.0) / (8.0 * PI);
    let d0 = (g0 - lim).norm() / lim.norm();
    Ok(outcome(
        worst <= 1e-10 && d0 <= 1e-8,
        format!("max relative defect on [1e-3, 100] {worst:.2e} (tol 1e-10); limit at 0 defect {d0:.2e} (tol 1e-8)"),
    ))
}

fn c3() -> Result<Outcome> {
    let radii = log_space(50.0, 5000.0, 25);
    let mut pass = true;
    let mut parts = Vec::new();
    for nu in [0.0, 0.5, 1.0, 1.5] {
        let mut rem = Vec::new();
        for &r in &radii {
            let h = hankel1(nu, r)?;
            let phase = C64::from_polar(1.0, -(r - (2.0 * nu + 1.0) * PI / 4.0));
            rem.push((h * (PI * r / 2.0).sqrt() * phase - 1.0).norm());
        }
        let max_rem = rem.iter().cloned().fold(0.0, f64::max);
        let s = if rem.iter().all(|&e| e > 0.0) { slope(&radii, &rem) } else { f64::NAN };
        let ok = (s + 1.0).abs() <= 0.1;
        pass &= ok;
        parts.push(format!("nu={nu}: slope {s:.3} (max remainder {max_rem:.1e})"));
    }
    let r: f64 = 1e-3;
    let laws: [(usize, f64, C64); 3] = [
        (2, 0.0, C64::new(0.0, 2.0 / PI) * (r / 2.0).ln()),
        (3, 0.5, C64::new(0.0, -(2.0 / (PI * r)).sqrt())),
        (4, 1.0, C64::new(0.0, -2.0 / (PI * r)) + C64::new(0.0, 2.0 / PI) * r * (r / 2.0).ln()),
    ];
    for (dim, nu, law) in laws {
        let h = hankel1(nu, r)?;
        let d = (h / law - 1.0).norm();
        pass &= d <= 0.01;
        parts.push(format!("N={dim} small-r {:.2}%", 100.0 * d));
    }
    Ok(outcome(pass, format!("{} (slope -1 +/- 0.1, small-r within 1%)", parts.join("; "))))
}

fn band_limited(grid: SpectralGrid, rng: &mut ChaCha8Rng) -> Field {
    let c = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let sigma: f64 = rng.random_range(0.5..0.7);
    let k = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
    let phase: f64 = rng.random_range(0.0..2.0 * PI);
    Field::from_fn(grid, |x| {
        let r2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
        C64::new((-r2 / (2.0 * sigma * sigma)).exp() * (k[0] * x[0] + k[1] * x[1] + phase).cos(), 0.0)
    })
}

fn c4() -> Result<Outcome> {
    let grid = SpectralGrid::new(2, 128, 12.0)?;
    let geo = Geometry::cube(&grid, 0.375, 6.0)?;
    let mask = geo.window_mask(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let neg = ProblemParams::linear(-1.0, 0.0, 2)?;
    let two = ProblemParams::linear(4.0, -5.0, 2)?;
    let res_neg = QuarticResolvent::with_default_schedule(&neg, &grid, geo)?;
    let res_two = QuarticResolvent::with_default_schedule(&two, &grid, geo)?;
    let mut inverse = 0.0f64;
    for j in 0..20 {
        let (p, res) = if j % 2 == 0 { (&neg, &res_neg) } else { (&two, &res_two) };
        let f = band_limited(grid, &mut rng);
        let u = res.apply(&f)?.field;
        inverse = inverse.max(pde_residual(&u, &f, p, Some(&mask))?);
    }
    let mut symmetry = 0.0f64;
    for j in 0..20 {
        let res = if j % 2 == 0 { &res_neg } else { &res_two };
        let f = band_limited(grid, &mut rng).real_part();
        let g = band_limited(grid, &mut rng).real_part();
        symmetry = symmetry.max(symmetry_defect(res, &f, &g));
    }
    let mut scaling = 0.0f64;
    for a in [0.5, 2.0, 3.0, 4.0, 9.0] {
        let f = band_limited(grid, &mut rng);
        scaling = scaling.max(check_scaling(a, &f, 0.01, &geo)?);
    }
    Ok(outcome(
        inverse <= 1e-10 && symmetry <= 1e-10 && scaling <= 1e-8,
        format!(
            "windowed residual {inverse:.2e} (tol 1e-10), symmetry {symmetry:.2e} (tol 1e-10), scaling {scaling:.2e} (tol 1e-8)"
        ),
    ))
}

fn c5() -> Result<Outcome> {
    let params = ProblemParams::linear(-1.0, 0.0, 3)?;
    let grid = SpectralGrid::new(3, 256, 24.0)?;
    let geo = Geometry::cube(&grid, 0.5, grid.h())?;
    let sched = EpsSchedule::for_grid(&grid, &params)?;
    let u = apply_real_resolvent(&params, &mollified_delta(&grid, 0.0), &sched, &geo)?;
    let mask = geo.window_mask(&grid);
    let g0 = quartic_green_at_zero(&params)?.re;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        let r = grid.radius(i);
        let g = if r == 0.0 { g0 } else { quartic_green(&params, r)?.re };
        num += (u.values[i].re - g).powi(2);
        den += g * g;
    }
    let e = (num / den).sqrt();
    Ok(outcome(e <= 1e-3, format!("windowed relative L2 error {e:.2e} (tol 1e-3)")))
}

struct Solve {
    params: ProblemParams,
    primal: Primal,
    seconds: f64,
}

fn c6(s: &Solve, state_line: &str) -> Result<Outcome> {
    let ue = kernel_space_extend(&s.params, &s.primal.f, 8, true)?;
    let fit = decay_fit(&ue, 8.0, 128.0)?;
    let want = (1.0 - s.params.dim as f64) / 2.0;
    let ok_decay = (fit.slope - want).abs() <= 0.15;
    let ok = state_line.starts_with("ok") && s.primal.consistency < 1e-4 && s.primal.pde_residual < 1e-4 && ok_decay;
    Ok(outcome(
        ok,
        format!(
            "{}; consistency {:.2e}, pde residual {:.2e} (tol 1e-4); decay slope {:.3} over [8,128] (want {want} +/- 0.15)",
            state_line.trim_start_matches("ok "),
            s.primal.consistency,
            s.primal.pde_residual,
            fit.slope
        ),
    ))
}

fn c7(s: &Solve) -> Result<Outcome> {
    let ue = kernel_space_extend(&s.params, &s.primal.f, 8, true)?;
    let radii: Vec<f64> = (1..=8).map(|k| 16.0 * k as f64).collect();
    let rep = farfield_error(&ue, &s.primal.f, &s.params, &radii)?;
    let n = rep.errors.len();
    let tail = &rep.errors[n - 3..];
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);

    let amp = farfield_amplitude(&s.primal.f, &s.params, &Directions::standard(s.params.dim)?)?;
    let synth = synthesize_re_uf(&amp, &ue.grid, DEFAULT_INNER_CUTOFF)?;
    let zero = farfield_error_with(&synth, &amp, &radii, DEFAULT_INNER_CUTOFF)?;
    let zmax = zero.errors.iter().cloned().fold(0.0, f64::max);
    Ok(outcome(
        decreasing && zmax == 0.0,
        format!(
            "errors at R = 96, 112, 128: {:.3e}, {:.3e}, {:.3e}; synthetic input error {zmax:.1e}",
            tail[0], tail[1], tail[2]
        ),
    ))
}

fn c8(s: &Solve) -> Result<Outcome> {
    let ut = kernel_space_extend(&s.params, &s.primal.f, 8, false)?;
    let radii: Vec<f64> = (1..=6).map(|k| 16.0 * k as f64).collect();
    let out = radiation_residual(&ut, &s.params, &radii)?;
    let inc = radiation_residual(&ut.conj(), &s.params, &radii)?;
    let last = radii.len() - 1;
    let ratio = inc.residuals[last] / out.residuals[last];
    Ok(outcome(
        out.decreasing() && ratio >= 10.0,
        format!(
            "outgoing {:.3e} -> {:.3e} decreasing: {}; incoming/outgoing at R = 96: {ratio:.1} (want >= 10)",
            out.residuals[0],
            out.residuals[last],
            out.decreasing()
        ),
    ))
}

fn c9() -> Result<Outcome> {
    let mut count = 0usize;
    let mut mismatches = 0usize;
    let dims = [2u32, 3, 4, 5, 6, 7, 8];
    let mut den = 1i64;
    while count < 10_000 {
        for num in 0..=den {
            for &dim in &dims {
                let inv_q = Q::new(num, den);
                let inv_p = Q::new(1, 1) - inv_q;
                if in_estimate_region(dim, inv_p, inv_q) != stated_diagonal_range(dim).contains(inv_q) {
                    mismatches += 1;
                }
                count += 1;
            }
        }
        den += 1;
    }
    Ok(outcome(mismatches == 0, format!("{mismatches} mismatches over {count} rational (p, p') pairs, N = 2..8")))
}

fn c10() -> Result<Outcome> {
    let radii = dyadic_radii(10);
    let mut wrong = Vec::new();
    let mut flagged = 0;
    let mut borderline = 0;
    let mut total = 0;
    for dim in 2..=5usize {
        let params = ProblemParams::linear(-1.0, 0.0, dim)?;
        let n = dim as f64;
        let border = 2.0 * n / (n - 1.0);
        for r in [1.5, 2.0, border, 3.0, 4.0, 6.0] {
            let rep = tail_integrability(&params, r, &radii)?;
            let analytic = r * (n - 1.0) / 2.0 > n;
            total += 1;
            let mut ok = (rep.verdict == TailVerdict::Convergent) == analytic;
            if (r - border).abs() < 1e-12 {
                ok &= rep.logarithmic;
                borderline += 1;
                flagged += usize::from(rep.logarithmic);
            }
            if !ok {
                wrong.push(format!("N={dim} r={r:.3} rate {:.3}", rep.growth_rate));
            }
        }
    }
    Ok(outcome(
        wrong.is_empty(),
        format!(
            "{} of {total} verdicts agree, {flagged} of {borderline} borderline cases logarithmic{}",
            total - wrong.len(),
            if wrong.is_empty() { String::new() } else { format!(" ({})", wrong.join(", ")) }
        ),
    ))
}

fn c11() -> Result<Outcome> {
    let opts = ShootOptions::default();
    let neg = ProblemParams::new(-1.0, 0.0, 5.0, 3, GammaSpec::Constant(1.0))?;
    let two = ProblemParams::new(4.0, -5.0, 5.0, 3, GammaSpec::Constant(1.0))?;
    let a = dichotomy_sweep(&neg, &AmplitudeGrid::parse("disk:0.1:200")?, 200.0, 1, &opts);
    let b = dichotomy_sweep(&two, &AmplitudeGrid::parse("square:1:200")?, 200.0, 1, &opts);
    let (fa, fb) = (a.bounded_fraction(), b.blowup_fraction());
    Ok(outcome(
        fa >= 0.9 && fb >= 0.7,
        format!(
            "NegAlpha disk 0.1 bounded {:.1}% (want >= 90%, blowup {:.1}%); TwoHelmholtz square 1 blowup {:.1}% (want >= 70%, bounded {:.1}%)",
            100.0 * fa,
            100.0 * a.blowup_fraction(),
            100.0 * fb,
            100.0 * b.bounded_fraction()
        ),
    ))
}

fn c12() -> Result<Outcome> {
    let params = ProblemParams::new(-1.0, 0.0, 7.0, 2, GammaSpec::Constant(1.0))?;
    let grid = SpectralGrid::new(2, 32, 8.0)?;
    let problem = DualProblem::standard(&params, &grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let steps = [1e-2, 1e-3, 1e-4];
    let mut slopes = Vec::new();
    for _ in 0..5 {
        // amplitudes away from 0, where |v|^{p′} is smooth, and small enough that
        // the h² term stays above the round-off of the quadratic part at h = 1e-4
        let v: Vec<f64> = (0..grid.len())
            .map(|_| {
                let m: f64 = rng.random_range(0.1..0.3);
                if rng.random_bool(0.5) {
                    m
                } else {
                    -m
                }
            })
            .collect();
        let w: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let exact = integral_product(&grid, &problem.j_gradient(&v), &w);
        let errs: Vec<f64> = steps
            .iter()
            .map(|&h| {
                let shift = |t: f64| v.iter().zip(&w).map(|(a, b)| a + t * b).collect::<Vec<f64>>();
                let fd = (problem.j_functional(&shift(h)) - problem.j_functional(&shift(-h))) / (2.0 * h);
                (fd - exact).abs()
            })
            .collect();
        slopes.push(slope(&steps, &errs));
    }
    let worst = slopes.iter().map(|s| (s - 2.0).abs()).fold(0.0, f64::max);
    let list: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
    Ok(outcome(worst <= 0.1, format!("slopes {} (want 2.0 +/- 0.1)", list.join(", "))))
}

fn solve() -> Result<(Solve, String)> {
    let t = Instant::now();
    let params = ProblemParams::new(-1.0, 0.0, 7.0, 2, GammaSpec::Constant(1.0))?;
    let grid = SpectralGrid::new(2, 128, 16.0)?;
    let problem = DualProblem::standard(&params, &grid)?;
    let state = mountain_pass_solve(&problem, &SolverOptions::default())?;
    let identity = state.identity_defect(&problem);
    let primal = recover_primal_unchecked(&problem, &state.v)?;
    let ok = state.grad_norm < 1e-6 && state.j_value > 0.0 && identity < 1e-6;
    let line = format!(
        "{}J = {:.6}, grad {:.2e}, identity {:.2e} after {} iterations",
        if ok { "ok " } else { "" },
        state.j_value,
        state.grad_norm,
        identity,
        state.iterations
    );
    Ok((Solve { params, primal, seconds: t.elapsed().as_secs_f64() }, line))
}

fn main() {
    let limits = [1.0, 1.0, 5.0, 30.0, 120.0, 600.0, 120.0, 120.0, 1.0, 60.0, 120.0, 60.0];
    let names = [
        "symbol identity",
        "kernel oracle",
        "Hankel asymptotics",
        "resolvent inverse and symmetry",
        "Green's function equivalence",
        "dual solve end to end",
        "farfield expansion",
        "radiation condition",
        "estimate-region arithmetic",
        "tail integrability",
        "radial dichotomy",
        "gradient check",
    ];
    let mut solved: Option<Result<(Solve, String)>> = None;
    let mut unexpected = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let id = format!("C{}", i + 1);
        let t = Instant::now();
        let mut extra = 0.0;
        let result = match i + 1 {
            1 => c1(),
            2 => c2(),
            3 => c3(),
            4 => c4(),
            5 => c5(),
            6..=8 => {
                let s = solved.get_or_insert_with(solve);
                match s {
                    Ok((s, line)) => {
                        if i + 1 == 6 {
                            extra = s.seconds;
                        }
                        match i + 1 {
                            6 => c6(s, line),
                            7 => c7(s),
                            _ => c8(s),
                        }
                    }
                    Err(e) => Err(e.clone()),
                }
            }
            9 => c9(),
            10 => c10(),
            11 => c11(),
            _ => c12(),
        };
        let secs = t.elapsed().as_secs_f64() + extra;
        let (pass, detail) = match result {
            Ok(o) => (o.pass && secs <= limits[i], o.detail),
            Err(e) => {
                unexpected.push(format!("{id} (error)"));
                (false, format!("error: {e}"))
            }
        };
        println!("{} {id} {name}: {detail}; {secs:.2} s (limit {} s)", if pass { "PASS" } else { "FAIL" }, limits[i]);
        if !pass && !DOCUMENTED_FAILURES.contains(&id.as_str()) && !unexpected.iter().any(|u| u.starts_with(&id)) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
