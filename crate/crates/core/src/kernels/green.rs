//! Fundamental solutions of −Δ − a and of the factored fourth-order operator.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use super::params::ProblemParams;
use super::special::{bessel_k, hankel1_c, sphere_area};
use crate::error::{Error, Result};

/// Wavenumber √a on the branch with Im ≥ 0 (outgoing / decaying).
pub fn wavenumber(a: C64) -> C64 {
    let k = a.sqrt();
    if k.im < 0.0 || (k.im == 0.0 && k.re < 0.0) {
        -k
    } else {
        k
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive, got {r}")))
    }
}

/// g_a(|x|) for real a; a > 0 outgoing Helmholtz, a = 0 Newtonian (N ≥ 3),
/// a < 0 the decaying Schrödinger kernel.
pub fn helmholtz_green(a: f64, r: f64, dim: usize) -> Result<C64> {
    check_r(r)?;
    if a == 0.0 {
        if dim < 3 {
            return Err(Error::UnsupportedCase("a = 0 needs N >= 3".into()));
        }
        return Ok(C64::new(r.powi(2 - dim as i32) / ((dim as f64 - 2.0) * sphere_area(dim)), 0.0));
    }
    if a < 0.0 && dim.is_multiple_of(2) {
        let m = (-a).sqrt();
        let nu = (dim as f64 - 2.0) / 2.0;
        let v = (2.0 * PI).powf(-(dim as f64) / 2.0) * (m / r).powf(nu) * bessel_k(nu, m * r);
        return Ok(C64::new(v, 0.0));
    }
    Ok(green_c(C64::new(a, 0.0), r, dim))
}

/// d/dr g_a(r) for real a.
pub fn helmholtz_green_dr(a: f64, r: f64, dim: usize) -> Result<C64> {
    check_r(r)?;
    if a == 0.0 {
        if dim < 3 {
            return Err(Error::UnsupportedCase("a = 0 needs N >= 3".into()));
        }
        return Ok(C64::new(-r.powi(1 - dim as i32) / sphere_area(dim), 0.0));
    }
    if a < 0.0 && dim.is_multiple_of(2) {
        let m = (-a).sqrt();
        let nu = (dim as f64 - 2.0) / 2.0;
        let v = -(2.0 * PI).powf(-(dim as f64) / 2.0) * m * (m / r).powf(nu) * bessel_k(nu + 1.0, m * r);
        return Ok(C64::new(v, 0.0));
    }
    Ok(green_dr_c(C64::new(a, 0.0), r, dim))
}

/// g_a for complex a with √a in the upper half plane, a ≠ 0.
///
/// Even dimensions use the integer-order Hankel routines, which are accurate
/// as long as |Im √a|·r stays moderate; callers with strongly decaying kernels
/// should use [`helmholtz_green`].
pub fn green_c(a: C64, r: f64, dim: usize) -> C64 {
    let k = wavenumber(a);
    if dim == 3 {
        return (C64::i() * k * r).exp() / (4.0 * PI * r);
    }
    let n2 = dim as u32 - 2;
    let nu = n2 as f64 / 2.0;
    let pref = (k / (2.0 * PI * r)).powf(nu);
    C64::i() / 4.0 * pref * hankel1_c(n2, k * r)
}

/// d/dr g_a for complex a: −(i/4) k (k/(2πr))^ν H_{ν+1}(kr).
pub fn green_dr_c(a: C64, r: f64, dim: usize) -> C64 {
    let k = wavenumber(a);
    if dim == 3 {
        let e = (C64::i() * k * r).exp();
        return e * (C64::i() * k * r - 1.0) / (4.0 * PI * r * r);
    }
    let n2 = dim as u32 - 2;
    let nu = n2 as f64 / 2.0;
    let pref = (k / (2.0 * PI * r)).powf(nu);
    -C64::i() / 4.0 * k * pref * hankel1_c(n2 + 2, k * r)
}

fn exp_m1(w: C64) -> C64 {
    if w.norm() < 1e-2 {
        let mut term = w;
        let mut sum = w;
        for k in 2..12 {
            term = term * w / k as f64;
            sum += term;
        }
        sum
    } else {
        w.exp() - 1.0
    }
}

/// G = (g_{a1} − g_{a2})/√(β² − 4α).
pub fn quartic_green(params: &ProblemParams, r: f64) -> Result<C64> {
    check_r(r)?;
    let d = params.disc();
    let dim = params.dim;
    let k1 = wavenumber(C64::new(params.a1, 0.0));
    let k2 = wavenumber(C64::new(params.a2, 0.0));
    if dim == 3 {
        let i = C64::i();
        let w = i * (k1 - k2) * r;
        // the factored form avoids cancellation near 0 but over/underflows far out
        let num = if w.norm() < 1.0 { (i * k2 * r).exp() * exp_m1(w) } else { (i * k1 * r).exp() - (i * k2 * r).exp() };
        return Ok(num / (4.0 * PI * r * d));
    }
    let kmax = k1.norm().max(k2.norm());
    if dim >= 4 && r * kmax < 0.1 {
        return Ok(small_r_series(params, r));
    }
    let g1 = helmholtz_green(params.a1, r, dim)?;
    let g2 = helmholtz_green(params.a2, r, dim)?;
    Ok((g1 - g2) / d)
}

/// d/dr G.
pub fn quartic_green_dr(params: &ProblemParams, r: f64) -> Result<C64> {
    let g1 = helmholtz_green_dr(params.a1, r, params.dim)?;
    let g2 = helmholtz_green_dr(params.a2, r, params.dim)?;
    Ok((g1 - g2) / params.disc())
}

/// G(0) where it is finite (N = 2, 3).
pub fn quartic_green_at_zero(params: &ProblemParams) -> Result<C64> {
    let k1 = wavenumber(C64::new(params.a1, 0.0));
    let k2 = wavenumber(C64::new(params.a2, 0.0));
    let d = params.disc();
    match params.dim {
        2 => Ok(-(k1.ln() - k2.ln()) / (2.0 * PI * d)),
        3 => Ok(C64::i() * (k1 - k2) / (4.0 * PI * d)),
        n => Err(Error::UnsupportedCase(format!("G is unbounded at 0 for N = {n}"))),
    }
}

/// (x1^q − x2^q)/(x1 − x2) without cancellation.
fn divided_power(x1: C64, x2: C64, q: u32) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..q {
        s += x1.powu(i) * x2.powu(q - 1 - i);
    }
    s
}

fn fact(n: u32) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// Small-r expansion of G for N ≥ 4 with the a-independent singular terms
/// removed exactly: every power of a enters through a divided difference.
fn small_r_series(params: &ProblemParams, r: f64) -> C64 {
    let dim = params.dim;
    let d = params.disc();
    let a1 = C64::new(params.a1, 0.0);
    let a2 = C64::new(params.a2, 0.0);
    let k1 = wavenumber(a1);
    let k2 = wavenumber(a2);
    let i = C64::i();
    // DD[a^q] with D = a1 − a2
    let dda = |q: u32| -> C64 {
        if q == 0 {
            C64::new(0.0, 0.0)
        } else {
            divided_power(a1, a2, q)
        }
    };
    if dim.is_multiple_of(2) {
        let n = (dim as u32 - 2) / 2;
        let h = r / 2.0;
        let psi = |m: u32| -> f64 { -0.577_215_664_901_532_9 + (1..=m).map(|j| 1.0 / j as f64).sum::<f64>() };
        let mut jsum = C64::new(0.0, 0.0); // DD[k^n J_n(kr)]
        let mut ysum = C64::new(0.0, 0.0); // DD[k^n Y_n(kr)]
        for j in 0..n {
            ysum += -(fact(n - j - 1) / fact(j)) * dda(j) * h.powi(2 * j as i32 - n as i32) / PI;
        }
        for m in 0..30u32 {
            let c = (-1f64).powi(m as i32) * h.powi((2 * m + n) as i32) / (fact(m) * fact(m + n));
            let q = m + n;
            jsum += c * dda(q);
            // ln k terms: DD[a^q ln k]
            let alog = |a: C64, k: C64| if a.norm() == 0.0 { C64::new(0.0, 0.0) } else { a.powu(q) * k.ln() };
            let dlog = (alog(a1, k1) - alog(a2, k2)) / d;
            ysum += (2.0 / PI) * (h.ln() * c * dda(q) + c * dlog);
            ysum += -(psi(m) + psi(m + n)) * c * dda(q) / PI;
        }
        i / 4.0 * (2.0 * PI * r).powi(-(n as i32)) * (jsum + i * ysum)
    } else {
        // N = 2n + 3, ν = n + 1/2
        let n = (dim as u32 - 3) / 2;
        let nu = n as f64 + 0.5;
        let mut total = C64::new(0.0, 0.0);
        // r-power e from −1−n upward; k-power q = n + 1 + e
        for qk in 0..(n + 30) {
            let e = qk as i32 - n as i32 - 1;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..=n {
                let l = e + 1 + j as i32;
                if l < 0 {
                    continue;
                }
                let cj = fact(n + j) / (fact(j) * fact(n - j));
                s += cj * (i / 2.0).powu(j) * i.powu(l as u32) / fact(l as u32);
            }
            let dk = if qk % 2 == 0 { dda(qk / 2) } else { (k1.powu(qk) - k2.powu(qk)) / d };
            total += s * dk * r.powi(e);
        }
        i / 4.0 * (2.0 * PI * r).powf(-nu) * (2.0 * r / PI).sqrt() * (-i).powu(n + 1) * total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::params::GammaSpec;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn three_dimensional_kernel_is_finite_far_out() {
        let p = ProblemParams::linear(-1.0, 0.0, 3).unwrap();
        for r in [1e3, 5e3, 1e5] {
            let g = quartic_green(&p, r).unwrap();
            let want = C64::from_polar(1.0, r) / (8.0 * PI * r);
            assert!((g - want).norm() < 1e-12 * want.norm());
        }
    }

    #[test]
    fn examples_three_d() {
        let g = helmholtz_green(1.0, 1.0, 3).unwrap();
        assert!(rel(g, C64::new(1f64.cos(), 1f64.sin()) / (4.0 * PI)) < 1e-14);
        let g0 = helmholtz_green(0.0, 2.0, 3).unwrap();
        assert!((g0.re - 1.0 / (8.0 * PI)).abs() < 1e-16);
        let gs = helmholtz_green(-1.0, 1.5, 3).unwrap();
        assert!(rel(gs, C64::new((-1.5f64).exp() / (4.0 * PI * 1.5), 0.0)) < 1e-14);
    }

    #[test]
    fn schrodinger_branch_agrees_with_k_route() {
        // even N: K route; compare with the Hankel route at moderate argument
        let a = -0.7;
        for &r in &[0.3, 2.0, 6.0] {
            let viak = helmholtz_green(a, r, 2).unwrap();
            let viah = green_c(C64::new(a, 0.0), r, 2);
            assert!(rel(viak, viah) < 1e-10, "r={r}");
        }
    }

    #[test]
    fn scaling_identity() {
        for dim in [2usize, 3, 4, 5] {
            for &a in &[0.3, 2.5] {
                for &r in &[0.4, 3.0, 17.0] {
                    let lhs = helmholtz_green(a, r, dim).unwrap();
                    let rhs = helmholtz_green(1.0, a.sqrt() * r, dim).unwrap() * a.powf((dim as f64 - 2.0) / 2.0);
                    assert!(rel(lhs, rhs) < 1e-10, "dim={dim} a={a} r={r}");
                }
            }
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for dim in [2usize, 3, 4] {
            for &a in &[1.3, -0.8] {
                let r = 2.2;
                let h = 1e-5;
                let fd =
                    (helmholtz_green(a, r + h, dim).unwrap() - helmholtz_green(a, r - h, dim).unwrap()) / (2.0 * h);
                let an = helmholtz_green_dr(a, r, dim).unwrap();
                assert!(rel(an, fd) < 1e-8, "dim={dim} a={a}");
            }
        }
    }

    #[test]
    fn quartic_three_d_oracle_and_limit() {
        let p = ProblemParams::linear(-1.0, 0.0, 3).unwrap();
        for &r in &[1e-3f64, 0.1, 1.0, 10.0, 100.0] {
            let exact = (C64::new(r.cos(), r.sin()) - (-r).exp()) / (8.0 * PI * r);
            assert!(rel(quartic_green(&p, r).unwrap(), exact) < 1e-10);
        }
        let g0 = quartic_green_at_zero(&p).unwrap();
        assert!(rel(g0, C64::new(1.0, 1.0) / (8.0 * PI)) < 1e-14);
    }

    #[test]
    fn small_r_series_overlaps_direct() {
        for (alpha, beta) in [(-1.0, 0.0), (4.0, -5.0), (0.0, -2.0)] {
            for dim in [4usize, 5, 6] {
                let p = ProblemParams::new(
                    alpha,
                    beta,
                    crate::kernels::params::p_range(dim).0 + 0.1,
                    dim,
                    GammaSpec::Constant(1.0),
                )
                .unwrap();
                let kmax = p.a1.abs().max(p.a2.abs()).sqrt();
                let r = 0.099 / kmax;
                let s = small_r_series(&p, r);
                let g1 = helmholtz_green(p.a1, r, dim).unwrap();
                let g2 = helmholtz_green(p.a2, r, dim).unwrap();
                let direct = (g1 - g2) / p.disc();
                assert!(rel(s, direct) < 1e-8, "alpha={alpha} dim={dim}: {s} vs {direct}");
            }
        }
    }

    #[test]
    fn two_d_limit_at_origin() {
        let p = ProblemParams::linear(-1.0, 0.0, 2).unwrap();
        let g0 = quartic_green_at_zero(&p).unwrap();
        let near = quartic_green(&p, 1e-7).unwrap();
        assert!((g0 - near).norm() < 1e-6);
    }
}
