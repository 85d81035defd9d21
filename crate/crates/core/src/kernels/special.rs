//! Hankel functions of the first kind for integer and half-integer order,
//! the modified Bessel function K_ν for real argument, and the gamma values
//! needed by the radial kernels.
//!
//! Orders are passed doubled (`n2 = 2ν`) so that half-integer orders are exact.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this modulus integer orders use the ascending series; above it the
/// Hankel asymptotic expansion truncated at its smallest term.
pub const SERIES_SWITCH: f64 = 12.0;

/// Γ(n2/2) for a positive integer `n2`.
pub fn gamma_half(n2: u32) -> f64 {
    assert!(n2 > 0, "gamma_half needs a positive argument");
    let (mut g, mut x) = if n2.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = n2 as f64 / 2.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface measure of the unit sphere S^{N−1} in R^N.
pub fn sphere_area(dim: usize) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half(dim as u32)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// H^{(1)}_{n2/2}(z) for z in the closed upper half plane, z ≠ 0.
pub fn hankel1_c(n2: u32, z: C64) -> C64 {
    if n2 % 2 == 1 {
        hankel1_half(n2 / 2, z)
    } else if z.norm() <= SERIES_SWITCH {
        let n = n2 / 2;
        let (j, y) = bessel_jy_series(n, z);
        j + C64::i() * y
    } else {
        hankel_asymptotic(n2 as f64 / 2.0, z)
    }
}

/// H^{(1)}_{n+1/2}(z) = sqrt(2z/π) h_n(z) from the terminating spherical sum.
fn hankel1_half(n: u32, z: C64) -> C64 {
    let i = C64::i();
    let mut sum = C64::new(0.0, 0.0);
    let mut ik = C64::new(1.0, 0.0);
    let inv2z = 1.0 / (2.0 * z);
    let mut zk = C64::new(1.0, 0.0);
    for k in 0..=n {
        let c = factorial(n + k) / (factorial(k) * factorial(n - k));
        sum += ik * zk * c;
        ik *= i;
        zk *= inv2z;
    }
    let phase = (-i).powu(n + 1);
    let h = phase * (i * z).exp() / z * sum;
    (2.0 * z / PI).sqrt() * h
}

/// Ascending series for (J_n(z), Y_n(z)), integer n.
pub(crate) fn bessel_jy_series(n: u32, z: C64) -> (C64, C64) {
    let half = z * 0.5;
    let q = half * half;
    let mq = -q;
    // psi(k+1) via harmonic numbers
    let psi1 = |m: u32| -> f64 { -EULER_GAMMA + (1..=m).map(|j| 1.0 / j as f64).sum::<f64>() };

    let mut j_sum = C64::new(0.0, 0.0);
    let mut d_sum = C64::new(0.0, 0.0);
    let mut term = C64::new(1.0 / factorial(n), 0.0);
    let mut hk = psi1(0);
    let mut hnk = psi1(n);
    let mut k = 0u32;
    loop {
        j_sum += term;
        d_sum += term * (hk + hnk);
        k += 1;
        let next = term * mq / (k as f64 * (n + k) as f64);
        hk += 1.0 / k as f64;
        hnk += 1.0 / (n + k) as f64;
        term = next;
        if term.norm() < 1e-17 * j_sum.norm().max(1e-300) && k > 2 || k > 400 {
            break;
        }
    }
    let hn = half.powu(n);
    let jn = hn * j_sum;

    let mut fin = C64::new(0.0, 0.0);
    if n > 0 {
        let mut qk = C64::new(1.0, 0.0);
        for k in 0..n {
            fin += qk * (factorial(n - k - 1) / factorial(k));
            qk *= q;
        }
        fin /= hn;
    }
    let y = -fin / PI + (2.0 / PI) * half.ln() * jn - hn * d_sum / PI;
    (jn, y)
}

/// Hankel asymptotic expansion, summed until the smallest term.
fn hankel_asymptotic(nu: f64, z: C64) -> C64 {
    let i = C64::i();
    let mu = 4.0 * nu * nu;
    let mut sum = C64::new(1.0, 0.0);
    let mut a = 1.0;
    let mut ik = C64::new(1.0, 0.0);
    let mut zk = C64::new(1.0, 0.0);
    let inv = 1.0 / z;
    let mut last = f64::INFINITY;
    for k in 1..60u32 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (8.0 * k as f64);
        ik *= i;
        zk *= inv;
        let t = ik * zk * a;
        let tn = t.norm();
        if tn == 0.0 {
            break;
        }
        if tn > last {
            break;
        }
        sum += t;
        last = tn;
        if tn < 1e-17 * sum.norm() {
            break;
        }
    }
    let omega = z - nu * PI / 2.0 - PI / 4.0;
    (2.0 / (PI * z)).sqrt() * (i * omega).exp() * sum
}

/// J_{n2/2}(x) for real x > 0.
pub fn bessel_j_real(n2: u32, x: f64) -> f64 {
    if n2.is_multiple_of(2) && x <= SERIES_SWITCH {
        bessel_jy_series(n2 / 2, C64::new(x, 0.0)).0.re
    } else {
        hankel1_c(n2, C64::new(x, 0.0)).re
    }
}

/// K_ν(x) for real x > 0 by the trapezoid rule on
/// ∫_0^∞ exp(−x cosh t) cosh(νt) dt, which converges geometrically.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    scaled_bessel_k(nu, x) * (-x).exp()
}

/// e^x K_ν(x).
pub fn scaled_bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k needs x > 0");
    let h = 0.05;
    let mut sum = 0.5;
    let mut k = 1u32;
    loop {
        let t = k as f64 * h;
        let s = (0.5 * t).sinh();
        let term = (-2.0 * x * s * s).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum || k > 200_000 {
            break;
        }
        k += 1;
    }
    h * sum
}

/// Λ_N(t) = ∫_{S^{N−1}} e^{−itω·e} dσ(ω) / |S^{N−1}| = Γ(N/2)(2/t)^{ν} J_ν(t), ν = (N−2)/2.
pub fn sphere_average(dim: usize, t: f64) -> f64 {
    let t = t.abs();
    match dim {
        2 => {
            if t == 0.0 {
                1.0
            } else {
                bessel_j_real(0, t)
            }
        }
        3 => {
            if t < 1e-4 {
                1.0 - t * t / 6.0 + t.powi(4) / 120.0
            } else {
                t.sin() / t
            }
        }
        _ => {
            let n2 = dim as u32 - 2;
            if t < 1e-3 {
                // leading two terms of the even power series
                1.0 - t * t / (2.0 * dim as f64)
            } else {
                gamma_half(dim as u32) * (2.0 / t).powf(n2 as f64 / 2.0) * bessel_j_real(n2, t)
            }
        }
    }
}
