//! Exact membership tests for the (1/p, 1/q) region of the resolvent estimates.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Whether (1/p, 1/q) satisfies
///   2/(N+1) ≤ 1/p − 1/q ≤ 1 (N ≤ 3), < 1 (N = 4), ≤ 4/N (N ≥ 5),
///   1/p > (N+1)/(2N),  1/q < (N−1)/(2N),
/// with p, q ∈ [1, ∞] (1/∞ = 0).
pub fn in_estimate_region(dim: u32, inv_p: Q, inv_q: Q) -> bool {
    let n = dim as i64;
    let zero = q(0, 1);
    let one = q(1, 1);
    if n < 2 || inv_p < zero || inv_p > one || inv_q < zero || inv_q > one {
        return false;
    }
    let d = inv_p - inv_q;
    let upper = match n {
        2 | 3 => d <= one,
        4 => d < one,
        _ => d <= q(4, n),
    };
    d >= q(2, n + 1) && upper && inv_p > q(n + 1, 2 * n) && inv_q < q(n - 1, 2 * n)
}

/// The diagonal q = p′ range as stated for each N, in terms of 1/q:
/// [lo, hi] with `lo_open` marking an excluded lower end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalRange {
    pub inv_q_lo: Q,
    pub lo_open: bool,
    pub inv_q_hi: Q,
}

/// 2(N+1)/(N−1) ≤ q ≤ ∞ (N ∈ {2,3}), 10/3 ≤ q < ∞ (N = 4),
/// 2(N+1)/(N−1) ≤ q ≤ 2N/(N−4) (N ≥ 5).
pub fn stated_diagonal_range(dim: u32) -> DiagonalRange {
    let n = dim as i64;
    let hi = q(n - 1, 2 * (n + 1));
    match n {
        2 | 3 => DiagonalRange { inv_q_lo: q(0, 1), lo_open: false, inv_q_hi: hi },
        4 => DiagonalRange { inv_q_lo: q(0, 1), lo_open: true, inv_q_hi: q(3, 10) },
        _ => DiagonalRange { inv_q_lo: q(n - 4, 2 * n), lo_open: false, inv_q_hi: hi },
    }
}

impl DiagonalRange {
    pub fn contains(&self, inv_q: Q) -> bool {
        let lo_ok = if self.lo_open { inv_q > self.inv_q_lo } else { inv_q >= self.inv_q_lo };
        lo_ok && inv_q <= self.inv_q_hi
    }
}

/// Parses "inf", an integer, a fraction "a/b" or a terminating decimal.
pub fn parse_exponent(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return None;
    }
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (i64, i64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return if b == 0 { None } else { Some(q(a, b)) };
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let den = 10i64.checked_pow(fp.len() as u32)?;
        let ip: i64 = if ip.is_empty() { 0 } else { ip.parse().ok()? };
        let fp: i64 = if fp.is_empty() { 0 } else { fp.parse().ok()? };
        let sign = if s.starts_with('-') { -1 } else { 1 };
        return Some(q(ip * den + sign * fp, den));
    }
    s.parse::<i64>().ok().map(|v| q(v, 1))
}

/// 1/x for an exponent given as text; "inf" maps to 0.
pub fn reciprocal_of(s: &str) -> Option<Q> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        return Some(q(0, 1));
    }
    let v = parse_exponent(t)?;
    if v <= q(0, 1) {
        None
    } else {
        Some(v.recip())
    }
}
