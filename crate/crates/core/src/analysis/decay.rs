//! Power-law decay fits over dyadic shells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{Domain, Field};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSample {
    pub r_inner: f64,
    pub r_outer: f64,
    /// radius at which the shell maximum is attained
    pub r_peak: f64,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub stderr: f64,
    pub shells: Vec<ShellSample>,
    /// slopes between consecutive shells
    pub local_slopes: Vec<f64>,
    /// local slopes steepen by more than one unit across the range
    pub super_polynomial: bool,
}

/// Least-squares slope of log max_{shell}|u| against log r over the dyadic
/// shells [r_lo 2^j, r_lo 2^{j+1}] contained in [r_lo, r_hi].
pub fn decay_fit(u: &Field, r_lo: f64, r_hi: f64) -> Result<DecayFit> {
    u.expect(Domain::Physical)?;
    let grid = u.grid;
    if !(r_lo > 0.0) || r_hi > grid.half_width * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "range [{r_lo}, {r_hi}] must be positive and inside the ball of radius {}",
            grid.half_width
        )));
    }
    let mut edges = vec![r_lo];
    while edges.last().unwrap() * 2.0 <= r_hi * (1.0 + 1e-12) {
        let e = edges.last().unwrap() * 2.0;
        edges.push(e);
    }
    let count = edges.len() - 1;
    if count < 4 {
        return Err(Error::InsufficientShells(count));
    }
    let rad: Vec<f64> = par::map_range(grid.len(), |i| grid.radius(i));
    let shells: Vec<ShellSample> = edges
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let mut best = (0.0f64, a);
            for (i, z) in u.values.iter().enumerate() {
                let r = rad[i];
                if r >= a && r < b && z.norm() > best.0 {
                    best = (z.norm(), r);
                }
            }
            ShellSample { r_inner: a, r_outer: b, r_peak: best.1, max_abs: best.0 }
        })
        .collect();
    if shells.iter().any(|s| !(s.max_abs > 0.0)) {
        return Err(Error::Domain("a shell holds no nonzero samples".into()));
    }
    let xs: Vec<f64> = shells.iter().map(|s| s.r_peak.ln()).collect();
    let ys: Vec<f64> = shells.iter().map(|s| s.max_abs.ln()).collect();
    let (slope, stderr) = least_squares(&xs, &ys);
    let local_slopes: Vec<f64> = (1..xs.len()).map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])).collect();
    let steepening = local_slopes.windows(2).all(|w| w[1] < w[0]);
    let span = local_slopes[0] - local_slopes[local_slopes.len() - 1];
    Ok(DecayFit { slope, stderr, shells, local_slopes, super_polynomial: steepening && span > 1.0 })
}

/// Slope and its standard error for y ≈ a + b x.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let se = if xs.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (b, se)
}
