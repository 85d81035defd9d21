//! Seeded sweeps of the shooting map over initial data (u0, u2).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

use super::shoot::{radial_shoot, Classification, ShootOptions};
use crate::error::{Error, Result};
use crate::kernels::ProblemParams;
use crate::par;

/// Sets of initial data (u0, u2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AmplitudeGrid {
    Points(Vec<(f64, f64)>),
    /// `count` points uniform in the disk |(u0, u2)| ≤ radius
    Disk {
        radius: f64,
        count: usize,
    },
    /// `count` points uniform in [−half_width, half_width]²
    Square {
        half_width: f64,
        count: usize,
    },
    /// n × n regular lattice on [−half_width, half_width]²
    Lattice {
        half_width: f64,
        n: usize,
    },
}

impl AmplitudeGrid {
    /// Parses `disk:R:COUNT`, `square:A:COUNT` or `lattice:A:N`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let bad = || Error::Format(format!("grid spec '{spec}' is not kind:size:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let size: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if !(size >= 0.0 && size.is_finite()) {
            return Err(bad());
        }
        match parts[0] {
            "disk" => Ok(Self::Disk { radius: size, count }),
            "square" => Ok(Self::Square { half_width: size, count }),
            "lattice" => Ok(Self::Lattice { half_width: size, n: count }),
            _ => Err(bad()),
        }
    }

    pub fn points(&self, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match *self {
            Self::Points(ref v) => v.clone(),
            Self::Disk { radius, count } => (0..count)
                .map(|_| {
                    let rho = radius * rng.random::<f64>().sqrt();
                    let t = 2.0 * PI * rng.random::<f64>();
                    (rho * t.cos(), rho * t.sin())
                })
                .collect(),
            Self::Square { half_width, count } => (0..count)
                .map(|_| (rng.random_range(-half_width..=half_width), rng.random_range(-half_width..=half_width)))
                .collect(),
            Self::Lattice { half_width, n } => {
                let at =
                    |i: usize| if n == 1 { 0.0 } else { -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64 };
                (0..n * n).map(|k| (at(k / n), at(k % n))).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub index: usize,
    pub u0: f64,
    pub u2: f64,
    pub classification: Option<Classification>,
    pub blowup_radius: Option<f64>,
    pub trivial: bool,
    /// integrator failure, reported apart from the classification
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seed: u64,
    pub r_max: f64,
    pub entries: Vec<SweepEntry>,
    pub bounded: usize,
    pub blowup: usize,
    pub undetermined: usize,
    pub failed: usize,
}

impl SweepReport {
    fn fraction(&self, n: usize) -> f64 {
        if self.entries.is_empty() {
            0.0
        } else {
            n as f64 / self.entries.len() as f64
        }
    }

    pub fn bounded_fraction(&self) -> f64 {
        self.fraction(self.bounded)
    }

    pub fn blowup_fraction(&self) -> f64 {
        self.fraction(self.blowup)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,u0,u2,classification,blowup_radius,trivial,failure")?;
        for e in &self.entries {
            let class = e.classification.map(|c| format!("{c:?}")).unwrap_or_default();
            let rb = e.blowup_radius.map(|r| format!("{r:.17e}")).unwrap_or_default();
            let fail = e.failure.clone().unwrap_or_default().replace(',', ";");
            writeln!(out, "{},{:.17e},{:.17e},{class},{rb},{},{fail}", e.index, e.u0, e.u2, e.trivial)?;
        }
        Ok(())
    }
}

/// Shoots from every point of the grid; entries keep the grid order.
pub fn dichotomy_sweep(
    params: &ProblemParams,
    grid: &AmplitudeGrid,
    r_max: f64,
    seed: u64,
    opts: &ShootOptions,
) -> SweepReport {
    let pts = grid.points(seed);
    let opts = ShootOptions { estimate_error: false, ..opts.clone() };
    let entries = par::map_range(pts.len(), |i| {
        let (u0, u2) = pts[i];
        match radial_shoot(params, u0, u2, r_max, &opts) {
            Ok(t) => SweepEntry {
                index: i,
                u0,
                u2,
                classification: Some(t.classification),
                blowup_radius: t.blowup_radius,
                trivial: t.trivial,
                failure: None,
            },
            Err(e) => SweepEntry {
                index: i,
                u0,
                u2,
                classification: None,
                blowup_radius: None,
                trivial: false,
                failure: Some(e.to_string()),
            },
        }
    });
    let count = |c: Classification| entries.iter().filter(|e| e.classification == Some(c)).count();
    SweepReport {
        seed,
        r_max,
        bounded: count(Classification::BoundedOscillatory),
        blowup: count(Classification::Blowup),
        undetermined: count(Classification::Undetermined),
        failed: entries.iter().filter(|e| e.failure.is_some()).count(),
        entries,
    }
}
