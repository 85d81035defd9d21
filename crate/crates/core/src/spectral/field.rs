use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::grid::SpectralGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Physical,
    Frequency,
}

impl Domain {
    pub fn name(&self) -> &'static str {
        match self {
            Domain::Physical => "physical",
            Domain::Frequency => "frequency",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: SpectralGrid,
    pub values: Vec<C64>,
    pub domain: Domain,
}

impl Field {
    pub fn new(grid: SpectralGrid, values: Vec<C64>, domain: Domain) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for a grid of {} points", values.len(), grid.len())));
        }
        Ok(Self { grid, values, domain })
    }

    pub fn zeros(grid: SpectralGrid, domain: Domain) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()], domain }
    }

    pub fn from_real(grid: SpectralGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect(), Domain::Physical)
    }

    /// Physical field sampled from a function of position.
    pub fn from_fn<F>(grid: SpectralGrid, f: F) -> Self
    where
        F: Fn(&[f64]) -> C64 + Sync + Send,
    {
        let values = crate::par::map_range(grid.len(), |i| {
            let x = grid.position(i);
            f(&x[..grid.dim])
        });
        Self { grid, values, domain: Domain::Physical }
    }

    pub fn expect(&self, domain: Domain) -> Result<()> {
        if self.domain == domain {
            Ok(())
        } else {
            Err(Error::TagMismatch { expected: domain.name(), found: self.domain.name() })
        }
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&mut self, s: C64) {
        self.values.iter_mut().for_each(|z| *z *= s);
    }

    /// Complex conjugate (physical domain).
    pub fn conj(&self) -> Self {
        Self { values: self.values.iter().map(|z| z.conj()).collect(), ..self.clone() }
    }
}
