//! Truncated-box discretization: grids, fields, transforms, norms.

pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod ops;

pub use fft::FftPlan;
pub use field::{Domain, Field};
pub use grid::{KeyTable, SpectralGrid};
pub use ops::{lp_norm, power_map, power_map_field};

use crate::error::Result;

pub fn forward_ft(f: &Field) -> Result<Field> {
    FftPlan::new(f.grid).forward(f)
}

pub fn inverse_ft(f: &Field) -> Result<Field> {
    FftPlan::new(f.grid).inverse(f)
}
