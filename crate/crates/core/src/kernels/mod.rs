//! Green kernels of the Helmholtz, Schrödinger and fourth-order operators.

pub mod green;
pub mod params;
pub mod special;
pub mod split;

pub use green::{
    helmholtz_green, helmholtz_green_dr, quartic_green, quartic_green_at_zero, quartic_green_dr, wavenumber,
};
pub use params::{p_range, split_roots, Case, GammaSpec, ProblemParams};
pub use split::{kernel_split, psi_hat, KernelSplit};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// H^{(1)}_ν(r) for ν with 2ν a nonnegative integer and r > 0.
pub fn hankel1(nu: f64, r: f64) -> Result<C64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("hankel1 needs r > 0, got {r}")));
    }
    let n2 = 2.0 * nu;
    if nu < 0.0 || (n2 - n2.round()).abs() > 1e-12 {
        return Err(Error::UnsupportedCase(format!("order {nu} is not a nonnegative half-integer")));
    }
    Ok(special::hankel1_c(n2.round() as u32, C64::new(r, 0.0)))
}

/// Partial-fraction form of the quartic symbol at |ξ|² = s.
pub fn symbol_partial_fractions(params: &ProblemParams, s: f64) -> f64 {
    (1.0 / (s - params.a1) - 1.0 / (s - params.a2)) / params.disc()
}
