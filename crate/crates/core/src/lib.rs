//! Fourth-order nonlinear Helmholtz equations Δ²u − βΔu + αu = Γ|u|^{p−2}u:
//! Green kernels, limiting-absorption resolvents on a truncated box, a dual
//! variational solver, farfield/radiation analysis and radial shooting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dual_solver;
pub mod error;
pub mod kernels;
pub mod par;
pub mod radial;
pub mod resolvent;
pub mod spectral;

pub use error::{Error, Result};
