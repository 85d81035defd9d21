//! Farfield amplitudes, radiation and decay diagnostics, and empirical probes
//! of the restriction and resolvent estimates.

pub mod decay;
pub mod farfield;
pub mod probes;
pub mod radiation;
pub mod region;
pub mod restriction;

pub use decay::{decay_fit, DecayFit};
pub use farfield::{farfield_amplitude, farfield_error, farfield_error_with, synthesize_re_uf, FarfieldAmplitude};
pub use probes::{norm_probe, radial_restriction_probe, stein_tomas_probe, tail_integrability, TailVerdict};
pub use radiation::{radiation_residual, radiation_residual_k, radiation_residual_pair};
pub use region::{in_estimate_region, stated_diagonal_range};
pub use restriction::{sphere_restriction, Directions};
