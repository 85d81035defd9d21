//! Radial reduction: shooting from the origin, sweeps over initial data and
//! the radial form of Re G ∗ f.

pub mod quad;
pub mod resolvent;
pub mod shoot;
pub mod sweep;

pub use resolvent::{
    radial_operator_fd, radial_resolvent, radial_resolvent_profile, spherical_mean_re_g, RadialProfile,
    RadialQuadrature,
};
pub use shoot::{
    classify_bounded, radial_shoot, sign_changes, taylor_start, Classification, RadialGamma, RadialTrajectory,
    ShootOptions,
};
pub use sweep::{dichotomy_sweep, AmplitudeGrid, SweepEntry, SweepReport};
