pub mod linear;
pub mod probes;
pub mod radial;
pub mod selfcheck;
pub mod solve;
