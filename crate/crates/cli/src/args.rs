use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QHELM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "qhelm", version, about = "Fourth-order nonlinear Helmholtz experiments", args_override_self = true)]
pub struct Cli {
    /// Flat key = value file; keys are long flag names, flags given on the
    /// command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory for relative artifact paths [env: QHELM_OUT_DIR].
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Rerun the command line stored in a manifest and compare output digests.
    #[arg(long)]
    pub replay: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mountain-pass solve of the dual equation.
    Solve(SolveArgs),
    /// Apply the limiting-absorption resolvent to a field.
    ResolventApply(ResolventArgs),
    /// Farfield amplitude and pointwise farfield error of Re G ∗ f.
    Farfield(FarfieldArgs),
    /// Integrated radiation-condition residuals of G ∗ f.
    RadiationCheck(RadiationArgs),
    /// Empirical (L^p, L^q) resolvent ratios over a seeded family.
    NormProbe(NormProbeArgs),
    /// Integrability of |G|^r at infinity.
    TailCheck(TailArgs),
    /// Sphere-restriction ratios over a seeded family.
    SteinTomas(SteinTomasArgs),
    /// Radial shooting from the origin.
    RadialShoot(RadialShootArgs),
    /// Classification map over initial data.
    RadialSweep(RadialSweepArgs),
    /// CSV table of G(r).
    KernelTable(KernelTableArgs),
    /// Quick invariant suite.
    Selfcheck(SelfcheckArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::ResolventApply(_) => "resolvent-apply",
            Command::Farfield(_) => "farfield",
            Command::RadiationCheck(_) => "radiation-check",
            Command::NormProbe(_) => "norm-probe",
            Command::TailCheck(_) => "tail-check",
            Command::SteinTomas(_) => "stein-tomas",
            Command::RadialShoot(_) => "radial-shoot",
            Command::RadialSweep(_) => "radial-sweep",
            Command::KernelTable(_) => "kernel-table",
            Command::Selfcheck(_) => "selfcheck",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LinearArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    /// Space dimension.
    #[arg(long = "N")]
    pub dim: usize,
}

#[derive(Debug, Clone, Args)]
pub struct NonlinearArgs {
    #[command(flatten)]
    pub linear: LinearArgs,
    #[arg(long)]
    pub p: f64,
    /// const:VALUE or file:PATH (real samples on the grid)
    #[arg(long, default_value = "const:1.0")]
    pub gamma: String,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub op: NonlinearArgs,
    /// M,L: points per axis and half width
    #[arg(long, default_value = "128,16")]
    pub grid: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    /// Random start with this seed (default: deterministic ascent direction).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub no_symmetrize: bool,
    /// Source radius (default 15L/32).
    #[arg(long)]
    pub source_radius: Option<f64>,
    /// Envelope taper width (default L/8).
    #[arg(long)]
    pub taper: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub consistency_tol: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub pde_tol: f64,
    /// Exit 1 when a primal tolerance is violated.
    #[arg(long)]
    pub strict: bool,
    /// Also write Re G ∗ f on a box this many times wider.
    #[arg(long)]
    pub extend: Option<usize>,
    /// lo,hi radii of the decay fit on the extension (default L/2 to the
    /// extended half width).
    #[arg(long)]
    pub decay_range: Option<String>,
    /// Output prefix.
    #[arg(long, default_value = "solve")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct ResolventArgs {
    #[command(flatten)]
    pub op: LinearArgs,
    #[arg(long)]
    pub grid: Option<String>,
    /// Input field; without it a normalized Gaussian of width --delta is used.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Cube window half width as a fraction of L.
    #[arg(long, default_value_t = 0.25)]
    pub window_fraction: f64,
    /// Radius of the ball holding the source support.
    #[arg(long)]
    pub source_radius: Option<f64>,
    /// Apply 𝐑 = Re 𝕽 instead of 𝕽.
    #[arg(long)]
    pub real: bool,
    #[arg(long, default_value = "resolvent.bin")]
    pub out: String,
    #[arg(long, default_value = "resolvent.report.json")]
    pub report: String,
}

#[derive(Debug, Clone, Args)]
pub struct FarfieldArgs {
    #[command(flatten)]
    pub op: LinearArgs,
    /// Source field f.
    #[arg(long)]
    pub f: PathBuf,
    /// Precomputed u on an extended box; computed from f when absent.
    #[arg(long)]
    pub u: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub extend: usize,
    /// Comma separated radii (default: L_ext/8, 2L_ext/8, ..., L_ext).
    #[arg(long)]
    pub radii: Option<String>,
    #[arg(long, default_value = "farfield.json")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct RadiationArgs {
    #[command(flatten)]
    pub op: LinearArgs,
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub extend: usize,
    #[arg(long)]
    pub radii: Option<String>,
    #[arg(long, default_value = "radiation.json")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct NormProbeArgs {
    #[command(flatten)]
    pub op: LinearArgs,
    /// Exponent p (integer, fraction, decimal or inf).
    #[arg(long = "p-exp")]
    pub p_exp: String,
    #[arg(long = "q-exp")]
    pub q_exp: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value = "norm-probe.json")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub op: LinearArgs,
    /// Exponent r of |G|^r.
    #[arg(long)]
    pub r: f64,
    /// Radii 2^1..2^levels.
    #[arg(long, default_value_t = 10)]
    pub levels: u32,
    #[arg(long, default_value = "tail.json")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct SteinTomasArgs {
    #[arg(long = "N")]
    pub dim: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value = "128,16")]
    pub grid: String,
    #[arg(long, default_value = "0.5,1,2")]
    pub radii: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 4.0)]
    pub support: f64,
    #[arg(long, default_value = "stein-tomas.json")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct ShootArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e6)]
    pub overflow: f64,
    #[arg(long, default_value_t = 2.0)]
    pub bound_factor: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RadialShootArgs {
    #[command(flatten)]
    pub op: NonlinearArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub u0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub u2: f64,
    #[arg(long)]
    pub rmax: f64,
    #[command(flatten)]
    pub shoot: ShootArgs,
    #[arg(long, default_value = "traj.csv")]
    pub out: String,
    #[arg(long, default_value = "traj.json")]
    pub summary: String,
}

#[derive(Debug, Clone, Args)]
pub struct RadialSweepArgs {
    #[command(flatten)]
    pub op: NonlinearArgs,
    /// disk:R:COUNT, square:A:COUNT or lattice:A:N
    #[arg(long)]
    pub grid_spec: String,
    #[arg(long, default_value_t = 200.0)]
    pub rmax: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub shoot: ShootArgs,
    #[arg(long, default_value = "map.csv")]
    pub out: String,
    #[arg(long, default_value = "map.json")]
    pub summary: String,
}

#[derive(Debug, Clone, Args)]
pub struct KernelTableArgs {
    #[command(flatten)]
    pub op: LinearArgs,
    #[arg(long)]
    pub rmax: f64,
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value = "kernel.csv")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct SelfcheckArgs {
    #[arg(long, default_value = "selfcheck.json")]
    pub out: String,
}
