//! Command-line surface. Every option can also come from a JSON config
//! file (`--config`); explicit flags win.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "grad2",
    version,
    about = "Simulate and verify damped second-order gradient systems  u'' + a u' + grad W(u) = 0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate one trajectory and write CSV/SVG outputs
    Simulate(SimulateArgs),
    /// Run one initial condition across several damping values
    Sweep(SweepArgs),
    /// Map basins of attraction over a phase-space grid
    Basin(BasinArgs),
    /// Fit an exponential decay rate to a trajectory tail
    Decay(DecayArgs),
    /// Bisect for the critical damping threshold
    Critical(CriticalArgs),
    /// Detect closed orbits of the conservative system (a = 0)
    Conserve(ConserveArgs),
    /// Check energy balance, Lyapunov monotonicity and decay bounds
    Verify(VerifyArgs),
    /// Re-run the built-in experiment recipes and emit their figures
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// JSON config file; explicit flags override file values
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Potential kind: quadratic | double_well | quartic_symmetric |
    /// ginzburg_landau | exponential (shifted: config file only)
    #[arg(long)]
    pub potential: Option<String>,

    /// Potential parameter as key=value (repeatable), e.g. --param dim=2
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,

    /// Damping coefficient a >= 0 (a = 0 is the conservative case)
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,

    /// Reference equilibrium u*, comma-separated reals
    #[arg(long, allow_hyphen_values = true)]
    pub ustar: Option<String>,

    /// Initial condition: positions then velocities, comma-separated
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Option<String>,

    #[arg(long = "t-max")]
    pub t_max: Option<f64>,

    /// Output sample spacing
    #[arg(long)]
    pub stride: Option<f64>,

    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,

    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,

    /// Fixed step size for rk4/leapfrog runs
    #[arg(long)]
    pub h: Option<f64>,

    /// Integration method: adaptive | rk4 | leapfrog
    #[arg(long)]
    pub method: Option<String>,

    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Emit SVG phase portraits (default on)
    #[arg(long, overrides_with = "no_plot")]
    pub plot: bool,

    /// Suppress SVG output
    #[arg(long = "no-plot")]
    pub no_plot: bool,

    /// Worker thread count (also env GRAD2_THREADS; the flag wins)
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Damping values, comma-separated
    #[arg(long = "a-values", allow_hyphen_values = true)]
    pub a_values: Option<String>,
    /// Convergence tolerance for the early-stop rule
    #[arg(long = "conv-tol")]
    pub conv_tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BasinArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid axis as lo:hi:count; repeat once per phase axis
    /// (positions first, then velocities)
    #[arg(long = "grid", value_name = "LO:HI:N", allow_hyphen_values = true)]
    pub grid: Vec<String>,
    #[arg(long = "conv-tol")]
    pub conv_tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct DecayArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Tail fraction of samples used for the fit, in (0, 1)
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long = "a-lo")]
    pub a_lo: Option<f64>,
    #[arg(long = "a-hi")]
    pub a_hi: Option<f64>,
    /// Bisection width tolerance on a
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ConserveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Return-distance tolerance for orbit closure
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Ball radius around u* for the quadratic-control probe
    #[arg(long)]
    pub radius: Option<f64>,
    /// Sample count for the probe
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Figure id: quad_sweep | quad_conservative | dw_damped |
    /// dw_conservative | exp_damped | exp_conservative | exp_sweep | all
    #[arg(long)]
    pub figure: Option<String>,
}
