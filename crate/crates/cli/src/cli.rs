//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "reclab",
    version,
    about = "Exit and recurrence times for unitary quantum dynamics",
    long_about = "Computes certified exit and recurrence times for pure states \
evolving under a diagonalized Hamiltonian, evaluates the closed-form bounds these \
times obey, verifies phase-net coverings by sampling, and runs random-spectrum \
ensembles.\n\nState files are JSON {\"eigenvalues\": [...], \"amplitudes\": \
[[re, im], ...]} or CSV with columns lambda,re,im. A --config file holds flat \
key = value entries mirroring the long flags; explicit flags win. \
RECLAB_THREADS caps the worker pool.\n\nExit codes: 0 success, 2 precondition \
error, 3 horizon exhausted."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Spectral moments of a state: mean, variance, fourth central moment,
    /// eps_star and the Lipschitz constant
    Moments(MomentsArgs),
    /// First time the evolved state leaves the eps-neighborhood of its
    /// initial point
    Exit(ExitArgs),
    /// Exit time plus the first k recurrence times
    Recur(RecurArgs),
    /// Every closed-form bound for one (state, eps) instance, as a table
    Bounds(BoundsArgs),
    /// Finiteness criterion for the exit time
    Finite(FiniteArgs),
    /// Sampled verification that the phase net covers its family
    #[command(name = "cover-check")]
    CoverCheck(CoverArgs),
    /// Phase-minimized distance between two commuting (diagonal) unitaries
    Diamond(DiamondArgs),
    /// Monte Carlo ensembles over random spectra
    Ensemble(EnsembleArgs),
    /// Two-timescale qutrit scenario: worst recurrence gap versus exit time
    Scenario(ScenarioArgs),
}

#[derive(Args)]
pub struct MomentsArgs {
    /// State file (JSON or CSV)
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Flat key = value config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the JSON document here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct ExitArgs {
    /// State file (JSON or CSV)
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Trace-distance threshold in (0, 1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Minimum march step (default 1e-6/L)
    #[arg(long)]
    pub dt_min: Option<f64>,
    /// Bisection tolerance on time (default 1e-10/L)
    #[arg(long)]
    pub refine_tol: Option<f64>,
    /// Search horizon (default 1e9/L; for recur, ten times the
    /// first-recurrence ceiling)
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Flat key = value config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the certificate JSON here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct RecurArgs {
    #[command(flatten)]
    pub solver: ExitArgs,
    /// Number of recurrences to find
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args)]
pub struct BoundsArgs {
    /// State file (JSON or CSV)
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Trace-distance threshold in (0, 1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Recurrence order for the k-th bound
    #[arg(long)]
    pub k: Option<u32>,
    /// Where the exit time feeding the recurrence bounds comes from
    #[arg(long, value_enum)]
    pub exit_source: Option<ExitSourceArg>,
    /// Treat the state as one of n non-interacting particles and add the
    /// free-evolution bound
    #[arg(long)]
    pub free_n: Option<usize>,
    /// Flat key = value config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the report JSON here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExitSourceArg {
    /// Run the crossing solver
    Measured,
    /// Use the inverse-speed-limit ceiling
    Thm2,
}

#[derive(Args)]
pub struct FiniteArgs {
    /// State file (JSON or CSV)
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Trace-distance threshold in (0, 1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Flat key = value config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the verdict JSON here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct CoverArgs {
    /// Net scale in (0, 1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of phase circles
    #[arg(long)]
    pub dim: Option<usize>,
    /// Which family the net covers
    #[arg(long, value_enum)]
    pub flavor: Option<FlavorArg>,
    /// Random points to draw (default 100000)
    #[arg(long)]
    pub samples: Option<usize>,
    /// RNG seed (default 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Base state file; required for --flavor state
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Flat key = value config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the report JSON here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    /// Torus of states with fixed populations
    State,
    /// Family of diagonal unitary channels
    Unitary,
}

#[derive(Args)]
pub struct DiamondArgs {
    /// Comma-separated phases, e.g. 0,pi or 1.5pi,-0.3
    #[arg(long)]
    pub theta: Option<String>,
    /// Comma-separated phases of the second unitary
    #[arg(long)]
    pub theta_prime: Option<String>,
    /// Flat key = value config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write {"distance": ...} here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
#[command(after_long_help = "Per-trial CSV columns: trial, spectrum_seed, dim, \
epsilon, mean, second_moment, variance, fourth_central, eps_star, lipschitz, \
window_mean, window_second, window_variance, window_fourth, t_exit, exit_status, \
exit_in_window, t_rec, rec_censored, monotone_ok, d_eff, d_supp_quarter, \
probe_distance. Absent values are empty cells.")]
pub struct EnsembleArgs {
    /// Hilbert-space dimension (exclusive with --dim-sweep)
    #[arg(long)]
    pub dim: Option<usize>,
    /// Inclusive dimension sweep a..b
    #[arg(long)]
    pub dim_sweep: Option<String>,
    /// Trace-distance threshold in (0, 1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Trials per configuration
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base RNG seed (default 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Initial-state family: uniform or eta:<η>
    #[arg(long)]
    pub family: Option<String>,
    /// Record the distance at this fixed probe time
    #[arg(long)]
    pub probe_t: Option<f64>,
    /// Cap on the per-trial recurrence horizon
    #[arg(long)]
    pub rec_horizon: Option<f64>,
    /// Write per-trial records as CSV to this path
    #[arg(long)]
    pub trials_csv: Option<PathBuf>,
    /// What goes to --output / stdout: the JSON summary or per-trial CSV
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Flat key = value config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the selected document here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
pub struct ScenarioArgs {
    /// Trace-distance threshold in (0, 0.3] (default 0.1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Comma-separated fast/slow frequency ratios (default 100,1000,10000)
    #[arg(long)]
    pub ratios: Option<String>,
    /// Search horizon per ratio (default 8, one slow period plus margin)
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Flat key = value config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the summary JSON here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}
