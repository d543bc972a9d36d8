use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod context;

#[derive(Parser)]
#[command(name = "needlets", version, about = "Cutoff functions, polynomial kernels and needlet frames")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// JSON config; explicit flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// RNG seed (default 42).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Family tag, e.g. `jacobi(2,0.5)`, `hermite(1)`, `laguerre(0)`.
    #[arg(long, global = true)]
    pub family: Option<String>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Cutoff type: a, b, c (also `typeA` etc.).
    #[arg(long = "type", visible_alias = "cutoff", global = true)]
    pub kind: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build or check a cutoff function.
    #[command(subcommand)]
    Cutoff(CutoffCmd),
    /// Evaluate kernels.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Gauss quadrature rules.
    #[command(subcommand)]
    Quad(QuadCmd),
    /// Tight needlet frames.
    #[command(subcommand)]
    Needlet(NeedletCmd),
    /// Decay envelopes, bound fits and counterexamples.
    #[command(subcommand)]
    Decay(DecayCmd),
}

#[derive(Subcommand)]
pub enum CutoffCmd {
    /// Write the sampled cutoff `t,ahat` and its spec.
    Build,
    /// Shape, partition-of-unity and derivative checks.
    Check {
        /// Upper end of the partition-of-unity range.
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
        /// Highest derivative order compared with the bound.
        #[arg(long, default_value_t = 6)]
        k_max: usize,
    },
}

#[derive(Subcommand)]
pub enum KernelCmd {
    /// `L_n(x, y)` at one pair.
    Eval {
        /// Comma-separated coordinates of `x`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Comma-separated coordinates of `y`.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Kernel values on a grid (1-d families) or on seeded random pairs.
    Grid {
        /// Points per axis (1-d) or number of pairs.
        #[arg(long, default_value_t = 33)]
        points: usize,
    },
}

#[derive(Subcommand)]
pub enum QuadCmd {
    /// Write nodes and weights.
    Build(QuadArgs),
    /// Check exactness up to degree `2m - 1`.
    Verify(QuadArgs),
}

#[derive(Args, Clone)]
pub struct QuadArgs {
    /// jacobi, hermite or laguerre.
    #[arg(long, default_value = "jacobi")]
    pub weight: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Number of nodes.
    #[arg(long, default_value_t = 20)]
    pub m: usize,
}

#[derive(Subcommand)]
pub enum NeedletCmd {
    /// Dump levels, nodes and cubature weights.
    Build(FrameArgs),
    /// Parseval defect over random band-limited inputs.
    Parseval {
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Analysis followed by synthesis of one random input.
    Roundtrip {
        #[command(flatten)]
        frame: FrameArgs,
        /// Evaluation points for the comparison.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
}

#[derive(Args, Clone)]
pub struct FrameArgs {
    /// Finest level (default 5 for Jacobi, 4 otherwise).
    #[arg(long)]
    pub jmax: Option<usize>,
}

#[derive(Args, Clone)]
pub struct EnvelopeArgs {
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long)]
    pub rho_max: Option<f64>,
    /// Multiply values by `sqrt(W(x) W(y))`.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Subcommand)]
pub enum DecayCmd {
    /// Binned `max |L_n|` against distance.
    Envelope(EnvelopeArgs),
    /// Fit a polynomial or sub-exponential bound to a measured envelope.
    Fit {
        #[command(flatten)]
        env: EnvelopeArgs,
        /// polynomial or subexp.
        #[arg(long, default_value = "subexp")]
        form: String,
        #[arg(long, default_value_t = 4.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1)]
        log_depth: usize,
    },
    /// Sub-exponential fits of the small-derivative cutoff and a rough control.
    Compare {
        #[command(flatten)]
        env: EnvelopeArgs,
        /// Exponent `p` of the control widths `(j + 1)^{-p}`.
        #[arg(long, default_value_t = 2.0)]
        rough_exponent: f64,
    },
    /// The band-limited wavelet with its self-checks.
    Wavelet {
        #[arg(long, default_value_t = 2048.0)]
        length: f64,
        #[arg(long, default_value_t = 8192)]
        points: usize,
    },
    /// Tensor-product kernels at `(1, -1), (1, 1)`.
    Counterexample {
        /// legleg, chebcheb, chebleg or all.
        #[arg(long, default_value = "all")]
        variant: String,
        #[arg(long, default_value = "32,64,128,256")]
        n_list: String,
    },
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let ctx = match context::Ctx::new(cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let res = match cli.command {
        Command::Cutoff(c) => commands::cutoff(&ctx, c),
        Command::Kernel(c) => commands::kernel(&ctx, c),
        Command::Quad(c) => commands::quad(&ctx, c),
        Command::Needlet(c) => commands::needlet(&ctx, c),
        Command::Decay(c) => commands::decay(&ctx, c),
    };
    match res {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
