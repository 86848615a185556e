//! `percolab`: command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use percolab_core::experiments::{AlphaSpec, GraphSpec, TargetSpec};

mod commands;
mod output;

use output::Sink;

#[derive(Parser, Debug)]
#[command(name = "percolab", version, about = "Accessibility percolation and first-passage percolation toolkit")]
struct Cli {
    /// Master seed; replication r uses stream r of it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of replications (each command has its own default).
    #[arg(long, global = true)]
    reps: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for replications.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run replications on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// theta(x), or theta_n for a target of weight k in dimension n.
    Theta(ThetaArgs),
    /// The critical point (theta*, x*) of the U-shape criterion.
    Xstar,
    /// Figure data: theta(x) against x, or the endpoint sign value against theta.
    Curve(CurveArgs),
    /// Passage times of one cost sample, or the CDF of the reduced time.
    Fpp(FppArgs),
    /// Accessibility probability by Monte Carlo, or the accessible set of a landscape file.
    Access(AccessArgs),
    /// Check the landscape/passage-time coupling sample by sample.
    VerifyCoupling(VerifyArgs),
    /// Clustering translation process estimates.
    Ctp(CtpArgs),
    /// Run a JSON list of experiment configurations.
    Sweep(SweepArgs),
    /// Exact accessibility probability by enumerating rank orders.
    Exact(ExactArgs),
}

#[derive(Args, Debug)]
struct ThetaArgs {
    #[arg(long, conflicts_with_all = ["n", "k"])]
    x: Option<f64>,
    #[arg(long, requires = "k")]
    n: Option<u32>,
    #[arg(long, requires = "n")]
    k: Option<u32>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    Theta,
    Bastardized,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long, value_enum, default_value_t = CurveKind::Theta)]
    what: CurveKind,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Costs {
    Uniform,
    Exp,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Site,
    Bond,
}

#[derive(Args, Debug)]
struct FppArgs {
    #[arg(long, default_value = "hypercube:n=6,oriented=false")]
    graph: GraphSpec,
    #[arg(long, value_enum, default_value_t = Kind::Site)]
    kind: Kind,
    #[arg(long, value_enum, default_value_t = Costs::Uniform)]
    costs: Costs,
    /// Target for the CDF mode: `ones`, `uniform` or a vertex id.
    #[arg(long, default_value = "ones")]
    target: TargetSpec,
    /// Comma-separated sorted thresholds; switches to the CDF of the reduced time.
    #[arg(long, value_delimiter = ',')]
    thresholds: Vec<f64>,
    /// Also write the coupled landscape (site, uniform costs) as JSON.
    #[arg(long)]
    landscape_out: Option<PathBuf>,
    /// Source fitness used for --landscape-out.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum PathChoice {
    Fast,
    Slow,
}

#[derive(Args, Debug)]
struct AccessArgs {
    #[arg(long, default_value = "hypercube:n=10,oriented=false")]
    graph: GraphSpec,
    /// Source fitness, or `uniform`.
    #[arg(long, default_value = "uniform")]
    alpha: AlphaSpec,
    #[arg(long, default_value = "ones")]
    target: TargetSpec,
    /// Force the target fitness to 1.
    #[arg(long)]
    apriori_max: bool,
    #[arg(long, value_enum, default_value_t = PathChoice::Fast)]
    path: PathChoice,
    /// Report the accessible set of this landscape file instead.
    #[arg(long, conflicts_with_all = ["graph", "alpha", "apriori_max", "path"])]
    landscape: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "hypercube:n=6,oriented=false")]
    graph: GraphSpec,
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.5,0.9")]
    alpha: Vec<f64>,
    /// Also check the a priori maximum equivalence at this target.
    #[arg(long)]
    apriori_target: Option<TargetSpec>,
}

#[derive(Args, Debug)]
struct CtpArgs {
    #[arg(long, default_value_t = 6)]
    n: u32,
    /// Horizon; defaults to theta_n of the target weight.
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long, default_value = "ones")]
    target: TargetSpec,
    #[arg(long, default_value_t = percolab_core::ctp::DEFAULT_BUDGET)]
    budget: usize,
    /// Comma-separated subset of S,B,P,alive,occupancy,bound.
    #[arg(long, value_delimiter = ',', default_value = "S,B,P")]
    stats: Vec<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// JSON file holding one configuration or a list of them.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[arg(long, default_value = "hypercube:n=2,oriented=true")]
    graph: GraphSpec,
    #[arg(long, default_value = "ones")]
    target: TargetSpec,
    #[arg(long)]
    apriori_max: bool,
}

/// 0 on success, 1 when a coupling check found mismatches, 2 on errors.
fn exit_code(result: &Result<commands::Status, commands::CliError>) -> u8 {
    match result {
        Ok(commands::Status::Ok) => 0,
        Ok(commands::Status::Mismatch(_)) => 1,
        Err(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = percolab_core::parallel::set_worker_threads(threads) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let sink = Sink::new(cli.format, cli.out.clone());
    let result = commands::run(&cli, &sink);
    match &result {
        Ok(commands::Status::Mismatch(k)) => eprintln!("coupling check failed on {k} samples"),
        Err(e) => eprintln!("error: {e}"),
        Ok(commands::Status::Ok) => {}
    }
    ExitCode::from(exit_code(&result))
}
