use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coevo_csp::HeuristicSpec;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0;

/// Environment variable naming the default data directory.
pub const DATA_DIR_ENV: &str = "COEVO_CSP_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Random,
}

pub fn parse_seed(s: &str) -> Result<SeedArg, String> {
    if s.eq_ignore_ascii_case("random") {
        return Ok(SeedArg::Random);
    }
    s.parse().map(SeedArg::Fixed).map_err(|_| format!("'{s}' is neither an unsigned integer nor 'random'"))
}

pub fn parse_heuristic(s: &str) -> Result<HeuristicSpec, String> {
    s.parse().map_err(|e: coevo_csp::Error| e.to_string())
}

/// Binary CSP solving with MAC search and learned constraint weights.
///
/// Exit codes: 0 success, 1 usage error, 2 input error, 3 internal error.
/// Errors are printed as one line: `coevo-csp: error[<usage|input|internal>]: <message>`.
#[derive(Debug, Parser)]
#[command(name = "coevo-csp", version, propagate_version = true)]
pub struct Cli {
    /// Directory that relative file paths are resolved against. Defaults to
    /// the current directory.
    #[arg(long, global = true, env = DATA_DIR_ENV, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance and write it in native or XCSP format.
    Generate(GenerateArgs),
    /// Run one pipeline (optional weight learner, then MAC) on an instance.
    Solve(SolveArgs),
    /// Print the learned weight of every constraint as CSV.
    LearnWeights(LearnWeightsArgs),
    /// Run seeded multi-run experiments and write run and comparison CSVs.
    Bench(BenchArgs),
    /// Compare one numeric column of two CSV files (Mann-Whitney U, Vargha-Delaney A).
    Stats(StatsArgs),
    /// Transcode an instance file (XCSP 2.1 or native) to native or XCSP.
    Convert(ConvertArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Model D: e distinct pairs, each forbidding round(t·d²) tuples.
    D,
    /// Model RB: d = round(n^alpha), e = round(r·n·ln n), round(p·d²) forbidden.
    Rb,
    /// Geometric: random points in the unit square, constraints within --distance.
    Geo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Native,
    Xcsp,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator model.
    #[arg(long, value_enum)]
    pub model: Model,
    /// Number of variables.
    #[arg(long)]
    pub n: usize,
    /// Domain size (models d and geo).
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of constraints (model d).
    #[arg(long)]
    pub e: Option<usize>,
    /// Tightness: fraction of forbidden tuples per relation (models d and geo).
    #[arg(long, value_name = "T")]
    pub t: Option<f64>,
    /// Domain-size exponent (model rb).
    #[arg(long, default_value_t = 0.8)]
    pub alpha: f64,
    /// Constraint-count factor (model rb).
    #[arg(long, default_value_t = 0.8)]
    pub r: f64,
    /// Tightness (model rb).
    #[arg(long)]
    pub p: Option<f64>,
    /// Plant a solution and never forbid its tuples (model rb).
    #[arg(long)]
    pub forced: bool,
    /// Write the planted solution, one value per line, to this file (model rb with --forced).
    #[arg(long, value_name = "FILE")]
    pub planted_out: Option<PathBuf>,
    /// Connection distance in the unit square (model geo).
    #[arg(long)]
    pub distance: Option<f64>,
    /// Seed: an unsigned integer or 'random'.
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    pub seed: SeedArg,
    /// Output format. Defaults to xcsp for a .xml output file, native otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file. Defaults to standard output.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodKind {
    /// MAC with uniform initial weights.
    PlainMac,
    /// Coevolutionary weight learning, then MAC.
    Coevo,
    /// Random probing with node-capped restarts, then MAC.
    Rndi,
    /// Hill-climbing weight learning, then MAC.
    Hc,
}

/// Learner parameters; unset ones keep the learner defaults.
#[derive(Debug, Default, Args)]
pub struct LearnerArgs {
    /// Coevolution: number of generations.
    #[arg(long)]
    pub generations: Option<usize>,
    /// Coevolution: solution population size.
    #[arg(long)]
    pub pop_size: Option<usize>,
    /// Coevolution: encounter history length.
    #[arg(long)]
    pub history_len: Option<usize>,
    /// Coevolution: encounters per generation.
    #[arg(long)]
    pub encounters: Option<usize>,
    /// Coevolution: one-point crossover probability.
    #[arg(long)]
    pub crossover_rate: Option<f64>,
    /// Coevolution: per-bit mutation probability.
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    /// Coevolution: linear ranking bias in [1, 2].
    #[arg(long)]
    pub ranking_bias: Option<f64>,
    /// Coevolution: tournament size.
    #[arg(long)]
    pub tournament_size: Option<usize>,
    /// RNDI: total restarts R (R - 1 probes plus the final search).
    #[arg(long)]
    pub restarts: Option<usize>,
    /// RNDI: probe node cap as a multiple of the variable count.
    #[arg(long)]
    pub node_cap_factor: Option<u64>,
    /// Hill climbing: total step budget.
    #[arg(long)]
    pub hc_iterations: Option<usize>,
    /// Hill climbing: steps per climb before a forced restart.
    #[arg(long)]
    pub hc_cutoff: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file (.xml for XCSP 2.1, anything else native).
    pub instance: PathBuf,
    /// Pipeline to run.
    #[arg(long, value_enum, default_value = "plain-mac")]
    pub method: MethodKind,
    /// Variable-ordering heuristic of the final search: lex, random, dom,
    /// deg, ddeg, dom_ddeg, wdeg, dom_wdeg. Defaults to dom_wdeg for
    /// plain-mac and wdeg after a learner.
    #[arg(long, value_parser = parse_heuristic)]
    pub heuristic: Option<HeuristicSpec>,
    /// Seed: an unsigned integer or 'random'.
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    pub seed: SeedArg,
    /// Wall-clock limit in seconds for learning plus search.
    #[arg(long, value_name = "SECS")]
    pub timeout: Option<f64>,
    /// Node cap on the final search.
    #[arg(long)]
    pub node_cap: Option<u64>,
    /// Print the solution when one is found.
    #[arg(long)]
    pub show_solution: bool,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LearnerKind {
    Coevo,
    Rndi,
    Hc,
}

#[derive(Debug, Args)]
pub struct LearnWeightsArgs {
    /// Instance file (.xml for XCSP 2.1, anything else native).
    pub instance: PathBuf,
    /// Weight learner.
    #[arg(long, value_enum, default_value = "coevo")]
    pub method: LearnerKind,
    /// Seed: an unsigned integer or 'random'.
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    pub seed: SeedArg,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML experiment file with `instance`, `methods` and optional `runs`,
    /// `timeout_secs`, `base_seed`, `node_cap`. Flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Instance file; replaces the config's instance source.
    #[arg(long, value_name = "FILE")]
    pub instance: Option<PathBuf>,
    /// Method to run, repeatable: coevo, rndi, hc or plain-mac:<heuristic>;
    /// coevo, rndi and hc accept :<heuristic> for the final search.
    /// Replaces the config's methods.
    #[arg(long = "method", value_name = "METHOD")]
    pub methods: Vec<String>,
    /// Runs per method (default 50).
    #[arg(long)]
    pub runs: Option<usize>,
    /// Per-run wall-clock limit in seconds, learning included (default 1200).
    #[arg(long, value_name = "SECS")]
    pub timeout: Option<f64>,
    /// Node cap on each final search.
    #[arg(long)]
    pub node_cap: Option<u64>,
    /// Base seed: run i uses seed + i. An unsigned integer or 'random'.
    /// Defaults to the config's base_seed, else 0.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<SeedArg>,
    /// Worker threads for the runs of one method.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Directory for runs.csv, summary.csv and comparisons.csv.
    #[arg(long, value_name = "DIR", default_value = "bench-out")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// First CSV file.
    pub a: PathBuf,
    /// Second CSV file.
    pub b: PathBuf,
    /// Column to compare.
    #[arg(long, default_value = "n")]
    pub col: String,
    /// Keep only rows of the first file whose `method` column equals this.
    #[arg(long, value_name = "METHOD")]
    pub method_a: Option<String>,
    /// Keep only rows of the second file whose `method` column equals this.
    #[arg(long, value_name = "METHOD")]
    pub method_b: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Input instance (.xml for XCSP 2.1, anything else native).
    pub input: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value = "native")]
    pub to: Format,
    /// Output file. Defaults to standard output.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}
