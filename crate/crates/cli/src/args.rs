use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "rsumset", version, about = "Restricted sumset experiments")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for sampled modes.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Node budget per instance; accepts `1e7`.
    #[arg(long, global = true, value_parser = parse_budget)]
    pub budget: Option<u64>,
    /// Append an experiment record to this JSONL file.
    #[arg(long, global = true)]
    pub record: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_budget(s: &str) -> Result<u64, String> {
    rsumset::search::parse_budget(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an explicit construction and audit it.
    Construct(ConstructArgs),
    /// Exact minimum of |A +_R B| over a relation class.
    Minimize(MinimizeArgs),
    /// Scan every small instance for violations of a conjectured bound.
    Scan(ScanArgs),
    /// Counting identities, Sidon sets, the sum bound and the staircase path.
    Verify(VerifyArgs),
    /// Rectifying dilations and the Green-Ruzsa hypothesis.
    Rectify(RectifyArgs),
    /// Interval partition, claim evaluators and the constant ledger.
    Stability(StabilityArgs),
    /// Re-run every record of a JSONL log and compare results byte for byte.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Corner,
    Zgap,
    Fpfun,
    Fpmatch,
    Fpunb,
    Pattern,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(long)]
    pub d: Option<i64>,
    #[arg(long)]
    pub k: Option<i64>,
    #[arg(long)]
    pub ell: Option<i64>,
    #[arg(long)]
    pub eps: Option<String>,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    /// Prime modulus; omit for sets of integers.
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    /// `function-b`, `matching`, `degree-b`, `degree-both`, or `degree-b:D`.
    #[arg(long)]
    pub constraint: String,
    /// Degree bound for `degree-b` and `degree-both`.
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// `lev`, `lev_cases`, `a_plus_2b`, `z_fiveDhalf` or `sum_bound`.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub p: Option<u64>,
    /// Window length for `z_fiveDhalf`.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<u64>,
    /// Draw this many random instances instead of enumerating; needs `--seed`.
    #[arg(long)]
    pub sample: Option<usize>,
    /// Write one JSON row per instance here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyWhat {
    Rprofile,
    Sidon,
    Candidates,
    SumBound,
    Staircase,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub what: VerifyWhat,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    /// Relation literal such as `0:2;1:1`.
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RectifyArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub set: String,
    /// Second set for a pair certificate.
    #[arg(long)]
    pub set_b: Option<String>,
    /// Order of the certificate for a single set.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Also evaluate the Green-Ruzsa hypothesis with this `k`.
    #[arg(long)]
    pub gr: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long)]
    pub p: Option<u64>,
    /// Generate instances meeting every hypothesis.
    #[arg(long)]
    pub synthesize: bool,
    #[arg(long, default_value_t = 2)]
    pub b_size: usize,
    #[arg(long, default_value_t = 0)]
    pub r: usize,
    /// Number of synthetic instances, seeded `seed, seed+1, ...`.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub i_start: Option<i64>,
    #[arg(long)]
    pub i_len: Option<usize>,
    #[arg(long)]
    pub j_start: Option<i64>,
    #[arg(long)]
    pub j_len: Option<usize>,
    #[arg(long)]
    pub ql: Option<i64>,
    #[arg(long)]
    pub qr: Option<i64>,
    /// Evaluate the explicit constants instead.
    #[arg(long)]
    pub ledger: bool,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub d: Option<u32>,
    /// Alias of `--format`.
    #[arg(long, value_enum)]
    pub report: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub file: PathBuf,
}
