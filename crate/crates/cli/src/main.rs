//! `strider`: reference-based compression of DNA sequences.
//!
//! Exit status: 0 on success, 2 for IO, usage and range errors, 3 when a
//! reference does not match the checksum stored in an index or container,
//! 4 when a container or index file is damaged.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Config;
use error::{CliError, EXIT_USAGE};

pub const THREADS_ENV: &str = "STRIDER_THREADS";

#[derive(Debug, Parser)]
#[command(name = "strider", version, about = "Reference-based DNA compression")]
pub struct Cli {
    /// Defaults file of `key = value` lines. Falls back to $STRIDER_CONFIG.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// Fail on ambiguity codes (N, R, Y, ...) instead of replacing them with A.
    #[arg(long, global = true)]
    pub strict: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a `.bidx` k-mer index for a reference.
    BuildIndex(BuildIndexArgs),
    /// Compress FASTA or .2bit-raw records into a `.bnc` container.
    Compress(CompressArgs),
    /// Restore records from a container.
    Decompress(DecompressArgs),
    /// Decode a base range of one record.
    Extract(ExtractArgs),
    /// Pre-alignment filter over read / reference-segment pairs.
    ShdFilter(ShdArgs),
    /// Measure compression ratio across (k, s) combinations.
    Sweep(SweepArgs),
    /// Write a synthetic reference and matching targets.
    GenSynthetic(GenArgs),
}

#[derive(Debug, Args)]
pub struct BuildIndexArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// k-mer length [default: 64]
    #[arg(long)]
    pub k: Option<usize>,
    /// Index every `stride`-th reference offset [default: 1]
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[arg(long)]
    pub reference: PathBuf,
    /// Prebuilt index; built in memory when omitted.
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// k-mer length [default: 64, or the index's k]
    #[arg(long)]
    pub k: Option<usize>,
    /// Groups per random-access chunk; 0 indexes record starts only [default: 16]
    #[arg(long)]
    pub chunk_groups: Option<u32>,
    /// Skip the nibble prefilter (same output, more verifications).
    #[arg(long)]
    pub no_prefilter: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeqFormat {
    Fasta,
    #[value(name = "2bit")]
    TwoBit,
    /// Bare sequence on one line.
    Raw,
}

#[derive(Debug, Args)]
pub struct DecompressArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fasta")]
    pub format: SeqFormat,
    /// FASTA line width; 0 for unwrapped [default: 60]
    #[arg(long)]
    pub line_width: Option<usize>,
    /// Only this record (id or zero-based position).
    #[arg(long)]
    pub record: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub offset: u64,
    #[arg(long)]
    pub length: u64,
    /// Record id or zero-based position [default: 0]
    #[arg(long)]
    pub record: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "raw")]
    pub format: SeqFormat,
    #[arg(long)]
    pub line_width: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ShdArgs {
    /// Reads as FASTA or .2bit-raw.
    #[arg(long, conflicts_with = "container", required_unless_present = "container")]
    pub reads: Option<PathBuf>,
    /// Take reads from a container instead; needs --reference.
    #[arg(long, requires = "reference")]
    pub container: Option<PathBuf>,
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Reference segments, paired with reads by position.
    #[arg(long)]
    pub segments: PathBuf,
    /// Edit-distance threshold [default: 5]
    #[arg(long)]
    pub e: Option<usize>,
    /// Longest interior zero run turned into ones [default: 0]
    #[arg(long)]
    pub amend_run: Option<usize>,
    /// Accept when at most this many ones survive [default: e]
    #[arg(long)]
    pub threshold: Option<usize>,
    /// Verdict TSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    #[value(name = "self")]
    SelfCompression,
    Mutated,
    Reads,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
    pub k_values: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
    pub s_values: Vec<usize>,
    /// [default: 1]
    #[arg(long)]
    pub trials: Option<usize>,
    /// File dataset as NAME=TARGET:REFERENCE (repeatable).
    #[arg(long = "dataset")]
    pub datasets: Vec<String>,
    /// Add a synthetic dataset of this kind (repeatable).
    #[arg(long = "synthetic", value_enum)]
    pub synthetic: Vec<SynthKind>,
    #[arg(long, default_value_t = 200_000)]
    pub synthetic_len: usize,
    /// Per-base error rate for mutated targets and reads.
    #[arg(long, default_value_t = 0.02)]
    pub error_rate: f64,
    #[arg(long, default_value_t = 200)]
    pub read_count: usize,
    #[arg(long, default_value_t = 1000)]
    pub read_len: usize,
    /// Draw the synthetic reference from repeat families instead of uniformly.
    #[arg(long)]
    pub repeats: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenMode {
    #[value(name = "self")]
    SelfCopy,
    Mutated,
    Reads,
    Splice,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "mutated")]
    pub mode: GenMode,
    #[arg(long, default_value_t = 100_000)]
    pub length: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Per-base error rate.
    #[arg(long, default_value_t = 0.01)]
    pub rate: f64,
    /// Split errors evenly between substitutions, insertions and deletions.
    #[arg(long)]
    pub indels: bool,
    #[arg(long, default_value_t = 100)]
    pub read_count: usize,
    #[arg(long, default_value_t = 1000)]
    pub read_len: usize,
    #[arg(long, default_value_t = 8)]
    pub pieces: usize,
    #[arg(long)]
    pub repeats: bool,
    #[arg(long)]
    pub reference_out: PathBuf,
    #[arg(long)]
    pub target_out: PathBuf,
    #[arg(long)]
    pub line_width: Option<usize>,
}

fn init_threads(n: usize) {
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        eprintln!("warning: thread pool: {e}");
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    if let Some(n) = cli.threads.or(cfg.threads) {
        init_threads(n);
    }
    let ctx = commands::Context::new(&cfg, cli.strict);
    match cli.command {
        Command::BuildIndex(a) => commands::build_index(&ctx, a),
        Command::Compress(a) => commands::compress(&ctx, a),
        Command::Decompress(a) => commands::decompress(&ctx, a),
        Command::Extract(a) => commands::extract(&ctx, a),
        Command::ShdFilter(a) => commands::shd_filter(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::GenSynthetic(a) => commands::gen_synthetic(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("strider: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
