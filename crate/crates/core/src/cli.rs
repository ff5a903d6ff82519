//! Command-line front end. [`run`] parses arguments, executes one subcommand
//! and returns the process exit code: 0 on success, 1 on I/O failures and 2
//! on flag or validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::alignment::{AlignmentSet, Chunk};
use crate::dac::{self, DacConfig};
use crate::dp::{align_chunk, BeadScorer, BeadSet, GaleChurch, Priors};
use crate::embed::EmbeddingMatrix;
use crate::error::Error;
use crate::evaluation;
use crate::lexical::{LexicalScorer, TTable};
use crate::simulator;

#[derive(Debug, Parser)]
#[command(name = "dacalign", version, about = "Divide-and-conquer sentence alignment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Align two documents (one sentence per line) and write the alignment.
    Align(AlignArgs),
    /// Print mined hard delimiters as `i<TAB>j<TAB>cosine<TAB>margin`.
    Delimiters(DelimiterArgs),
    /// Estimate the expected maximum chunk size; writes CSV.
    Simulate(SimulateArgs),
    /// Strict P/R/F1 of a test alignment, or delimiter P/R/F1.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Source document, one sentence per line.
    #[arg(long)]
    pub src: PathBuf,
    /// Target document, one sentence per line.
    #[arg(long)]
    pub tgt: PathBuf,
    /// Source embeddings: raw little-endian f32, one row per sentence.
    #[arg(long)]
    pub src_emb: Option<PathBuf>,
    /// Target embeddings: raw little-endian f32, one row per sentence.
    #[arg(long)]
    pub tgt_emb: Option<PathBuf>,
    /// Embedding dimension.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MiningArgs {
    /// Minimum cosine for a mined 1-to-1 candidate.
    #[arg(long, default_value_t = 0.6)]
    pub threshold: f32,
    /// Neighbourhood size for margin scoring.
    #[arg(long, default_value_t = 4)]
    pub knn: usize,
    /// Largest chunk side aligned with the full DP.
    #[arg(long, default_value_t = 200)]
    pub max_chunk: usize,
    /// Band half-width around anchors for oversized chunks.
    #[arg(long, default_value_t = 10)]
    pub band: usize,
    /// Maximum levels of local re-mining.
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScorerKind {
    GaleChurch,
    Lexical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BeadsKind {
    Default,
    Extended,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub mining: MiningArgs,
    /// Bead scorer.
    #[arg(long, value_enum, default_value_t = ScorerKind::GaleChurch)]
    pub scorer: ScorerKind,
    /// Translation table (`src tgt prob` per line); required with --scorer lexical.
    #[arg(long)]
    pub ttable: Option<PathBuf>,
    /// Bead set: default (up to 2-2) or extended (adds 1-n / n-1 up to 5).
    #[arg(long, value_enum, default_value_t = BeadsKind::Default)]
    pub beads: BeadsKind,
    /// Output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip mining and align the whole documents with one DP.
    #[arg(long)]
    pub no_dac: bool,
}

#[derive(Debug, Args)]
pub struct DelimiterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub mining: MiningArgs,
    /// Output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Alignment counts, comma-separated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// 1-to-1 ratios, comma-separated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Monte Carlo trials per (n, r).
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Seed for the ChaCha8 generator.
    #[arg(long, default_value_t = simulator::DEFAULT_SEED)]
    pub seed: u64,
    /// Exact enumeration instead of sampling (n <= 20).
    #[arg(long)]
    pub exact: bool,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Test alignment file.
    #[arg(long, required_unless_present = "delimiters")]
    pub test: Option<PathBuf>,
    /// Gold alignment file.
    #[arg(long)]
    pub gold: PathBuf,
    /// Found-delimiter file (output of `delimiters`); switches to delimiter metrics.
    #[arg(long)]
    pub delimiters: Option<PathBuf>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => 1,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    Error::io(path, e).into()
}

type CliResult<T = ()> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                2
            } else {
                let _ = write!(stdout, "{}", e.render());
                0
            };
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "dacalign: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write) -> CliResult {
    match command {
        Command::Align(args) => cmd_align(args, stdout),
        Command::Delimiters(args) => cmd_delimiters(args, stdout),
        Command::Simulate(args) => cmd_simulate(args, stdout),
        Command::Evaluate(args) => cmd_evaluate(args, stdout),
    }
}

fn read_sentences(path: &Path) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_owned()).collect())
}

fn with_output(out: &Option<PathBuf>, stdout: &mut dyn Write, body: &[u8]) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| io_error(path, e)),
        None => stdout
            .write_all(body)
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn config_from(mining: &MiningArgs, beads: BeadSet) -> CliResult<DacConfig> {
    let config = DacConfig {
        cos_threshold: mining.threshold,
        k_nn: mining.knn,
        max_chunk: mining.max_chunk,
        band: mining.band,
        max_depth: mining.max_depth,
        jobs: mining.jobs,
        beads,
    };
    config.validate().map_err(|e| {
        let flag = match e {
            Error::OutOfRange { name: "cos_threshold", .. } => "--threshold",
            Error::OutOfRange { name: "k_nn", .. } => "--knn",
            Error::OutOfRange { name: "max_chunk", .. } => "--max-chunk",
            Error::OutOfRange { name: "jobs", .. } => "--jobs",
            _ => "configuration",
        };
        CliError::usage(format!("{flag}: {e}"))
    })?;
    Ok(config)
}

/// Loads both embedding files and checks them against the sentence counts.
fn load_embeddings(input: &InputArgs, n_src: usize, n_tgt: usize) -> CliResult<(EmbeddingMatrix, EmbeddingMatrix)> {
    let src_path = input
        .src_emb
        .as_ref()
        .ok_or_else(|| CliError::usage("--src-emb is required"))?;
    let tgt_path = input
        .tgt_emb
        .as_ref()
        .ok_or_else(|| CliError::usage("--tgt-emb is required"))?;
    let dim = input.dim.ok_or_else(|| CliError::usage("--dim is required"))?;
    if dim == 0 {
        return Err(CliError::usage("--dim must be positive"));
    }
    let load = |flag: &str, path: &Path, sentences: usize, doc_flag: &str| -> CliResult<EmbeddingMatrix> {
        let m = EmbeddingMatrix::load(path, dim).map_err(|e| {
            let mut err = CliError::from(e);
            if err.code == 2 {
                err.message = format!("{flag}: {}", err.message);
            }
            err
        })?;
        if m.n() != sentences {
            return Err(CliError::usage(format!(
                "{flag} has {} rows but {doc_flag} has {sentences} sentences",
                m.n()
            )));
        }
        Ok(m)
    };
    Ok((
        load("--src-emb", src_path, n_src, "--src")?,
        load("--tgt-emb", tgt_path, n_tgt, "--tgt")?,
    ))
}

fn cmd_align(args: &AlignArgs, stdout: &mut dyn Write) -> CliResult {
    let src = read_sentences(&args.input.src)?;
    let tgt = read_sentences(&args.input.tgt)?;
    let beads = match args.beads {
        BeadsKind::Default => BeadSet::standard(),
        BeadsKind::Extended => BeadSet::extended(),
    };
    let config = config_from(&args.mining, beads)?;
    let priors = Priors::default();
    let scorer: Box<dyn BeadScorer> = match (args.scorer, &args.ttable) {
        (ScorerKind::GaleChurch, None) => Box::new(GaleChurch::from_sentences(&src, &tgt, &priors)),
        (ScorerKind::GaleChurch, Some(_)) => {
            return Err(CliError::usage("--ttable only applies to --scorer lexical"));
        }
        (ScorerKind::Lexical, None) => {
            return Err(CliError::usage("--ttable is required with --scorer lexical"));
        }
        (ScorerKind::Lexical, Some(path)) => {
            let table = TTable::load(path).map_err(|e| {
                let mut err = CliError::from(e);
                err.message = format!("--ttable: {}", err.message);
                err
            })?;
            Box::new(LexicalScorer::new(&src, &tgt, &table, &priors))
        }
    };

    let alignment = if args.no_dac {
        let beads = align_chunk(&Chunk::whole(src.len(), tgt.len()), scorer.as_ref(), &config.beads)?.beads;
        AlignmentSet::new(beads, src.len(), tgt.len())
    } else {
        let (src_emb, tgt_emb) = load_embeddings(&args.input, src.len(), tgt.len())?;
        dac::dac_align(&src_emb, &tgt_emb, scorer.as_ref(), &config)?.alignment
    };
    with_output(&args.out, stdout, alignment.to_text().as_bytes())
}

fn cmd_delimiters(args: &DelimiterArgs, stdout: &mut dyn Write) -> CliResult {
    let src = read_sentences(&args.input.src)?;
    let tgt = read_sentences(&args.input.tgt)?;
    let config = config_from(&args.mining, BeadSet::standard())?;
    let (src_emb, tgt_emb) = load_embeddings(&args.input, src.len(), tgt.len())?;
    let plan = dac::plan(&src_emb, &tgt_emb, &config)?;
    let mut body = String::new();
    for d in &plan.delimiters {
        body += &format!("{}\t{}\t{:.6}\t{:.6}\n", d.src_idx, d.tgt_idx, d.cosine, d.margin);
    }
    with_output(&args.out, stdout, body.as_bytes())
}

fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> CliResult {
    if args.jobs == 0 {
        return Err(CliError::usage("--jobs must be positive"));
    }
    if args.trials == 0 {
        return Err(CliError::usage("--trials must be positive"));
    }
    if let Some(r) = args.r.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(CliError::usage(format!("--r: {r} is outside [0, 1]")));
    }
    if let Some(n) = args.n.iter().find(|&&n| n == 0) {
        return Err(CliError::usage(format!("--n: {n} must be positive")));
    }
    if args.exact {
        if let Some(n) = args.n.iter().find(|&&n| n > simulator::MAX_EXACT_N) {
            return Err(CliError::usage(format!(
                "--exact supports n <= {}, got {n}",
                simulator::MAX_EXACT_N
            )));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::usage(format!("--jobs: {e}")))?;
    let rows = pool.install(|| simulator::sweep(&args.n, &args.r, args.trials, args.seed, args.exact))?;
    let mut body = Vec::new();
    simulator::write_csv(&rows, &mut body).expect("writing to a Vec cannot fail");
    with_output(&args.out, stdout, &body)
}

fn read_delimiter_pairs(path: &Path) -> CliResult<Vec<(usize, usize)>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let (Some(i), Some(j)) = (fields.next(), fields.next()) else {
            if line.trim().is_empty() {
                continue;
            }
            return Err(CliError::usage(format!(
                "{}: line {}: expected at least two fields",
                path.display(),
                lineno + 1
            )));
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| {
                CliError::usage(format!("{}: line {}: bad index {s:?}", path.display(), lineno + 1))
            })
        };
        pairs.push((parse(i)?, parse(j)?));
    }
    Ok(pairs)
}

fn cmd_evaluate(args: &EvaluateArgs, stdout: &mut dyn Write) -> CliResult {
    let gold = AlignmentSet::read(&args.gold)?;
    gold.validate()
        .map_err(|v| CliError::usage(format!("--gold: {v}")))?;
    let prf = match (&args.delimiters, &args.test) {
        (Some(path), _) => evaluation::delimiter_prf(&read_delimiter_pairs(path)?, &gold),
        (None, Some(path)) => {
            let test = AlignmentSet::read(path)?;
            test.validate()
                .map_err(|v| CliError::usage(format!("--test: {v}")))?;
            evaluation::strict_prf(&test, &gold)?
        }
        (None, None) => return Err(CliError::usage("--test or --delimiters is required")),
    };
    with_output(&None, stdout, format!("{prf}\n").as_bytes())
}
