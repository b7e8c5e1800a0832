//! Command-line front end for the voice-leading pattern pipeline.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vlpatterns::corpus::{self, Corpus, CorpusError, Timing};
use vlpatterns::evaluation::{
    self, generate_synthetic_corpus, EvalError, GridSpec, PipelineConfig, PipelineOptions,
    SkipLevel, SynthSpec, DEFAULT_COMPARISONS,
};
use vlpatterns::filters::{FilterKind, SimilarityRule, DEFAULT_MIN_COUNT};
use vlpatterns::ranking::{MarginalSource, Measure};
use vlpatterns::skipgram::{dump_line, EncodedPiece, SkipBudget};
use vlpatterns::vlt::{parse_pattern, VltPattern};
use vlpatterns::weighting::{Weigher, WeightKind};

const MRDCC: &str = "<5,9*,_>[0]<4,7*,10>[5]<4,_,_>";

#[derive(Parser)]
#[command(
    name = "vlpatterns",
    version,
    about = "Mine recurrent voice-leading patterns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the vertical slices of a corpus.
    Expand(IoArgs),
    /// Dump the VLT sequence of every piece.
    Encode(IoArgs),
    /// Rank n-gram types for one configuration.
    Mine(MineArgs),
    /// Run every configuration and record the query's rank.
    Grid(GridArgs),
    /// Generate a synthetic corpus with a planted pattern.
    Synth(SynthArgs),
    /// Per-level MRR and comparisons from a grid CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Note-event file or directory.
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Budget {
    Total,
    PerGap,
}

impl From<Budget> for SkipBudget {
    fn from(b: Budget) -> Self {
        match b {
            Budget::Total => SkipBudget::Total,
            Budget::PerGap => SkipBudget::PerGap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Filter {
    None,
    Freq,
    Harmony,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Similarity {
    Shared,
    Identical,
}

#[derive(Clone, Copy, ValueEnum)]
enum Marginals {
    Positional,
    Sequence,
}

#[derive(Args)]
struct PipelineArgs {
    /// Members per n-gram.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// How a fixed skip budget is spread over the gaps.
    #[arg(long, value_enum, default_value_t = Budget::Total)]
    budget: Budget,
    /// Frequency threshold of the `freq` and `both` filters.
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    min_count: f64,
    /// Adjacent same-bass chords are dissimilar unless they share an
    /// interval class (`shared`) or have identical sets (`identical`).
    #[arg(long, value_enum, default_value_t = Similarity::Shared)]
    similarity: Similarity,
    /// Source of the component probabilities for pMI and Dice.
    #[arg(long, value_enum, default_value_t = Marginals::Positional)]
    marginals: Marginals,
    /// Half-life of the proximity weight in seconds.
    #[arg(long, default_value_t = 1.0)]
    half_life: f64,
}

impl PipelineArgs {
    fn options(&self) -> PipelineOptions {
        let mut o = PipelineOptions {
            n: self.n as usize,
            budget: self.budget.into(),
            similarity: match self.similarity {
                Similarity::Shared => SimilarityRule::SharedInterval,
                Similarity::Identical => SimilarityRule::IdenticalSet,
            },
            marginals: match self.marginals {
                Marginals::Positional => MarginalSource::Positional,
                Marginals::Sequence => MarginalSource::Sequence,
            },
            ..PipelineOptions::default()
        };
        o.weight_params.half_life = self.half_life;
        o
    }
}

#[derive(Args)]
struct MineArgs {
    input: PathBuf,
    /// `fixed:<t>` or `variable:<seconds>`.
    #[arg(long, default_value = "fixed:0", value_parser = parse_skip)]
    skip: SkipLevel,
    #[arg(long, default_value = "count", value_parser = parse_weight)]
    weight: WeightKind,
    #[arg(long, value_enum, default_value_t = Filter::None)]
    filter: Filter,
    #[arg(long, default_value = "counts", value_parser = parse_measure)]
    rank: Measure,
    /// Pattern whose rank is reported on the last line.
    #[arg(long, value_parser = parse_query)]
    query: Option<VltPattern>,
    /// Write every token as `piece_id indices type weight`.
    #[arg(long)]
    dump_tokens: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    input: PathBuf,
    #[arg(long, value_parser = parse_query)]
    query: VltPattern,
    /// Comma-separated variable-skip windows in seconds.
    #[arg(long, value_delimiter = ',', default_values_t = evaluation::DEFAULT_VARIABLE_LEVELS)]
    variable_levels: Vec<f64>,
    /// Number of planned comparisons for the Bonferroni correction.
    #[arg(long, default_value_t = DEFAULT_COMPARISONS)]
    comparisons: usize,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Grid CSV destination.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Comparison table destination.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    pieces: usize,
    /// Slices per piece.
    #[arg(long, default_value_t = 500)]
    length: usize,
    /// Distinct noise chord shapes.
    #[arg(long, default_value_t = 60)]
    vocabulary: usize,
    #[arg(long, default_value_t = 1.0)]
    zipf: f64,
    #[arg(long, default_value = MRDCC, value_parser = parse_query)]
    pattern: VltPattern,
    /// Fraction of pieces that receive the pattern.
    #[arg(long, default_value_t = 0.6)]
    rate: f64,
    /// Instances per planted piece, `lo-hi`.
    #[arg(long, default_value = "4-5", value_parser = parse_range)]
    instances: (usize, usize),
    /// Interpolated chords per instance, `lo-hi`.
    #[arg(long, default_value = "1-5", value_parser = parse_range)]
    gaps: (usize, usize),
    /// Tempo range in BPM, `lo-hi`.
    #[arg(long, default_value = "60-140", value_parser = parse_range)]
    tempo: (usize, usize),
    /// Corpus destination.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Planted-instance manifest destination.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Grid CSV written by `grid`.
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_COMPARISONS)]
    comparisons: usize,
    /// Per-level MRR destination.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Comparison table destination.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn parse_skip(s: &str) -> Result<SkipLevel, String> {
    s.parse()
}

fn parse_weight(s: &str) -> Result<WeightKind, String> {
    s.parse()
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse()
}

fn parse_query(s: &str) -> Result<VltPattern, String> {
    parse_pattern(s).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('-').unwrap_or((s, s));
    let lo = a.trim().parse().map_err(|_| format!("bad range '{s}'"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad range '{s}'"))?;
    if lo > hi {
        return Err(format!("empty range '{s}'"));
    }
    Ok((lo, hi))
}

enum Failure {
    Usage(String),
    Data(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Invariant(v) => Failure::Invariant(v.to_string()),
            EvalError::QueryLength { .. } => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Corpus, Failure> {
    let (corpus, report, warnings) = corpus::load(path)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let r = &report.reduction;
    if r.replaced > 0 {
        eprintln!(
            "note: reduced {} of {} slices ({:.2}%) to three interval classes",
            r.replaced,
            r.total_slices,
            100.0 * r.replaced_fraction()
        );
    }
    for (piece, index) in &r.fallbacks {
        eprintln!("warning: piece {piece} slice {index}: no attested subset, kept the three lowest interval classes");
    }
    for p in &report.nominal_pieces {
        eprintln!("note: piece {p} has no performance data; using 100 BPM onsets");
    }
    Ok(corpus)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Data(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Data(format!("cannot write output: {e}")))
        }
    }
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn cmd_expand(args: &IoArgs) -> Result<(), Failure> {
    let corpus = load(&args.input)?;
    let mut s = String::from("piece_id,index,onset_score,onset_perf,timing,pitches,bass,top\n");
    for p in &corpus.pieces {
        let timing = match p.timing {
            Timing::Performed => "performed",
            Timing::Nominal => "nominal",
        };
        for sl in &p.slices {
            let pitches: Vec<String> = sl.pitches().iter().map(|x| x.to_string()).collect();
            let perf = sl
                .onset_perf
                .map(|x| x.to_string())
                .unwrap_or_else(|| "NA".into());
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                p.id,
                sl.index,
                sl.onset_score,
                perf,
                timing,
                pitches.join(" "),
                sl.bass(),
                sl.top()
            );
        }
    }
    emit(args.output.as_deref(), &s)
}

fn cmd_encode(args: &IoArgs) -> Result<(), Failure> {
    let corpus = load(&args.input)?;
    let mut s = String::from("piece_id,index,incoming,chord,reduced\n");
    for p in &corpus.pieces {
        for (sl, v) in p.slices.iter().zip(p.encode()) {
            let incoming = v
                .incoming()
                .map(|i| i.to_string())
                .unwrap_or_else(|| "NA".into());
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                p.id,
                sl.index,
                incoming,
                csv_quote(&v.chord_text()),
                sl.is_reduced()
            );
        }
    }
    emit(args.output.as_deref(), &s)
}

fn filter_kind(f: Filter, min_count: f64) -> FilterKind {
    match f {
        Filter::None => FilterKind::None,
        Filter::Freq => FilterKind::Frequency(min_count),
        Filter::Harmony => FilterKind::Harmony,
        Filter::Both => FilterKind::Both(min_count),
    }
}

fn dump_tokens(
    corpus: &Corpus,
    config: &PipelineConfig,
    opts: &PipelineOptions,
    path: &Path,
) -> Result<(), Failure> {
    let weigher = Weigher::new(opts.weight_params);
    let skip = config.skip.skip_config(opts.n, opts.budget);
    let mut s = String::from("piece_id\tindices\ttype\tweight\n");
    for piece in &corpus.pieces {
        let enc = EncodedPiece::new(piece);
        enc.for_each_tuple(&skip, |idx| {
            let w = match &enc.onsets_perf {
                Some(o) if config.weight.needs_onsets() => {
                    let on: Vec<f64> = idx.iter().map(|&i| o[i]).collect();
                    weigher.weigh(config.weight, &on).value
                }
                _ => 1.0,
            };
            s.push_str(&dump_line(&enc.id, idx, &enc.type_key(idx), w));
            s.push('\n');
        })
        .map_err(EvalError::from)?;
    }
    emit(Some(path), &s)
}

fn cmd_mine(args: &MineArgs) -> Result<(), Failure> {
    let corpus = load(&args.input)?;
    let opts = args.pipeline.options();
    let config = PipelineConfig {
        skip: args.skip,
        weight: args.weight,
        filter: filter_kind(args.filter, args.pipeline.min_count),
        rank: args.rank,
    };
    if let Some(path) = &args.dump_tokens {
        dump_tokens(&corpus, &config, &opts, path)?;
    }
    let res = evaluation::run_config(&corpus, &config, &opts, args.query.as_ref())?;
    if res.degenerate_weights > 0 {
        eprintln!(
            "note: {} tokens had no usable period and received the fallback weight",
            res.degenerate_weights
        );
    }
    let s = res.to_csv(args.query.as_ref());
    emit(args.output.as_deref(), &s)
}

fn cmd_grid(args: &GridArgs) -> Result<(), Failure> {
    if args
        .variable_levels
        .iter()
        .any(|w| !(w.is_finite() && *w > 0.0))
    {
        return Err(Failure::Usage("variable levels must be positive".into()));
    }
    let corpus = load(&args.input)?;
    let opts = args.pipeline.options();
    let spec = GridSpec {
        variable_levels: args.variable_levels.clone(),
        ..GridSpec::with_min_count(args.pipeline.min_count)
    };
    let grid = evaluation::run_grid(&corpus, &spec, &opts, &args.query, args.jobs)?;
    for (level, w, k) in &grid.degenerate_weights {
        if *k > 0 {
            eprintln!("note: {level} {w}: {k} tokens received the fallback weight");
        }
    }
    emit(args.output.as_deref(), &evaluation::grid_csv(&grid))?;
    if let Some(p) = &args.summary {
        let rows = evaluation::summarize(&grid, args.comparisons);
        emit(Some(p), &evaluation::summary_csv(&rows))?;
    }
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<(), Failure> {
    let spec = SynthSpec {
        pieces: args.pieces,
        length: args.length,
        vocabulary: args.vocabulary,
        zipf: args.zipf,
        rate: args.rate,
        instances: args.instances,
        gaps: args.gaps,
        tempo: (args.tempo.0 as f64, args.tempo.1 as f64),
        ..SynthSpec::new(args.pattern.clone(), args.seed)
    };
    let out = generate_synthetic_corpus(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
    emit(args.output.as_deref(), &out.text)?;
    if let Some(p) = &args.manifest {
        emit(Some(p), &out.manifest_tsv())?;
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Failure::Data(format!("cannot read {}: {e}", args.input.display())))?;
    let grid = evaluation::parse_grid_csv(&text, DEFAULT_MIN_COUNT)?;
    emit(
        args.output.as_deref(),
        &evaluation::levels_csv(&evaluation::level_mrrs(&grid)),
    )?;
    if let Some(p) = &args.summary {
        let rows = evaluation::summarize(&grid, args.comparisons);
        emit(Some(p), &evaluation::summary_csv(&rows))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let res = match &cli.command {
        Command::Expand(a) => cmd_expand(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Mine(a) => cmd_mine(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Report(a) => cmd_report(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
