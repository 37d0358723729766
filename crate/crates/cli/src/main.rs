//! `emolex`: staged pipelines for building and evaluating emoji sentiment lexica.
//!
//! Every stage reads and writes plain files so each step can be inspected.

mod commands;
mod error;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Failure;

#[derive(Parser, Debug)]
#[command(name = "emolex", version, about = "Build and evaluate emoji sentiment lexica")]
struct Cli {
    /// Worker threads for document-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize a corpus and list its emoji occurrences.
    Normalize(NormalizeArgs),
    /// Collect emoji description pages, fixture store first.
    FetchDescriptions(FetchArgs),
    /// Score descriptions and build the description lexicon.
    BuildDescLexicon(BuildDescArgs),
    /// Score parsed documents.
    Score(ScoreArgs),
    /// Build one of the lexicon variants E1, E2, E3.
    Variant(VariantArgs),
    /// Build a ranking from a labelled raw corpus.
    Rank(RankArgs),
    /// Accuracy and macro metrics of predicted labels against gold labels.
    Eval(EvalArgs),
    /// Score and rank correlation between two emoji lexica.
    Correlate(CorrelateArgs),
    /// Import a public reference ranking into the native schema.
    ImportReference(ImportArgs),
}

/// Lexica and propagation settings shared by the scoring commands.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Word polarity lexicon (`lemma<TAB>pos<TAB>polarity`); bundled demo lexicon when absent.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Shifter inventory (`lemma<TAB>role[<TAB>strength]`); bundled inventory when absent.
    #[arg(long)]
    shifters: Option<PathBuf>,
    /// Propagation settings as `key = value` lines; flags below take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    negation_shift: Option<f64>,
    #[arg(long)]
    adversative_amplify: Option<f64>,
    #[arg(long)]
    neutral_band: Option<f64>,
    #[arg(long)]
    emoji_scale: Option<f64>,
    /// `mean` or `sum` of sentence scores.
    #[arg(long)]
    doc_aggregation: Option<String>,
}

#[derive(Args, Debug)]
struct NormalizeArgs {
    /// Corpus as `id<TAB>label<TAB>text` (label may be empty).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Sidecar of emoji occurrences: `id<TAB>char_offset<TAB>length<TAB>codepoints`.
    #[arg(long)]
    emojis: PathBuf,
}

#[derive(Args, Debug)]
struct FetchArgs {
    /// One emoji key per line (`U+1F602`, `U+2764 U+FE0F` or the emoji itself).
    #[arg(long)]
    emojis: PathBuf,
    #[arg(long)]
    fixtures: PathBuf,
    /// Fetch pages missing from the fixture store.
    #[arg(long, conflicts_with = "offline")]
    online: bool,
    /// Use the fixture store only (the default).
    #[arg(long)]
    offline: bool,
    /// Spacing between requests in milliseconds.
    #[arg(long, default_value_t = 1000)]
    delay_ms: u64,
    /// Site root; overrides the environment variable.
    #[arg(long)]
    base_url: Option<String>,
    /// Keep only the first paragraph of each description.
    #[arg(long)]
    first_paragraph_only: bool,
    /// Output `key<TAB>short_name<TAB>text`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BuildDescArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Output of `fetch-descriptions`.
    #[arg(long)]
    descriptions: PathBuf,
    /// CoNLL-U parses of the normalized descriptions, one document per emoji key.
    #[arg(long, required_unless_present = "plain_heuristic")]
    parses: Option<PathBuf>,
    /// Degraded mode: flat trees built without a parser.
    #[arg(long, conflicts_with = "parses")]
    plain_heuristic: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum Variant {
    A1,
    A4,
    E1,
    E2,
    E3,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// CoNLL-U parses of the normalized corpus.
    #[arg(long)]
    parses: PathBuf,
    /// A1 ignores emoji polarity; the others need `--emoji-lexicon`.
    #[arg(long, value_enum)]
    variant: Variant,
    #[arg(long)]
    emoji_lexicon: Option<PathBuf>,
    /// Output `id<TAB>score<TAB>label`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum VariantKind {
    E1,
    E2,
    E3,
}

#[derive(Args, Debug)]
struct VariantArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum)]
    kind: VariantKind,
    /// CoNLL-U parses of the normalized corpus.
    #[arg(long)]
    parses: PathBuf,
    /// Description lexicon (needed by E2 and E3).
    #[arg(long)]
    desc_lexicon: Option<PathBuf>,
    /// Precomputed E2 lexicon for E3; computed from the corpus when absent.
    #[arg(long)]
    e2_lexicon: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RankArgs {
    /// Labelled corpus as `id<TAB>label<TAB>text`.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "annotated")]
    name: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Output of `score`.
    #[arg(long)]
    pred: PathBuf,
    /// Corpus with gold labels.
    #[arg(long)]
    gold: PathBuf,
    /// Also write the report as `key=value` lines.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CorrelateArgs {
    #[arg(long)]
    a: PathBuf,
    /// Lexicon whose most frequent emojis are compared.
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = 100)]
    top_n: usize,
    /// Scatter data: `key<TAB>score_a<TAB>score_b`.
    #[arg(long)]
    scatter: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ImportArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Normalize(a) => commands::normalize(&a.input, &a.output, &a.emojis),
        Command::FetchDescriptions(a) => commands::fetch_descriptions(&commands::FetchOptions {
            emojis: a.emojis,
            fixtures: a.fixtures,
            online: a.online && !a.offline,
            delay_ms: a.delay_ms,
            base_url: a.base_url,
            first_paragraph_only: a.first_paragraph_only,
            out: a.out,
        }),
        Command::BuildDescLexicon(a) => {
            commands::build_desc_lexicon(&a.model, &a.descriptions, a.parses.as_deref(), a.plain_heuristic, &a.out)
        }
        Command::Score(a) => commands::score(&a.model, &a.parses, a.variant, a.emoji_lexicon.as_deref(), &a.out),
        Command::Variant(a) => commands::variant(
            &a.model,
            a.kind,
            &a.parses,
            a.desc_lexicon.as_deref(),
            a.e2_lexicon.as_deref(),
            &a.out,
        ),
        Command::Rank(a) => commands::rank(&a.corpus, &a.name, &a.out),
        Command::Eval(a) => commands::eval(&a.pred, &a.gold, a.out.as_deref()),
        Command::Correlate(a) => commands::correlate(&a.a, &a.b, a.top_n, a.scatter.as_deref(), a.out.as_deref()),
        Command::ImportReference(a) => commands::import_reference(&a.input, &a.out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("emolex: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
