//! Command-line entry point.
//!
//! Exit status: 0 on success, 1 on runtime or data errors, 2 on usage errors.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::eval::{
    dictionary_size_sweep, segment_correlation, system_correlation, w2w_triples, w2w_statistic, CorrelationReport,
    EvaluationRecord, Level, Statistic, SweepSetup, DEFAULT_SWEEP_SEED,
};
use crate::io::{self, Format, ReadOptions, ScoreFileMeta};
use crate::lm::{self, NgramLm};
use crate::metrics::{
    record_key, score_batch, ExternalSentenceVectors, LmSource, MetricConfig, RemapStage, Scorer, SentenceSource,
    DEFAULT_LM_WEIGHT,
};
use crate::remap::{fit_pipeline, resolve_pairs, FitOptions, LexiconKind, PipelineSpec};
use crate::vecspace::{compute_idf, EmbeddingSpace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "reffree", version, about = "Reference-free machine translation evaluation")]
pub struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a re-mapping pipeline on a bilingual lexicon.
    RemapFit(RemapFitArgs),
    /// Score every segment of a dataset.
    Score(ScoreArgs),
    /// Correlate score files with human judgments.
    Evaluate(EvaluateArgs),
    /// Measure how often a metric prefers word-by-word translations.
    W2w(W2wArgs),
    /// Correlation as a function of lexicon size.
    Sweep(SweepArgs),
    /// Train an n-gram language model.
    LmTrain(LmTrainArgs),
    /// Score sentences with a trained language model.
    LmScore(LmScoreArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Mover,
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SentenceArg {
    Pooled,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StageArg {
    Tokens,
    Grams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Tsv,
    Structured,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Tsv => Format::Tsv,
            FormatArg::Structured => Format::Structured,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Segment,
    System,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    Pearson,
    Kendall,
    Both,
}

fn parse_pipeline(s: &str) -> Result<PipelineSpec, String> {
    s.parse::<PipelineSpec>().map_err(|e| e.to_string())
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("λ must be a finite number ≥ 0, got {s:?}")),
    }
}

fn parse_order(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if (1..=8).contains(&v) => Ok(v),
        _ => Err(format!("order must be an integer in 1..=8, got {s:?}")),
    }
}

fn parse_workers(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("worker count must be a positive integer, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Source-language word vectors (`<count> <dim>` header).
    #[arg(long)]
    pub src_emb: PathBuf,
    /// Target-language word vectors.
    #[arg(long)]
    pub tgt_emb: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long, value_enum, default_value_t = MetricArg::Mover)]
    pub metric: MetricArg,
    /// N-gram order for mover scoring.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub ngram: u8,
    /// Fitted transform file from `remap-fit`.
    #[arg(long)]
    pub transform: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StageArg::Tokens)]
    pub remap_stage: StageArg,
    /// Sentence vectors for cosine scoring.
    #[arg(long, value_enum, default_value_t = SentenceArg::Pooled)]
    pub sentence_vectors: SentenceArg,
    /// External source sentence vectors, keyed by segment id.
    #[arg(long, requires = "hyp_vectors")]
    pub src_vectors: Option<PathBuf>,
    /// External hypothesis sentence vectors, keyed by `<system>:<segment>`.
    #[arg(long, requires = "src_vectors")]
    pub hyp_vectors: Option<PathBuf>,
    /// Trained language model for fluency fusion.
    #[arg(long, conflicts_with = "lm_scores")]
    pub lm: Option<PathBuf>,
    /// Precomputed fluency scores, `<key>\t<score>` per line.
    #[arg(long)]
    pub lm_scores: Option<PathBuf>,
    /// Weight of the language-model term.
    #[arg(long, default_value_t = DEFAULT_LM_WEIGHT, value_parser = parse_lambda)]
    pub lambda: f64,
    /// Keep case when tokenizing.
    #[arg(long)]
    pub keep_case: bool,
}

#[derive(Debug, Args)]
pub struct RemapFitArgs {
    #[command(flatten)]
    pub spaces: SpaceArgs,
    /// `<src>\t<tgt>` word pairs.
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Steps joined by '.', leftmost applied last: `clp`, `umd`, `clp.umd`.
    #[arg(long, value_parser = parse_pipeline)]
    pub pipeline: PipelineSpec,
    /// Length-normalize lexicon vectors before fitting.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[command(flatten)]
    pub spaces: SpaceArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long, default_value_t = 1, value_parser = parse_workers)]
    pub workers: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset with human scores; repeat once per language pair.
    #[arg(long, required = true)]
    pub dataset: Vec<PathBuf>,
    /// Score file for the dataset at the same position.
    #[arg(long, required = true)]
    pub scores: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = LevelArg::Segment)]
    pub level: LevelArg,
    #[arg(long, value_enum, default_value_t = StatisticArg::Pearson)]
    pub statistic: StatisticArg,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct W2wArgs {
    /// Dataset with `w2w` and `reference` columns; repeatable.
    #[arg(long, required = true)]
    pub dataset: Vec<PathBuf>,
    #[command(flatten)]
    pub spaces: SpaceArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[command(flatten)]
    pub spaces: SpaceArgs,
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long, value_parser = parse_pipeline, default_value = "clp")]
    pub pipeline: PipelineSpec,
    /// Lexicon sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_enum, default_value_t = StatisticArg::Pearson)]
    pub statistic: StatisticArg,
    #[arg(long, default_value_t = DEFAULT_SWEEP_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long, default_value_t = 1, value_parser = parse_workers)]
    pub workers: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct LmTrainArgs {
    /// One tokenized sentence per line.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = lm::DEFAULT_ORDER, value_parser = parse_order)]
    pub order: usize,
    #[arg(long, default_value_t = lm::DEFAULT_DISCOUNT)]
    pub discount: f64,
    #[arg(long)]
    pub keep_case: bool,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct LmScoreArgs {
    #[arg(long)]
    pub lm: PathBuf,
    /// Score dataset hypotheses, keyed `<system>:<segment>`.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub dataset: Option<PathBuf>,
    /// Score one sentence per line, keyed by line number.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub keep_case: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Parses `args` and runs; returns the process exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    match run(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    }
}

pub fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::RemapFit(a) => remap_fit(a),
        Command::Score(a) => score(a),
        Command::Evaluate(a) => evaluate(a),
        Command::W2w(a) => w2w(a),
        Command::Sweep(a) => sweep(a),
        Command::LmTrain(a) => lm_train(a),
        Command::LmScore(a) => lm_score(a),
    }
}

fn require_files<'a>(paths: impl IntoIterator<Item = &'a Path>) -> anyhow::Result<()> {
    for p in paths {
        if !p.is_file() {
            bail!("{}: no such file", p.display());
        }
    }
    Ok(())
}

impl MetricArgs {
    fn inputs(&self) -> Vec<&Path> {
        [&self.transform, &self.src_vectors, &self.hyp_vectors, &self.lm, &self.lm_scores]
            .into_iter()
            .flatten()
            .map(PathBuf::as_path)
            .collect()
    }

    fn read_options(&self) -> ReadOptions {
        ReadOptions {
            lowercase: !self.keep_case,
        }
    }

    fn config(&self) -> anyhow::Result<MetricConfig> {
        let mut config = match self.metric {
            MetricArg::Mover => MetricConfig::mover(self.ngram as usize),
            MetricArg::Cosine => MetricConfig::cosine(match self.sentence_vectors {
                SentenceArg::Pooled => SentenceSource::Pooled,
                SentenceArg::External => SentenceSource::ExternalFile,
            }),
        };
        config = config.with_lm_weight(self.lambda).with_remap_stage(match self.remap_stage {
            StageArg::Tokens => RemapStage::Tokens,
            StageArg::Grams => RemapStage::Grams,
        });
        if let Some(p) = &self.transform {
            config = config.with_pipeline(io::read_transform(p)?);
        }
        if let Some(p) = &self.lm {
            config = config.with_lm(LmSource::Internal(Arc::new(io::read_lm(p)?)));
        }
        if let Some(p) = &self.lm_scores {
            config = config.with_lm(LmSource::External(Arc::new(io::load_external_lm_scores(p)?)));
        }
        Ok(config)
    }

    fn external_vectors(&self) -> anyhow::Result<Option<ExternalSentenceVectors>> {
        match (&self.src_vectors, &self.hyp_vectors) {
            (Some(s), Some(h)) => Ok(Some(ExternalSentenceVectors {
                source: io::read_sentence_vectors(s)?,
                hypothesis: io::read_sentence_vectors(h)?,
            })),
            _ if self.sentence_vectors == SentenceArg::External => {
                bail!("--sentence-vectors external needs --src-vectors and --hyp-vectors")
            }
            _ => Ok(None),
        }
    }
}

/// Loads both spaces; source IDF comes from the unique source sentences,
/// target IDF from `target_docs`.
fn load_spaces(
    spaces: &SpaceArgs,
    records: &[EvaluationRecord],
    target_docs: &[Vec<String>],
) -> anyhow::Result<(EmbeddingSpace, EmbeddingSpace)> {
    let src = io::load_embedding_space(&spaces.src_emb, None)?;
    let tgt = io::load_embedding_space(&spaces.tgt_emb, Some(src.dim()))?;
    let mut seen = HashSet::new();
    let source_docs: Vec<Vec<String>> = records
        .iter()
        .filter(|r| seen.insert(r.segment_id.as_str()))
        .map(|r| r.source.clone())
        .collect();
    let (src, tgt) = if source_docs.is_empty() {
        (src, tgt)
    } else {
        (src.with_idf(compute_idf(&source_docs)?), tgt.with_idf(compute_idf(target_docs)?))
    };
    Ok((src, tgt))
}

fn hypotheses(records: &[EvaluationRecord]) -> Vec<Vec<String>> {
    records.iter().map(|r| r.hypothesis.clone()).collect()
}

/// Writes to `path` or stdout. Summaries go to stdout when the payload is
/// in a file and to stderr otherwise.
fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("{}: cannot write", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn summary(to_file: bool, line: &str) {
    if to_file {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn statistics(arg: StatisticArg) -> Vec<Statistic> {
    match arg {
        StatisticArg::Pearson => vec![Statistic::Pearson],
        StatisticArg::Kendall => vec![Statistic::Kendall],
        StatisticArg::Both => vec![Statistic::Pearson, Statistic::Kendall],
    }
}

fn remap_fit(a: RemapFitArgs) -> anyhow::Result<()> {
    require_files([a.spaces.src_emb.as_path(), a.spaces.tgt_emb.as_path(), a.lexicon.as_path()])?;
    let src = io::load_embedding_space(&a.spaces.src_emb, None)?;
    let tgt = io::load_embedding_space(&a.spaces.tgt_emb, Some(src.dim()))?;
    let lex = io::read_lexicon(&a.lexicon, LexiconKind::Word)?;
    let options = FitOptions { normalize: a.normalize };
    let pairs = resolve_pairs(&lex.lexicon, &src, &tgt, options)?;
    let pipeline = fit_pipeline(&a.pipeline, &lex.lexicon, &src, &tgt, options)?;
    io::write_transform(&pipeline, &a.output)?;
    println!(
        "fitted {} on {} pairs ({} unresolved, {} lines skipped)",
        pipeline.name(),
        pairs.len(),
        pairs.skipped,
        lex.skipped
    );
    println!("residual before: {}", io::fmt_sig6(pairs.residual()));
    println!("residual after: {}", io::fmt_sig6(pairs.residual_after(&pipeline)?));
    Ok(())
}

fn score(a: ScoreArgs) -> anyhow::Result<()> {
    let mut inputs = vec![a.dataset.as_path(), a.spaces.src_emb.as_path(), a.spaces.tgt_emb.as_path()];
    inputs.extend(a.metric.inputs());
    require_files(inputs)?;
    let table = io::read_dataset_with(&a.dataset, a.metric.read_options())?;
    let (src, tgt) = load_spaces(&a.spaces, &table.records, &hypotheses(&table.records))?;
    let config = a.metric.config()?;
    let external = a.metric.external_vectors()?;
    let mut scorer = Scorer::new(&src, &tgt, &config)?;
    if let Some(ext) = &external {
        scorer = scorer.with_external_vectors(ext);
    }
    let scores = score_batch(&table.records, &scorer, a.workers);
    let meta = ScoreFileMeta {
        metric: config.name(),
        lm_weight: config.lm_weight,
    };
    emit(a.output.as_deref(), &io::scores_to_string(&scores, &meta, a.format.into()))?;
    let unscorable = scores.iter().filter(|s| s.similarity().is_none()).count();
    summary(
        a.output.is_some(),
        &format!(
            "{}: {} scorable, {unscorable} unscorable",
            config.name(),
            scores.len() - unscorable
        ),
    );
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> anyhow::Result<()> {
    if a.dataset.len() != a.scores.len() {
        bail!(
            "{} --dataset files but {} --scores files; pass them in matching order",
            a.dataset.len(),
            a.scores.len()
        );
    }
    require_files(a.dataset.iter().chain(&a.scores).map(PathBuf::as_path))?;
    let mut inputs = Vec::new();
    for (d, s) in a.dataset.iter().zip(&a.scores) {
        let table = io::read_dataset(d)?;
        let (scores, _) = io::read_scores(s)?;
        inputs.push((table, scores));
    }
    let levels = match a.level {
        LevelArg::Segment => vec![Level::Segment],
        LevelArg::System => vec![Level::System],
        LevelArg::Both => vec![Level::Segment, Level::System],
    };
    let mut reports = Vec::new();
    for level in levels {
        for statistic in statistics(a.statistic) {
            let mut report = CorrelationReport::new(level, statistic);
            for (table, scores) in &inputs {
                let c = match level {
                    Level::Segment => segment_correlation(scores, &table.records, statistic),
                    Level::System => system_correlation(scores, &table.records, statistic),
                }
                .with_context(|| format!("{} ({level}, {statistic})", table.language_pair))?;
                report.push(table.language_pair.clone(), c);
            }
            reports.push(report);
        }
    }
    emit(a.output.as_deref(), &io::correlation_reports_to_string(&reports, a.format.into()))
}

fn w2w(a: W2wArgs) -> anyhow::Result<()> {
    let mut inputs: Vec<&Path> = a.dataset.iter().map(PathBuf::as_path).collect();
    inputs.extend([a.spaces.src_emb.as_path(), a.spaces.tgt_emb.as_path()]);
    inputs.extend(a.metric.inputs());
    require_files(inputs)?;
    if a.metric.lm_scores.is_some() || a.metric.sentence_vectors == SentenceArg::External {
        bail!("w2w scores constructed variants; precomputed per-segment inputs cannot cover them");
    }
    let config = a.metric.config()?;
    let mut rows = Vec::new();
    for path in &a.dataset {
        let table = io::read_dataset_with(path, a.metric.read_options())?;
        let triples = w2w_triples(&table.records);
        if triples.is_empty() {
            bail!("{}: no rows carry both w2w and reference columns", path.display());
        }
        let targets: Vec<Vec<String>> = triples
            .iter()
            .flat_map(|t| [t.literal.clone(), t.reference.clone()])
            .collect();
        let (src, tgt) = load_spaces(&a.spaces, &table.records, &targets)?;
        let scorer = Scorer::new(&src, &tgt, &config)?;
        let result = w2w_statistic(&scorer, &triples).with_context(|| table.language_pair.clone())?;
        rows.push((table.language_pair.clone(), result));
    }
    emit(a.output.as_deref(), &io::w2w_to_string(&rows, &config.name(), a.format.into()))
}

fn sweep(a: SweepArgs) -> anyhow::Result<()> {
    let mut inputs = vec![
        a.dataset.as_path(),
        a.spaces.src_emb.as_path(),
        a.spaces.tgt_emb.as_path(),
        a.lexicon.as_path(),
    ];
    inputs.extend(a.metric.inputs());
    require_files(inputs)?;
    if a.metric.transform.is_some() {
        bail!("sweep fits its own transform at every size; drop --transform");
    }
    let statistic = match a.statistic {
        StatisticArg::Pearson => Statistic::Pearson,
        StatisticArg::Kendall => Statistic::Kendall,
        StatisticArg::Both => bail!("sweep takes a single statistic"),
    };
    let table = io::read_dataset_with(&a.dataset, a.metric.read_options())?;
    let (src, tgt) = load_spaces(&a.spaces, &table.records, &hypotheses(&table.records))?;
    let lex = io::read_lexicon(&a.lexicon, LexiconKind::Word)?;
    let config = a.metric.config()?;
    let external = a.metric.external_vectors()?;
    let setup = SweepSetup {
        lexicon: &lex.lexicon,
        src: &src,
        tgt: &tgt,
        records: &table.records,
        config: &config,
        pipeline: &a.pipeline,
        fit: FitOptions { normalize: a.normalize },
        statistic,
        seed: a.seed,
        workers: a.workers,
        external: external.as_ref(),
    };
    let points = dictionary_size_sweep(&a.sizes, &setup)?;
    emit(a.output.as_deref(), &io::sweep_to_string(&points, a.format.into()))
}

fn read_corpus(path: &Path, lowercase: bool) -> anyhow::Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))?;
    Ok(text
        .lines()
        .map(|l| crate::vecspace::tokenize(l, lowercase))
        .filter(|t| !t.is_empty())
        .collect())
}

fn lm_train(a: LmTrainArgs) -> anyhow::Result<()> {
    require_files([a.corpus.as_path()])?;
    let corpus = read_corpus(&a.corpus, !a.keep_case)?;
    if corpus.is_empty() {
        bail!("{}: corpus has no sentences", a.corpus.display());
    }
    let held_out = corpus.len() / 10;
    let split = corpus.len() - held_out;
    let (train, test) = corpus.split_at(split);
    let model = lm::train_lm(train, a.order, a.discount)?;
    io::write_lm(&model, &a.output)?;
    println!(
        "trained order-{} model on {} sentences ({} types)",
        model.order(),
        train.len(),
        model.vocab_size()
    );
    println!("train perplexity: {}", io::fmt_sig6(lm::perplexity(&model, train)));
    if test.is_empty() {
        println!("held-out perplexity: n/a (fewer than 10 sentences)");
    } else {
        println!(
            "held-out perplexity: {} ({} sentences)",
            io::fmt_sig6(lm::perplexity(&model, test)),
            test.len()
        );
    }
    Ok(())
}

fn lm_score(a: LmScoreArgs) -> anyhow::Result<()> {
    let input = a.dataset.as_ref().or(a.input.as_ref()).ok_or_else(|| anyhow!("no input"))?;
    require_files([a.lm.as_path(), input.as_path()])?;
    let model: NgramLm = io::read_lm(&a.lm)?;
    let mut scores = Vec::new();
    if let Some(d) = &a.dataset {
        let table = io::read_dataset_with(d, ReadOptions { lowercase: !a.keep_case })?;
        for r in &table.records {
            let s = lm::score_sentence(&model, &r.hypothesis).avg_log_prob;
            scores.push((record_key(&r.system_id, &r.segment_id), s));
        }
    } else {
        let text = fs::read_to_string(input).with_context(|| format!("{}: cannot read", input.display()))?;
        for (i, line) in text.lines().enumerate() {
            let toks = crate::vecspace::tokenize(line, !a.keep_case);
            scores.push(((i + 1).to_string(), lm::score_sentence(&model, &toks).avg_log_prob));
        }
    }
    let text = io::lm_scores_to_string(&scores);
    emit(a.output.as_deref(), &text)?;
    summary(a.output.is_some(), &format!("scored {} sentences", scores.len()));
    Ok(())
}
