//! Thin CLI over the library: each subcommand parses arguments, loads the
//! stage inputs, calls the corresponding library functions, and writes the
//! stage output files. Exit codes: 0 success, 1 runtime failure, 2 bad
//! input or configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};

use embevent::baselines::{swe_rankings, tfidf_rankings, tfidf_scores, SweParams};
use embevent::corpus::{
    bucket_documents, build_vocabulary, read_corpus, read_documents_jsonl, read_tf_table,
    write_manifest, write_tf_table, TimeBucketedCorpus,
};
use embevent::embeddings::{
    build_unit_series, load_embedding_file, read_series_csv, write_series_csv,
};
use embevent::error::{Error, Result};
use embevent::eval::{evaluate, generate_ground_truth, read_truth_tsv, write_report_json};
use embevent::event::{assemble_events, read_events_json, write_events_json};
use embevent::interval::{
    detect_all_dimensions, group_by_dim, read_intervals_json, write_intervals_json,
};
use embevent::pipeline::{
    default_origin, run_pipeline, write_synthetic, PipelineConfig, PipelineInputs,
};
use embevent::randomness::test_by_name;
use embevent::scoring::{
    dimension_deviation, rank_all_units, read_rankings_tsv, write_rankings_tsv,
};

#[derive(Parser)]
#[command(name = "embevent", version, about = "Durative event detection over embedding time series")]
struct Cli {
    /// Flat key=value config file; CLI flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bucket JSONL documents into time units; writes manifest.json + tf.tsv.
    Ingest(IngestArgs),
    /// Build the unit-vector series from a corpus and a vector table.
    Embed(EmbedArgs),
    /// Detect abnormal intervals in every dimension of a series.
    Detect(DetectArgs),
    /// Fold per-dimension intervals into multi-dimension events.
    Events(EventsArgs),
    /// Rank words per time unit from detected events.
    Score(ScoreArgs),
    /// Baseline rankings.
    #[command(subcommand)]
    Baseline(BaselineCommand),
    /// Recall@K of a rankings file against ground truth.
    Eval(EvalArgs),
    /// Generate the bundled synthetic dataset (docs, vectors, news).
    Synth(SynthArgs),
    /// Run every stage end to end.
    Run(RunArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// JSONL documents: {"t": "<RFC3339>", "tokens": [...]}.
    #[arg(long)]
    input: PathBuf,
    /// Bucketing origin (RFC3339); defaults to the earliest timestamp.
    #[arg(long)]
    origin: Option<String>,
    #[arg(long)]
    unit_length: Option<u64>,
    /// Output directory for manifest.json and tf.tsv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// Word-vector table (optional "<count> <dim>" header, then word + components).
    #[arg(long)]
    vectors: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Unit-vector series CSV.
    #[arg(long)]
    series: PathBuf,
    #[arg(long)]
    kmin: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    test: Option<String>,
    #[arg(long)]
    min_context: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EventsArgs {
    #[arg(long)]
    intervals: PathBuf,
    /// Series CSV, read for the unit count and dimension.
    #[arg(long)]
    series: PathBuf,
    #[arg(long)]
    event_kmin: Option<usize>,
    #[arg(long)]
    cmin: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    events: PathBuf,
    #[arg(long)]
    series: PathBuf,
    #[arg(long)]
    vectors: PathBuf,
    /// TF table, used to rebuild the vocabulary.
    #[arg(long)]
    corpus: PathBuf,
    /// Rows per unit in the output.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    score_scope: Option<String>,
    #[arg(long)]
    min_count: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum BaselineCommand {
    /// Per-unit tf-idf ranking.
    Tfidf(BaselineArgs),
    /// Shannon-wavelet-entropy increase ranking.
    Swe(SweArgs),
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    min_count: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Trailing window length h.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    min_count: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Rankings TSV produced by score or baseline.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth TSV (unit \t word).
    #[arg(long, conflicts_with = "news")]
    truth: Option<PathBuf>,
    /// Alternatively: a news TF table to generate ground truth from.
    #[arg(long)]
    news: Option<PathBuf>,
    #[arg(long)]
    truth_top_k: Option<usize>,
    /// Comma-separated K grid, e.g. 20,50,100,200.
    #[arg(long)]
    k: Option<String>,
    #[arg(long, default_value = "event")]
    method: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    docs: PathBuf,
    #[arg(long)]
    vectors: PathBuf,
    #[arg(long)]
    news: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn load_config(path: &Option<PathBuf>) -> Result<PipelineConfig> {
    let mut config = PipelineConfig::default();
    if let Some(path) = path {
        config.apply_file(path)?;
    }
    Ok(config)
}

fn parse_origin(spec: &Option<String>) -> Result<Option<DateTime<Utc>>> {
    match spec {
        None => Ok(None),
        Some(s) => DateTime::parse_from_rfc3339(s)
            .map(|t| Some(t.with_timezone(&Utc)))
            .map_err(|e| Error::InvalidInput(format!("bad --origin {s:?}: {e}"))),
    }
}

fn corpus_from_tf_only(path: &PathBuf, unit_length: u64) -> Result<TimeBucketedCorpus> {
    let units = read_tf_table(path, None)?;
    TimeBucketedCorpus::from_unit_counts(
        chrono::TimeZone::timestamp_opt(&Utc, 0, 0).unwrap(),
        unit_length,
        units,
        0,
    )
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    let mut config = load_config(&cli.config)?;

    match cli.command {
        Command::Ingest(args) => {
            if let Some(u) = args.unit_length {
                config.unit_length_seconds = u;
            }
            let docs = read_documents_jsonl(&args.input)?;
            let origin = match parse_origin(&args.origin)? {
                Some(t) => t,
                None => default_origin(&docs)?,
            };
            let corpus = bucket_documents(docs, origin, config.unit_length_seconds)?;
            std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
            write_manifest(args.out_dir.join("manifest.json"), &corpus)?;
            write_tf_table(args.out_dir.join("tf.tsv"), &corpus)?;
            eprintln!(
                "ingested {} units ({} documents dropped)",
                corpus.n_units(),
                corpus.dropped()
            );
        }
        Command::Embed(args) => {
            let corpus = read_corpus(&args.manifest, &args.corpus)?;
            let table = load_embedding_file(&args.vectors)?;
            let series = build_unit_series(&corpus, &table)?;
            write_series_csv(&args.out, &series)?;
            eprintln!(
                "series: {} units x {} dims ({} words loaded, {} duplicates)",
                series.n_units(),
                series.dim(),
                table.len(),
                table.duplicates()
            );
        }
        Command::Detect(args) => {
            if let Some(v) = args.kmin {
                config.kmin = v;
            }
            if let Some(v) = args.kmax {
                config.kmax = v;
            }
            if let Some(v) = args.delta {
                config.delta = v;
            }
            if let Some(v) = args.test {
                config.test = v;
            }
            if let Some(v) = args.min_context {
                config.min_context = v;
            }
            let series = read_series_csv(&args.series)?;
            let test = test_by_name(&config.test, config.min_context)
                .ok_or_else(|| Error::InvalidInput(format!("unknown normality test {:?}", config.test)))?;
            let intervals = detect_all_dimensions(&series, &config.detector_params(), test.as_ref())?;
            write_intervals_json(&args.out, &intervals)?;
            eprintln!("{} abnormal intervals", intervals.len());
        }
        Command::Events(args) => {
            if let Some(v) = args.event_kmin {
                config.event_kmin = v;
            }
            if let Some(v) = args.cmin {
                config.cmin = v;
            }
            let series = read_series_csv(&args.series)?;
            let intervals = read_intervals_json(&args.intervals)?;
            let sets = group_by_dim(&intervals, series.dim());
            let events = assemble_events(&sets, series.n_units(), &config.assembler_params());
            write_events_json(&args.out, &events)?;
            eprintln!("{} events", events.len());
        }
        Command::Score(args) => {
            if let Some(v) = args.k {
                config.top_k = v;
            }
            if let Some(v) = &args.score_scope {
                config.score_scope = v.parse()?;
            }
            if let Some(v) = args.min_count {
                config.min_count = v;
            }
            let series = read_series_csv(&args.series)?;
            let events = read_events_json(&args.events)?;
            let table = load_embedding_file(&args.vectors)?;
            let corpus = corpus_from_tf_only(&args.corpus, config.unit_length_seconds)?;
            let vocab = build_vocabulary(&corpus, config.min_count)?;
            let deviations = events
                .iter()
                .map(|e| dimension_deviation(&series, e))
                .collect::<Result<Vec<_>>>()?;
            let rankings = rank_all_units(
                &deviations,
                &table,
                &vocab,
                series.n_units(),
                config.score_scope,
            );
            write_rankings_tsv(&args.out, &rankings, config.top_k)?;
            eprintln!("ranked {} units", rankings.len());
        }
        Command::Baseline(BaselineCommand::Tfidf(args)) => {
            if let Some(v) = args.k {
                config.top_k = v;
            }
            if let Some(v) = args.min_count {
                config.min_count = v;
            }
            let corpus = corpus_from_tf_only(&args.corpus, config.unit_length_seconds)?;
            let vocab = build_vocabulary(&corpus, config.min_count)?;
            let table = tfidf_scores(&corpus, &vocab);
            write_rankings_tsv(&args.out, &tfidf_rankings(&table, &vocab), config.top_k)?;
        }
        Command::Baseline(BaselineCommand::Swe(args)) => {
            if let Some(v) = args.k {
                config.top_k = v;
            }
            if let Some(v) = args.window {
                config.swe_window = v;
            }
            if let Some(v) = args.min_count {
                config.min_count = v;
            }
            let corpus = corpus_from_tf_only(&args.corpus, config.unit_length_seconds)?;
            let vocab = build_vocabulary(&corpus, config.min_count)?;
            let table = tfidf_scores(&corpus, &vocab);
            let rankings = swe_rankings(&table, &vocab, &SweParams { window: config.swe_window })?;
            write_rankings_tsv(&args.out, &rankings, config.top_k)?;
        }
        Command::Eval(args) => {
            if let Some(v) = args.truth_top_k {
                config.truth_top_k = v;
            }
            if let Some(grid) = &args.k {
                config.set("k_grid", grid)?;
            }
            let truth = match (&args.truth, &args.news) {
                (Some(path), _) => read_truth_tsv(path)?,
                (None, Some(path)) => {
                    let news = corpus_from_tf_only(path, config.unit_length_seconds)?;
                    generate_ground_truth(&news, config.truth_top_k)?
                }
                (None, None) => {
                    return Err(Error::InvalidInput(
                        "eval needs either --truth or --news".into(),
                    ))
                }
            };
            let rankings = read_rankings_tsv(&args.pred)?;
            let mut report = evaluate(&args.method, &rankings, &truth, &config.k_grid)?;
            report.config = config.to_map();
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            println!("{json}");
            if let Some(out) = &args.out {
                write_report_json(out, &report)?;
            }
        }
        Command::Synth(args) => {
            let seed = args.seed.unwrap_or(config.seed);
            let (docs, vectors, news) = write_synthetic(&args.out_dir, seed)?;
            eprintln!(
                "wrote {}, {}, {}",
                docs.display(),
                vectors.display(),
                news.display()
            );
        }
        Command::Run(args) => {
            let inputs = PipelineInputs {
                docs: args.docs,
                vectors: args.vectors,
                news: args.news,
            };
            let artifacts = run_pipeline(&config, &inputs, &args.out_dir)?;
            let mut listing: BTreeMap<&str, String> = BTreeMap::new();
            listing.insert("series", artifacts.series.display().to_string());
            listing.insert("intervals", artifacts.intervals.display().to_string());
            listing.insert("events", artifacts.events.display().to_string());
            listing.insert("rankings", artifacts.rankings.display().to_string());
            for (stage, path) in listing {
                eprintln!("{stage}: {path}");
            }
            for report in &artifacts.reports {
                eprintln!("report: {}", report.display());
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = real_main() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
