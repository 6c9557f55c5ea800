//! Pipeline orchestration: configuration, the synthetic self-test corpus,
//! and the end-to-end stage runner.
//!
//! Every stage hands off through an immutable file with a documented
//! format, so any stage can be re-run standalone from saved intermediates.
//! Outputs are deterministic given identical inputs, configuration, and
//! seed; on failure, files created by the failed run are removed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{DateTime, TimeZone, Utc};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::baselines::{swe_rankings, tfidf_rankings, tfidf_scores, SweParams};
use crate::corpus::{
    bucket_documents, build_vocabulary, read_documents_jsonl, write_manifest, write_tf_table,
    Document,
};
use crate::embeddings::{build_unit_series, load_embedding_file, write_series_csv, EmbeddingTable};
use crate::error::{Error, Result};
use crate::eval::{evaluate, generate_ground_truth, write_report_json, write_truth_tsv};
use crate::event::{assemble_events, write_events_json, AssemblerParams};
use crate::interval::{detect_all_dimensions, group_by_dim, write_intervals_json, DetectorParams};
use crate::randomness::test_by_name;
use crate::scoring::{dimension_deviation, rank_all_units, write_rankings_tsv, ScoreScope};

/// Every module parameter in one place. Values come from defaults, then an
/// optional `key = value` config file, then CLI flag overrides, in that
/// order.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub unit_length_seconds: u64,
    pub min_count: u64,
    pub kmin: usize,
    pub kmax: usize,
    pub delta: f64,
    pub min_context: usize,
    pub test: String,
    pub event_kmin: usize,
    pub cmin: usize,
    pub score_scope: ScoreScope,
    pub swe_window: usize,
    pub top_k: usize,
    pub truth_top_k: usize,
    pub k_grid: Vec<usize>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            unit_length_seconds: 3600,
            min_count: 500,
            kmin: 5,
            kmax: 25,
            delta: 0.5,
            min_context: 10,
            test: "bartels-rvn".to_string(),
            event_kmin: 3,
            cmin: 2,
            score_scope: ScoreScope::Active,
            swe_window: 32,
            top_k: 100,
            truth_top_k: 20,
            k_grid: vec![20, 50, 100, 150, 200],
            seed: 42,
        }
    }
}

impl PipelineConfig {
    /// Set one configuration key from its string form. Unknown keys and
    /// malformed values are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidInput(format!("bad value for {what}: {value:?}"));
        match key {
            "unit_length_seconds" => {
                self.unit_length_seconds = value.parse().map_err(|_| bad(key))?
            }
            "min_count" => self.min_count = value.parse().map_err(|_| bad(key))?,
            "kmin" => self.kmin = value.parse().map_err(|_| bad(key))?,
            "kmax" => self.kmax = value.parse().map_err(|_| bad(key))?,
            "delta" => self.delta = value.parse().map_err(|_| bad(key))?,
            "min_context" => self.min_context = value.parse().map_err(|_| bad(key))?,
            "test" => self.test = value.to_string(),
            "event_kmin" => self.event_kmin = value.parse().map_err(|_| bad(key))?,
            "cmin" => self.cmin = value.parse().map_err(|_| bad(key))?,
            "score_scope" => self.score_scope = value.parse()?,
            "swe_window" => self.swe_window = value.parse().map_err(|_| bad(key))?,
            "top_k" => self.top_k = value.parse().map_err(|_| bad(key))?,
            "truth_top_k" => self.truth_top_k = value.parse().map_err(|_| bad(key))?,
            "k_grid" => {
                let mut grid = Vec::new();
                for part in value.split(',') {
                    grid.push(part.trim().parse().map_err(|_| bad(key))?);
                }
                if grid.is_empty() {
                    return Err(bad(key));
                }
                self.k_grid = grid;
            }
            "seed" => self.seed = value.parse().map_err(|_| bad(key))?,
            other => {
                return Err(Error::InvalidInput(format!("unknown config key {other:?}")))
            }
        }
        Ok(())
    }

    /// Load overrides from a flat `key = value` file. Lines starting with
    /// `#` and blank lines are ignored.
    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// The effective configuration as strings, for provenance echoes.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("unit_length_seconds".into(), self.unit_length_seconds.to_string());
        m.insert("min_count".into(), self.min_count.to_string());
        m.insert("kmin".into(), self.kmin.to_string());
        m.insert("kmax".into(), self.kmax.to_string());
        m.insert("delta".into(), self.delta.to_string());
        m.insert("min_context".into(), self.min_context.to_string());
        m.insert("test".into(), self.test.clone());
        m.insert("event_kmin".into(), self.event_kmin.to_string());
        m.insert("cmin".into(), self.cmin.to_string());
        m.insert(
            "score_scope".into(),
            match self.score_scope {
                ScoreScope::Active => "active".into(),
                ScoreScope::All => "all".into(),
            },
        );
        m.insert("swe_window".into(), self.swe_window.to_string());
        m.insert("top_k".into(), self.top_k.to_string());
        m.insert("truth_top_k".into(), self.truth_top_k.to_string());
        let mut grid = String::new();
        for (i, k) in self.k_grid.iter().enumerate() {
            if i > 0 {
                grid.push(',');
            }
            let _ = write!(grid, "{k}");
        }
        m.insert("k_grid".into(), grid);
        m.insert("seed".into(), self.seed.to_string());
        m
    }

    pub fn detector_params(&self) -> DetectorParams {
        DetectorParams {
            k_min: self.kmin,
            k_max: self.kmax,
            delta: self.delta,
            min_context: self.min_context,
        }
    }

    pub fn assembler_params(&self) -> AssemblerParams {
        AssemblerParams {
            k_min: self.event_kmin,
            c_min: self.cmin,
        }
    }
}

/// Shape of the bundled synthetic corpus: 50 words over 200 hourly units
/// in 8 embedding dimensions, with 10 burst words whose frequency triples
/// over units 80..=99.
#[derive(Debug, Clone, Copy)]
pub struct SynthSpec {
    pub n_units: usize,
    pub dim: usize,
    pub n_background: usize,
    pub n_burst: usize,
    pub event_start: usize,
    pub event_end: usize,
    pub base_count: u64,
    pub boost: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_units: 200,
            dim: 8,
            n_background: 40,
            n_burst: 10,
            event_start: 80,
            event_end: 99,
            base_count: 4,
            boost: 3,
        }
    }
}

impl SynthSpec {
    pub fn burst_words(&self) -> Vec<String> {
        (0..self.n_burst).map(|i| format!("burst{i:02}")).collect()
    }

    pub fn background_words(&self) -> Vec<String> {
        (0..self.n_background).map(|i| format!("word{i:02}")).collect()
    }

    pub fn origin(&self) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap()
    }
}

/// In-memory synthetic dataset: discussion documents, an embedding table,
/// and reference news documents.
pub struct SynthData {
    pub docs: Vec<Document>,
    pub table: EmbeddingTable,
    pub news: Vec<Document>,
}

/// Generate the synthetic dataset. Token counts are deterministic (burst
/// words triple during the event and nothing else varies), so every
/// baseline unit vector is bit-identical and the planted shift is the only
/// structure. The embeddings are seeded: burst words cluster around one
/// direction, background words are standard normal.
pub fn generate_synthetic(spec: &SynthSpec, seed: u64) -> Result<SynthData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = EmbeddingTable::new(spec.dim);

    // one strong shared direction with alternating signs
    let anchor: Vec<f64> = (0..spec.dim)
        .map(|d| if d % 2 == 0 { 2.5 } else { -2.5 })
        .collect();
    for word in spec.burst_words() {
        let vector: Vec<f64> = anchor
            .iter()
            .map(|a| a + 0.12 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        table.insert(word, vector)?;
    }
    for word in spec.background_words() {
        let vector: Vec<f64> = (0..spec.dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        table.insert(word, vector)?;
    }

    let origin = spec.origin();
    let unit = chrono::Duration::seconds(3600);
    let mut docs = Vec::with_capacity(spec.n_units);
    let mut news = Vec::with_capacity(spec.n_units);
    let background = spec.background_words();
    let bursts = spec.burst_words();
    for u in 0..spec.n_units {
        let in_event = u >= spec.event_start && u <= spec.event_end;
        let mut tokens = Vec::new();
        for word in &bursts {
            let count = if in_event {
                spec.base_count * spec.boost
            } else {
                spec.base_count
            };
            for _ in 0..count {
                tokens.push(word.clone());
            }
        }
        for word in &background {
            for _ in 0..spec.base_count {
                tokens.push(word.clone());
            }
        }
        let timestamp = origin + unit * u as i32 + chrono::Duration::seconds(1800);
        docs.push(Document { timestamp, tokens });

        // reference headlines: burst words make the news during the event,
        // a rotating background word otherwise
        let news_tokens = if in_event {
            bursts.clone()
        } else {
            vec![background[u % background.len()].clone()]
        };
        news.push(Document {
            timestamp,
            tokens: news_tokens,
        });
    }
    Ok(SynthData { docs, table, news })
}

fn write_docs_jsonl(path: &Path, docs: &[Document]) -> Result<()> {
    use std::io::Write;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for doc in docs {
        let tokens = serde_json::to_string(&doc.tokens).expect("tokens serialize");
        writeln!(
            w,
            "{{\"t\":{:?},\"tokens\":{}}}",
            doc.timestamp.to_rfc3339(),
            tokens
        )
        .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_vectors_txt(path: &Path, spec: &SynthSpec, table: &EmbeddingTable) -> Result<()> {
    use std::io::Write;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut words = spec.burst_words();
    words.extend(spec.background_words());
    words.sort();
    writeln!(w, "{} {}", words.len(), spec.dim).map_err(|e| Error::io(path, e))?;
    for word in words {
        let vector = table.get(&word).expect("synth word has a vector");
        let mut line = word;
        for v in vector {
            let _ = write!(line, " {v:.17e}");
        }
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write the synthetic dataset to `dir`: `docs.jsonl`, `vectors.txt`,
/// `news.jsonl`. Returns the three paths.
pub fn write_synthetic(dir: impl AsRef<Path>, seed: u64) -> Result<(PathBuf, PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let spec = SynthSpec::default();
    let data = generate_synthetic(&spec, seed)?;
    let docs_path = dir.join("docs.jsonl");
    let vectors_path = dir.join("vectors.txt");
    let news_path = dir.join("news.jsonl");
    write_docs_jsonl(&docs_path, &data.docs)?;
    write_vectors_txt(&vectors_path, &spec, &data.table)?;
    write_docs_jsonl(&news_path, &data.news)?;
    Ok((docs_path, vectors_path, news_path))
}

/// Paths produced by a full pipeline run.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub manifest: PathBuf,
    pub tf_table: PathBuf,
    pub series: PathBuf,
    pub intervals: PathBuf,
    pub events: PathBuf,
    pub rankings: PathBuf,
    pub baseline_tfidf: PathBuf,
    pub baseline_swe: PathBuf,
    pub truth: Option<PathBuf>,
    pub reports: Vec<PathBuf>,
}

/// Pipeline inputs: the discussion documents, the vector table, and an
/// optional reference (news) document stream for evaluation.
pub struct PipelineInputs {
    pub docs: PathBuf,
    pub vectors: PathBuf,
    pub news: Option<PathBuf>,
}

/// Earliest timestamp of a document batch; the default bucketing origin.
pub fn default_origin(docs: &[Document]) -> Result<DateTime<Utc>> {
    docs.iter()
        .map(|d| d.timestamp)
        .min()
        .ok_or_else(|| Error::InvalidInput("no documents".into()))
}

struct StageTracker {
    created: Vec<PathBuf>,
}

impl StageTracker {
    fn track(&mut self, path: PathBuf) -> PathBuf {
        self.created.push(path.clone());
        path
    }

    fn discard_all(&self) {
        for path in &self.created {
            let _ = std::fs::remove_file(path);
        }
    }
}

/// Run every stage end to end, writing each stage's output under
/// `out_dir`. On failure all files created by this run are removed.
pub fn run_pipeline(
    config: &PipelineConfig,
    inputs: &PipelineInputs,
    out_dir: impl AsRef<Path>,
) -> Result<Artifacts> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut tracker = StageTracker { created: Vec::new() };
    match run_pipeline_inner(config, inputs, out_dir, &mut tracker) {
        Ok(artifacts) => Ok(artifacts),
        Err(e) => {
            tracker.discard_all();
            Err(e)
        }
    }
}

fn run_pipeline_inner(
    config: &PipelineConfig,
    inputs: &PipelineInputs,
    out_dir: &Path,
    tracker: &mut StageTracker,
) -> Result<Artifacts> {
    // ingest
    let docs = read_documents_jsonl(&inputs.docs)?;
    let origin = default_origin(&docs)?;
    let corpus = bucket_documents(docs, origin, config.unit_length_seconds)?;
    let manifest = tracker.track(out_dir.join("manifest.json"));
    let tf_table = tracker.track(out_dir.join("tf.tsv"));
    write_manifest(&manifest, &corpus)?;
    write_tf_table(&tf_table, &corpus)?;

    // embed
    let table = load_embedding_file(&inputs.vectors)?;
    let series = build_unit_series(&corpus, &table)?;
    let series_path = tracker.track(out_dir.join("series.csv"));
    write_series_csv(&series_path, &series)?;

    // detect
    let test = test_by_name(&config.test, config.min_context).ok_or_else(|| {
        Error::InvalidInput(format!("unknown normality test {:?}", config.test))
    })?;
    let intervals = detect_all_dimensions(&series, &config.detector_params(), test.as_ref())?;
    let intervals_path = tracker.track(out_dir.join("intervals.json"));
    write_intervals_json(&intervals_path, &intervals)?;

    // events
    let sets = group_by_dim(&intervals, series.dim());
    let events = assemble_events(&sets, series.n_units(), &config.assembler_params());
    let events_path = tracker.track(out_dir.join("events.json"));
    write_events_json(&events_path, &events)?;

    // score
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
    let rankings_path = tracker.track(out_dir.join("rankings.tsv"));
    write_rankings_tsv(&rankings_path, &rankings, config.top_k)?;

    // baselines
    let tfidf = tfidf_scores(&corpus, &vocab);
    let tfidf_ranked = tfidf_rankings(&tfidf, &vocab);
    let tfidf_path = tracker.track(out_dir.join("baseline_tfidf.tsv"));
    write_rankings_tsv(&tfidf_path, &tfidf_ranked, config.top_k)?;
    let swe_ranked = swe_rankings(&tfidf, &vocab, &SweParams { window: config.swe_window })?;
    let swe_path = tracker.track(out_dir.join("baseline_swe.tsv"));
    write_rankings_tsv(&swe_path, &swe_ranked, config.top_k)?;

    // evaluate, when a reference stream is supplied
    let mut truth_path = None;
    let mut reports = Vec::new();
    if let Some(news) = &inputs.news {
        let news_docs = read_documents_jsonl(news)?;
        let news_corpus = bucket_documents(news_docs, origin, config.unit_length_seconds)?;
        let truth = generate_ground_truth(&news_corpus, config.truth_top_k)?;
        let tp = tracker.track(out_dir.join("truth.tsv"));
        write_truth_tsv(&tp, &truth)?;
        truth_path = Some(tp);

        for (method, ranked) in [
            ("event", &rankings),
            ("tfidf", &tfidf_ranked),
            ("swe", &swe_ranked),
        ] {
            let mut report = evaluate(method, ranked, &truth, &config.k_grid)?;
            report.config = config.to_map();
            let path = tracker.track(out_dir.join(format!("report_{method}.json")));
            write_report_json(&path, &report)?;
            reports.push(path);
        }
    }

    Ok(Artifacts {
        manifest,
        tf_table,
        series: series_path,
        intervals: intervals_path,
        events: events_path,
        rankings: rankings_path,
        baseline_tfidf: tfidf_path,
        baseline_swe: swe_path,
        truth: truth_path,
        reports,
    })
}
