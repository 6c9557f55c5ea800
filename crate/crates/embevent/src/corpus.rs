//! Time-bucketed corpora.
//!
//! Documents are streams of `(timestamp, tokens)` records. Bucketing assigns
//! each document to the time unit `floor((timestamp - origin) / unit_length)`
//! and accumulates per-unit term frequencies. Buckets are half-open
//! `[origin + u*L, origin + (u+1)*L)`, so a document exactly on a boundary
//! belongs to the later unit.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single time-stamped, pre-tokenized document.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub timestamp: DateTime<Utc>,
    pub tokens: Vec<String>,
}

/// Tokens grouped into fixed-length time units with per-unit term counts.
///
/// Tokens are taken verbatim (no case folding or filtering); counts use
/// token multiplicity. Empty intermediate units are materialized so the
/// unit index space is contiguous. The corpus is immutable after
/// construction and freely shareable across threads.
#[derive(Debug, Clone)]
pub struct TimeBucketedCorpus {
    origin: DateTime<Utc>,
    unit_length_secs: u64,
    units: Vec<BTreeMap<String, u64>>,
    dropped: u64,
}

impl TimeBucketedCorpus {
    pub fn origin(&self) -> DateTime<Utc> {
        self.origin
    }

    pub fn unit_length_secs(&self) -> u64 {
        self.unit_length_secs
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    /// Number of documents rejected for falling before the origin.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    /// Term counts of one unit.
    pub fn unit(&self, u: usize) -> &BTreeMap<String, u64> {
        &self.units[u]
    }

    /// Count of `word` in unit `u` (0 if absent).
    pub fn tf(&self, u: usize, word: &str) -> u64 {
        self.units[u].get(word).copied().unwrap_or(0)
    }

    /// Total tokens assigned to unit `u`.
    pub fn unit_total(&self, u: usize) -> u64 {
        self.units[u].values().sum()
    }

    /// Whole-corpus counts per word.
    pub fn total_counts(&self) -> BTreeMap<String, u64> {
        let mut totals = BTreeMap::new();
        for unit in &self.units {
            for (word, count) in unit {
                *totals.entry(word.clone()).or_insert(0) += count;
            }
        }
        totals
    }

    /// Number of units in which `word` occurs at least once.
    pub fn document_frequency(&self, word: &str) -> usize {
        self.units.iter().filter(|u| u.contains_key(word)).count()
    }

    /// Build directly from per-unit term counts (used when reloading a
    /// saved TF table, and by tests).
    pub fn from_unit_counts(
        origin: DateTime<Utc>,
        unit_length_secs: u64,
        units: Vec<BTreeMap<String, u64>>,
        dropped: u64,
    ) -> Result<Self> {
        if unit_length_secs == 0 {
            return Err(Error::InvalidInput("unit length must be positive".into()));
        }
        if units.is_empty() {
            return Err(Error::InvalidInput("corpus must have at least one unit".into()));
        }
        Ok(Self {
            origin,
            unit_length_secs,
            units,
            dropped,
        })
    }
}

/// Words whose whole-corpus count reaches a threshold.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: BTreeSet<String>,
    min_count: u64,
}

impl Vocabulary {
    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(|w| w.as_str())
    }
}

/// Assign documents to time units and accumulate term counts.
///
/// Documents before `origin` are dropped and counted rather than treated as
/// errors. Errors when `unit_length_secs` is zero, when the input is empty,
/// or when every document falls before the origin.
pub fn bucket_documents(
    docs: impl IntoIterator<Item = Document>,
    origin: DateTime<Utc>,
    unit_length_secs: u64,
) -> Result<TimeBucketedCorpus> {
    if unit_length_secs == 0 {
        return Err(Error::InvalidInput("unit length must be positive".into()));
    }
    let unit_ms = unit_length_secs as i64 * 1000;
    let mut units: Vec<BTreeMap<String, u64>> = Vec::new();
    let mut dropped = 0u64;
    let mut seen = false;
    for doc in docs {
        seen = true;
        let offset_ms = (doc.timestamp - origin).num_milliseconds();
        if offset_ms < 0 {
            dropped += 1;
            continue;
        }
        let idx = (offset_ms / unit_ms) as usize;
        if idx >= units.len() {
            units.resize_with(idx + 1, BTreeMap::new);
        }
        for token in doc.tokens {
            *units[idx].entry(token).or_insert(0) += 1;
        }
    }
    if !seen {
        return Err(Error::InvalidInput("no documents to bucket".into()));
    }
    if units.is_empty() {
        return Err(Error::InvalidInput(format!(
            "all {dropped} documents fall before the origin"
        )));
    }
    Ok(TimeBucketedCorpus {
        origin,
        unit_length_secs,
        units,
        dropped,
    })
}

/// Vocabulary of words with total count >= `min_count`.
pub fn build_vocabulary(corpus: &TimeBucketedCorpus, min_count: u64) -> Result<Vocabulary> {
    if min_count == 0 {
        return Err(Error::InvalidInput("min_count must be at least 1".into()));
    }
    let words = corpus
        .total_counts()
        .into_iter()
        .filter(|(_, c)| *c >= min_count)
        .map(|(w, _)| w)
        .collect();
    Ok(Vocabulary { words, min_count })
}

#[derive(Debug, Deserialize)]
struct DocRecord {
    t: String,
    tokens: Vec<String>,
}

/// Read JSON-lines documents: one `{"t": "<RFC3339>", "tokens": [...]}`
/// object per line. Blank lines are ignored.
pub fn read_documents_jsonl(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DocRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno + 1,
            msg: format!("bad document record: {e}"),
        })?;
        let timestamp = DateTime::parse_from_rfc3339(&rec.t)
            .map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: format!("bad timestamp {:?}: {e}", rec.t),
            })?
            .with_timezone(&Utc);
        docs.push(Document {
            timestamp,
            tokens: rec.tokens,
        });
    }
    Ok(docs)
}

/// Corpus manifest, stored alongside the TF table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub origin: String,
    pub unit_length_seconds: u64,
    pub n_units: usize,
    pub dropped: u64,
}

pub fn write_manifest(path: impl AsRef<Path>, corpus: &TimeBucketedCorpus) -> Result<()> {
    let path = path.as_ref();
    let manifest = CorpusManifest {
        origin: corpus.origin.to_rfc3339(),
        unit_length_seconds: corpus.unit_length_secs,
        n_units: corpus.n_units(),
        dropped: corpus.dropped,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

/// Write the per-unit term-frequency table: `unit_index \t word \t count`,
/// sorted by (unit, word).
pub fn write_tf_table(path: impl AsRef<Path>, corpus: &TimeBucketedCorpus) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for (u, unit) in corpus.units.iter().enumerate() {
        for (word, count) in unit {
            writeln!(w, "{u}\t{word}\t{count}").map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read a TF table back into per-unit counts. `n_units` trailing empty
/// units are materialized when the caller knows the true unit count.
pub fn read_tf_table(path: impl AsRef<Path>, n_units: Option<usize>) -> Result<Vec<BTreeMap<String, u64>>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut units: Vec<BTreeMap<String, u64>> = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (u, word, count) = match (parts.next(), parts.next(), parts.next()) {
            (Some(u), Some(w), Some(c)) => (u, w, c),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "expected unit\\tword\\tcount".into(),
                })
            }
        };
        let u: usize = u.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("bad unit index {u:?}"),
        })?;
        let count: u64 = count.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("bad count {count:?}"),
        })?;
        if u >= units.len() {
            units.resize_with(u + 1, BTreeMap::new);
        }
        *units[u].entry(word.to_string()).or_insert(0) += count;
    }
    if let Some(n) = n_units {
        if n < units.len() {
            return Err(Error::InvalidInput(format!(
                "TF table has {} units but manifest says {n}",
                units.len()
            )));
        }
        units.resize_with(n, BTreeMap::new);
    }
    if units.is_empty() {
        return Err(Error::InvalidInput("TF table is empty".into()));
    }
    Ok(units)
}

/// Reload a corpus from its manifest and TF table.
pub fn read_corpus(
    manifest_path: impl AsRef<Path>,
    tf_path: impl AsRef<Path>,
) -> Result<TimeBucketedCorpus> {
    let mpath = manifest_path.as_ref();
    let text = std::fs::read_to_string(mpath).map_err(|e| Error::io(mpath, e))?;
    let manifest: CorpusManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: 1,
        msg: format!("bad manifest: {e}"),
    })?;
    let origin = DateTime::parse_from_rfc3339(&manifest.origin)
        .map_err(|e| Error::Parse {
            line: 1,
            msg: format!("bad manifest origin: {e}"),
        })?
        .with_timezone(&Utc);
    let units = read_tf_table(tf_path, Some(manifest.n_units))?;
    TimeBucketedCorpus::from_unit_counts(origin, manifest.unit_length_seconds, units, manifest.dropped)
}
