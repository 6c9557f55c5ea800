//! Ground-truth generation and Recall@K evaluation.
//!
//! Ground truth comes from a reference (news) corpus: per time unit, the
//! top words of that unit ranked by tf-idf. A method's ranked words are
//! then compared against the truth with Recall@K, averaged over the units
//! whose truth set is nonempty.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::tfidf_scores;
use crate::corpus::{build_vocabulary, TimeBucketedCorpus};
use crate::error::{Error, Result};
use crate::scoring::RankedWords;

/// Per-unit ground-truth word sets (each of size at most `top_k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    per_unit: Vec<BTreeSet<String>>,
}

impl GroundTruth {
    pub fn n_units(&self) -> usize {
        self.per_unit.len()
    }

    pub fn unit(&self, u: usize) -> &BTreeSet<String> {
        &self.per_unit[u]
    }

    pub fn from_sets(per_unit: Vec<BTreeSet<String>>) -> Self {
        Self { per_unit }
    }
}

/// Top `top_k` words of each unit of a reference corpus, ranked by tf-idf
/// (ties broken lexicographically). Units with no tokens yield empty sets.
pub fn generate_ground_truth(news: &TimeBucketedCorpus, top_k: usize) -> Result<GroundTruth> {
    if top_k == 0 {
        return Err(Error::InvalidInput("top_k must be at least 1".into()));
    }
    let vocab = build_vocabulary(news, 1)?;
    let table = tfidf_scores(news, &vocab);
    let mut per_unit = Vec::with_capacity(news.n_units());
    for u in 0..news.n_units() {
        // candidates are the words actually present in the unit
        let mut present: Vec<(&String, f64)> = table
            .unit_scores(u)
            .iter()
            .map(|(w, &s)| (w, s))
            .collect();
        present.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        per_unit.push(
            present
                .into_iter()
                .take(top_k)
                .map(|(w, _)| w.clone())
                .collect(),
        );
    }
    Ok(GroundTruth { per_unit })
}

/// `|truth ∩ top-K| / |truth|` for one unit.
pub fn recall_at_k(ranked: &RankedWords, truth: &BTreeSet<String>, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be at least 1".into()));
    }
    if truth.is_empty() {
        return Err(Error::InvalidInput("truth set is empty".into()));
    }
    let hits = ranked
        .entries
        .iter()
        .take(k)
        .filter(|(w, _)| truth.contains(w))
        .count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Expected Recall@K of a uniformly random ranking: `K / vocab_size`.
pub fn random_baseline_recall(k: usize, vocab_size: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be at least 1".into()));
    }
    if k > vocab_size {
        return Err(Error::InvalidInput(format!(
            "K ({k}) exceeds vocabulary size ({vocab_size})"
        )));
    }
    Ok(k as f64 / vocab_size as f64)
}

/// Mean Recall@K per K, averaged over units with nonempty ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    /// Units that entered the average.
    pub units: usize,
    /// Units excluded for having an empty truth set.
    pub units_skipped: usize,
    /// Mean recall keyed by the (stringified) K value.
    pub recall: BTreeMap<String, f64>,
    /// Effective configuration echoed for provenance.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub config: BTreeMap<String, String>,
}

/// Evaluate rankings against ground truth over a grid of K values.
///
/// Rankings are matched to truth sets by unit index; units missing from
/// `rankings` are treated as empty rankings (zero recall) when their truth
/// is nonempty.
pub fn evaluate(
    method: &str,
    rankings: &[RankedWords],
    truth: &GroundTruth,
    ks: &[usize],
) -> Result<EvalReport> {
    if ks.is_empty() {
        return Err(Error::InvalidInput("need at least one K value".into()));
    }
    let by_unit: BTreeMap<usize, &RankedWords> =
        rankings.iter().map(|r| (r.unit, r)).collect();
    let mut sums: BTreeMap<usize, f64> = ks.iter().map(|&k| (k, 0.0)).collect();
    let mut used = 0usize;
    let mut skipped = 0usize;
    for u in 0..truth.n_units() {
        let t = truth.unit(u);
        if t.is_empty() {
            skipped += 1;
            continue;
        }
        used += 1;
        for &k in ks {
            let r = match by_unit.get(&u) {
                Some(r) => recall_at_k(r, t, k)?,
                None => 0.0,
            };
            *sums.get_mut(&k).unwrap() += r;
        }
    }
    let recall = sums
        .into_iter()
        .map(|(k, s)| (k.to_string(), if used > 0 { s / used as f64 } else { 0.0 }))
        .collect();
    Ok(EvalReport {
        method: method.to_string(),
        units: used,
        units_skipped: skipped,
        recall,
        config: BTreeMap::new(),
    })
}

/// Write truth as TSV lines `unit \t word`.
pub fn write_truth_tsv(path: impl AsRef<Path>, truth: &GroundTruth) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for (u, set) in truth.per_unit.iter().enumerate() {
        for word in set {
            writeln!(w, "{u}\t{word}").map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_truth_tsv(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut per_unit: Vec<BTreeSet<String>> = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (u, word) = match (parts.next(), parts.next()) {
            (Some(u), Some(w)) => (u, w),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "expected unit\\tword".into(),
                })
            }
        };
        let u: usize = u.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("bad unit index {u:?}"),
        })?;
        if u >= per_unit.len() {
            per_unit.resize_with(u + 1, BTreeSet::new);
        }
        per_unit[u].insert(word.to_string());
    }
    Ok(GroundTruth { per_unit })
}

pub fn write_report_json(path: impl AsRef<Path>, report: &EvalReport) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::InvalidInput(e.to_string()))?;
    std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}
