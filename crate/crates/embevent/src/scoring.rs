//! Ranked newsworthy words from detected events.
//!
//! A detected event carries no words, only affected dimensions. To rank
//! words, each affected dimension first gets a deviation: its mean inside
//! the event minus its mean outside. A word's event score is then the dot
//! product between its embedding (restricted to the affected dimensions)
//! and those deviations, so words pulling in the same direction as the
//! event score highest. A word's score in a time unit sums its event
//! scores over the events active at that unit; summing over all events
//! instead is available behind [`ScoreScope::All`].

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::corpus::Vocabulary;
use crate::embeddings::{EmbeddingTable, UnitVectorSeries};
use crate::error::{Error, Result};
use crate::event::Event;

/// Per-dimension inside-minus-outside means for one event.
#[derive(Debug, Clone, PartialEq)]
pub struct EventDeviation {
    pub event: Event,
    /// Deviation per affected dimension, defined exactly on `event.dims`.
    pub dev: BTreeMap<usize, f64>,
}

/// Which events contribute to a unit's word scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreScope {
    /// Only events whose interval contains the unit (default).
    Active,
    /// Every detected event, regardless of the unit.
    All,
}

impl std::str::FromStr for ScoreScope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "active" => Ok(ScoreScope::Active),
            "all" => Ok(ScoreScope::All),
            other => Err(Error::InvalidInput(format!(
                "unknown score scope {other:?} (expected \"active\" or \"all\")"
            ))),
        }
    }
}

/// Ranked `(word, score)` list for one time unit, sorted by score
/// descending with lexicographic tie-breaks.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedWords {
    pub unit: usize,
    pub entries: Vec<(String, f64)>,
}

impl RankedWords {
    /// The top `k` words in rank order.
    pub fn top_words(&self, k: usize) -> Vec<&str> {
        self.entries.iter().take(k).map(|(w, _)| w.as_str()).collect()
    }
}

/// Inside-minus-outside mean per affected dimension.
///
/// Errors when the event exceeds the series bounds or spans the whole
/// series (no outside context to compare against).
pub fn dimension_deviation(series: &UnitVectorSeries, event: &Event) -> Result<EventDeviation> {
    let n = series.n_units();
    if event.end >= n || event.start > event.end {
        return Err(Error::InvalidInput(format!(
            "event [{}, {}] out of range for {n} units",
            event.start, event.end
        )));
    }
    if event.len() == n {
        return Err(Error::InvalidInput(
            "event spans the whole series; no outside context".into(),
        ));
    }
    let inside = event.len() as f64;
    let outside = (n - event.len()) as f64;
    let mut dev = BTreeMap::new();
    for &d in &event.dims {
        if d >= series.dim() {
            return Err(Error::InvalidInput(format!(
                "event dimension {d} out of range for dim {}",
                series.dim()
            )));
        }
        let mut sum_in = 0.0;
        let mut sum_out = 0.0;
        for u in 0..n {
            let v = series.row(u)[d];
            if event.contains(u) {
                sum_in += v;
            } else {
                sum_out += v;
            }
        }
        dev.insert(d, sum_in / inside - sum_out / outside);
    }
    Ok(EventDeviation {
        event: event.clone(),
        dev,
    })
}

/// Word score against one event: the embedding-deviation product summed
/// over the event's dimensions.
pub fn event_word_score(word_vector: &[f64], deviation: &EventDeviation) -> f64 {
    deviation
        .dev
        .iter()
        .map(|(&d, &dev)| word_vector[d] * dev)
        .sum()
}

/// Ranked words for one time unit.
///
/// Candidate words are the vocabulary's intersection with the embedding
/// table; words without vectors cannot be scored and are excluded.
pub fn time_unit_word_scores(
    deviations: &[EventDeviation],
    table: &EmbeddingTable,
    vocab: &Vocabulary,
    unit: usize,
    scope: ScoreScope,
) -> RankedWords {
    let relevant: Vec<&EventDeviation> = deviations
        .iter()
        .filter(|dv| match scope {
            ScoreScope::Active => dv.event.contains(unit),
            ScoreScope::All => true,
        })
        .collect();

    let mut entries: Vec<(String, f64)> = Vec::new();
    for word in vocab.words() {
        let Some(vector) = table.get(word) else {
            continue;
        };
        let score: f64 = relevant.iter().map(|dv| event_word_score(vector, dv)).sum();
        entries.push((word.to_string(), score));
    }
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    RankedWords { unit, entries }
}

/// Ranked words for every unit of a series.
pub fn rank_all_units(
    deviations: &[EventDeviation],
    table: &EmbeddingTable,
    vocab: &Vocabulary,
    n_units: usize,
    scope: ScoreScope,
) -> Vec<RankedWords> {
    (0..n_units)
        .map(|u| time_unit_word_scores(deviations, table, vocab, u, scope))
        .collect()
}

/// Write rankings as TSV: `unit \t rank \t word \t score`, scores with six
/// decimals, `top_k` rows per unit.
pub fn write_rankings_tsv(
    path: impl AsRef<Path>,
    rankings: &[RankedWords],
    top_k: usize,
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for ranked in rankings {
        for (rank, (word, score)) in ranked.entries.iter().take(top_k).enumerate() {
            writeln!(w, "{}\t{}\t{}\t{:.6}", ranked.unit, rank + 1, word, score)
                .map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read rankings written by [`write_rankings_tsv`]. Entries are restored in
/// rank order per unit.
pub fn read_rankings_tsv(path: impl AsRef<Path>) -> Result<Vec<RankedWords>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut per_unit: BTreeMap<usize, Vec<(usize, String, f64)>> = BTreeMap::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: "expected unit\\trank\\tword\\tscore".into(),
            });
        }
        let unit: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("bad unit {:?}", fields[0]),
        })?;
        let rank: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("bad rank {:?}", fields[1]),
        })?;
        let score: f64 = fields[3].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("bad score {:?}", fields[3]),
        })?;
        per_unit
            .entry(unit)
            .or_default()
            .push((rank, fields[2].to_string(), score));
    }
    Ok(per_unit
        .into_iter()
        .map(|(unit, mut rows)| {
            rows.sort_by_key(|(rank, _, _)| *rank);
            RankedWords {
                unit,
                entries: rows.into_iter().map(|(_, w, s)| (w, s)).collect(),
            }
        })
        .collect())
}
