//! Word-vector tables and per-unit average embeddings.
//!
//! Each time unit is represented by the average embedding of the token
//! occurrences assigned to it. Token multiplicity weights the average: a
//! word used ten times pulls the unit vector ten times as hard, which is
//! exactly the frequency shift the interval detector is meant to see.
//! Out-of-vocabulary tokens are skipped silently but tallied via the
//! coverage count; a unit with no embeddable tokens gets the zero vector.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::corpus::TimeBucketedCorpus;
use crate::error::{Error, Result};

/// A loaded word-vector table with a fixed dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    duplicates: usize,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: HashMap::new(),
            duplicates: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Number of duplicate words encountered while loading (last wins).
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(|v| v.as_slice())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }

    /// Insert a vector; errors on dimension mismatch or non-finite entries.
    pub fn insert(&mut self, word: String, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "vector for {word:?} has length {}, table dimension is {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "vector for {word:?} has a non-finite component"
            )));
        }
        if self.vectors.insert(word, vector).is_some() {
            self.duplicates += 1;
        }
        Ok(())
    }
}

/// The `n_units x dim` matrix of per-unit average embeddings, with a
/// per-unit count of embedded token occurrences.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVectorSeries {
    dim: usize,
    rows: Vec<Vec<f64>>,
    coverage: Vec<u64>,
}

impl UnitVectorSeries {
    pub fn n_units(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.rows[u]
    }

    pub fn coverage(&self, u: usize) -> u64 {
        self.coverage[u]
    }

    /// The series of one embedding dimension across all units.
    pub fn dimension(&self, d: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[d]).collect()
    }

    pub fn from_rows(dim: usize, rows: Vec<Vec<f64>>, coverage: Vec<u64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("series must have at least one unit".into()));
        }
        if rows.len() != coverage.len() || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("series shape mismatch".into()));
        }
        Ok(Self { dim, rows, coverage })
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut parts = line.split_whitespace();
    let a = parts.next()?.parse::<usize>().ok()?;
    let b = parts.next()?.parse::<usize>().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((a, b))
}

/// Load a whitespace-delimited text vector table: an optional header line
/// `<count> <dim>`, then one `<word> <v1> ... <vdim>` line per word. The
/// dimension is inferred from the first vector line; duplicate words keep
/// the last occurrence.
pub fn load_embedding_table(reader: impl std::io::Read) -> Result<EmbeddingTable> {
    let mut table: Option<EmbeddingTable> = None;
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: lineno + 1,
            msg: format!("read failure: {e}"),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        if lineno == 0 && table.is_none() && parse_header(&line).is_some() {
            continue; // header carries no information we trust; dim is inferred
        }
        let mut parts = line.split_whitespace();
        let word = parts
            .next()
            .ok_or_else(|| Error::Parse {
                line: lineno + 1,
                msg: "empty vector line".into(),
            })?
            .to_string();
        let mut vector = Vec::new();
        for comp in parts {
            let v: f64 = comp.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("non-numeric component {comp:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("non-finite component {comp:?}"),
                });
            }
            vector.push(v);
        }
        if vector.is_empty() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("no components for word {word:?}"),
            });
        }
        let table = table.get_or_insert_with(|| EmbeddingTable::new(vector.len()));
        if vector.len() != table.dim() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!(
                    "vector for {word:?} has {} components, expected {}",
                    vector.len(),
                    table.dim()
                ),
            });
        }
        table.insert(word, vector)?;
    }
    table.ok_or_else(|| Error::InvalidInput("embedding table is empty".into()))
}

pub fn load_embedding_file(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_embedding_table(file)
}

/// Average embedding of a token multiset. Returns the vector and the
/// coverage (number of in-vocabulary token occurrences); the zero vector
/// when nothing is covered.
pub fn average_unit_vector(
    tokens: &BTreeMap<String, u64>,
    table: &EmbeddingTable,
) -> (Vec<f64>, u64) {
    let mut sum = vec![0.0; table.dim()];
    let mut coverage = 0u64;
    for (word, &count) in tokens {
        if let Some(vector) = table.get(word) {
            for (s, v) in sum.iter_mut().zip(vector) {
                *s += v * count as f64;
            }
            coverage += count;
        }
    }
    if coverage > 0 {
        for s in &mut sum {
            *s /= coverage as f64;
        }
    }
    (sum, coverage)
}

/// The unit-vector series of a corpus: row `u` is the average embedding of
/// unit `u`'s tokens.
pub fn build_unit_series(corpus: &TimeBucketedCorpus, table: &EmbeddingTable) -> Result<UnitVectorSeries> {
    if table.is_empty() {
        return Err(Error::InvalidInput("embedding table is empty".into()));
    }
    let mut rows = Vec::with_capacity(corpus.n_units());
    let mut coverage = Vec::with_capacity(corpus.n_units());
    for u in 0..corpus.n_units() {
        let (row, cov) = average_unit_vector(corpus.unit(u), table);
        rows.push(row);
        coverage.push(cov);
    }
    UnitVectorSeries::from_rows(table.dim(), rows, coverage)
}

/// Write the series as CSV: header `unit,coverage,d0,...`, one row per
/// unit. Values are printed with 18 significant digits so a reload is
/// bit-exact.
pub fn write_series_csv(path: impl AsRef<Path>, series: &UnitVectorSeries) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut header = String::from("unit,coverage");
    for d in 0..series.dim() {
        header.push_str(&format!(",d{d}"));
    }
    writeln!(w, "{header}").map_err(|e| Error::io(path, e))?;
    for u in 0..series.n_units() {
        let mut line = format!("{u},{}", series.coverage(u));
        for v in series.row(u) {
            line.push_str(&format!(",{v:.17e}"));
        }
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_series_csv(path: impl AsRef<Path>) -> Result<UnitVectorSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    let mut coverage = Vec::new();
    let mut dim = None;
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if lineno == 0 || line.trim().is_empty() {
            continue; // header
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: "expected unit,coverage,d0,...".into(),
            });
        }
        let unit: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("bad unit index {:?}", fields[0]),
        })?;
        if unit != rows.len() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("unit {unit} out of order"),
            });
        }
        let cov: u64 = fields[1].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("bad coverage {:?}", fields[1]),
        })?;
        let mut row = Vec::with_capacity(fields.len() - 2);
        for f in &fields[2..] {
            row.push(f.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad value {f:?}"),
            })?);
        }
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("row has {} values, expected {d}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
        coverage.push(cov);
    }
    let dim = dim.ok_or_else(|| Error::InvalidInput("series CSV has no rows".into()))?;
    UnitVectorSeries::from_rows(dim, rows, coverage)
}
