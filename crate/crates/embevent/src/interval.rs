//! Detection of abnormal intervals in a univariate series.
//!
//! An interval is abnormal when deleting it (and concatenating the
//! remainder) raises the randomness score of what is left by more than a
//! margin `delta`. The scan walks the series left to right; at each
//! position it tries every admissible end index and keeps the largest one
//! that clears the margin, preferring the largest possible abnormal
//! interval over smaller, more deviating ones. After an interval is
//! accepted the scan resumes just past its end, so the output intervals
//! are disjoint and ordered.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embeddings::UnitVectorSeries;
use crate::error::{Error, Result};
use crate::randomness::NormalityTest;

/// Detector parameters.
///
/// `k_min`/`k_max` bound the interval span `end - start` (inclusive
/// indices). `min_context` is the smallest remainder the normality test
/// may be asked to score; candidates whose removal leaves fewer points are
/// skipped rather than treated as errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub k_min: usize,
    pub k_max: usize,
    pub delta: f64,
    pub min_context: usize,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            k_min: 5,
            k_max: 25,
            delta: 0.5,
            min_context: crate::randomness::DEFAULT_MIN_N,
        }
    }
}

impl DetectorParams {
    /// Check the parameters against a series length.
    pub fn validate(&self, n_units: usize, test: &dyn NormalityTest) -> Result<()> {
        if self.k_min == 0 {
            return Err(Error::InvalidInput("k_min must be positive".into()));
        }
        if self.k_min > self.k_max {
            return Err(Error::InvalidInput(format!(
                "k_min ({}) must not exceed k_max ({})",
                self.k_min, self.k_max
            )));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        let ctx = self.effective_context(test);
        if n_units <= self.k_min + ctx {
            return Err(Error::SampleTooSmall {
                n: n_units,
                min: self.k_min + ctx + 1,
            });
        }
        if self.k_max >= n_units - ctx {
            return Err(Error::InvalidInput(format!(
                "k_max ({}) must be below n_units - min_context ({})",
                self.k_max,
                n_units - ctx
            )));
        }
        Ok(())
    }

    /// The remainder size actually enforced: the configured context floor,
    /// never below the test's own minimum sample size.
    pub fn effective_context(&self, test: &dyn NormalityTest) -> usize {
        self.min_context.max(test.min_n())
    }
}

/// A detected abnormal interval in one dimension. `start..=end` are unit
/// indices; `gap` is the randomness-score improvement its removal achieved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbnormalInterval {
    pub dim: usize,
    pub start: usize,
    pub end: usize,
    pub gap: f64,
}

impl AbnormalInterval {
    pub fn contains(&self, unit: usize) -> bool {
        self.start <= unit && unit <= self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }
}

fn remainder_into(series: &[f64], start: usize, end: usize, buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend_from_slice(&series[..start]);
    buf.extend_from_slice(&series[end + 1..]);
}

/// Score improvement from removing `start..=end`:
/// `f_n(series without the interval) - f_n(series)`.
///
/// Errors when the indices are out of range or the remainder is smaller
/// than the test's minimum sample size.
pub fn score_gap(
    series: &[f64],
    start: usize,
    end: usize,
    test: &dyn NormalityTest,
) -> Result<f64> {
    let n = series.len();
    if start > end || end >= n {
        return Err(Error::InvalidInput(format!(
            "interval ({start}, {end}) out of range for series of length {n}"
        )));
    }
    let mut remainder = Vec::with_capacity(n - (end - start + 1));
    remainder_into(series, start, end, &mut remainder);
    let p_rest = test.score(&remainder)?.p_value;
    let p_full = test.score(series)?.p_value;
    Ok(p_rest - p_full)
}

/// Find the largest intervals whose removal makes the remainder look more
/// random by more than `delta`, for one dimension's series.
pub fn detect_abnormal_intervals(
    series: &[f64],
    dim: usize,
    params: &DetectorParams,
    test: &dyn NormalityTest,
) -> Result<Vec<AbnormalInterval>> {
    let n = series.len();
    params.validate(n, test)?;
    let ctx = params.effective_context(test);
    let p_full = test.score(series)?.p_value;

    let mut found = Vec::new();
    let mut scorer = crate::randomness::remainder_scorer(test, series);
    let mut i = 0usize;
    while i + params.k_min < n {
        let j_hi = (i + params.k_max).min(n - 1);
        let mut best: Option<(usize, f64)> = None;
        for j in (i + params.k_min)..=j_hi {
            let removed = j - i + 1;
            if n - removed < ctx {
                continue;
            }
            let gap = scorer.score_without(i, j)?.p_value - p_full;
            if gap > params.delta {
                best = Some((j, gap)); // keep the largest passing end
            }
        }
        match best {
            Some((j, gap)) => {
                found.push(AbnormalInterval {
                    dim,
                    start: i,
                    end: j,
                    gap,
                });
                i = j + 1;
            }
            None => i += 1,
        }
    }
    Ok(found)
}

/// Run the detector over every dimension of a unit-vector series.
/// Dimensions are independent and processed concurrently; the output is
/// sorted by `(dim, start)`.
pub fn detect_all_dimensions(
    series: &UnitVectorSeries,
    params: &DetectorParams,
    test: &dyn NormalityTest,
) -> Result<Vec<AbnormalInterval>> {
    let dims = series.dim();
    let mut results: Vec<Result<Vec<AbnormalInterval>>> = Vec::with_capacity(dims);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(dims);
        for d in 0..dims {
            let column = series.dimension(d);
            handles.push(scope.spawn(move || detect_abnormal_intervals(&column, d, params, test)));
        }
        for h in handles {
            results.push(h.join().expect("detector thread panicked"));
        }
    });
    let mut all = Vec::new();
    for r in results {
        all.extend(r?);
    }
    all.sort_by_key(|iv| (iv.dim, iv.start));
    Ok(all)
}

/// Group a flat interval list into per-dimension lists for the assembler.
pub fn group_by_dim(intervals: &[AbnormalInterval], n_dims: usize) -> Vec<Vec<AbnormalInterval>> {
    let mut sets = vec![Vec::new(); n_dims];
    for iv in intervals {
        sets[iv.dim].push(*iv);
    }
    for set in &mut sets {
        set.sort_by_key(|iv| iv.start);
    }
    sets
}

pub fn write_intervals_json(path: impl AsRef<Path>, intervals: &[AbnormalInterval]) -> Result<()> {
    let path = path.as_ref();
    let mut sorted = intervals.to_vec();
    sorted.sort_by_key(|iv| (iv.dim, iv.start));
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &sorted).map_err(|e| Error::InvalidInput(e.to_string()))?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_intervals_json(path: impl AsRef<Path>) -> Result<Vec<AbnormalInterval>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: 1,
        msg: format!("bad intervals JSON: {e}"),
    })
}
