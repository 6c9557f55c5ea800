//! Randomness scoring for univariate series.
//!
//! The interval detector asks one question of a sequence: "does this look
//! like usual, serially independent behavior?" The answer is produced by a
//! [`NormalityTest`], and the shipped implementation is the rank version of
//! von Neumann's ratio test. Its two-sided p-value is used as the score, so
//! higher always means "more consistent with randomness".

use crate::error::{Error, Result};

/// Result of scoring a sequence with a normality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomnessScore {
    /// Two-sided p-value in `[0, 1]`; higher is more consistent with
    /// serially independent data.
    pub p_value: f64,
    /// The test statistic (the RVN ratio for the shipped test). `None` when
    /// the input was degenerate (all values tied).
    pub statistic: Option<f64>,
    /// Sample size the score was computed from.
    pub n: usize,
}

/// Contract for pluggable normality/randomness tests.
///
/// Implementations must be deterministic, and must return p-value-like
/// scores where higher means more random. Additional tests (Box,
/// Shapiro-Wilk, ...) can be registered without touching the detector.
pub trait NormalityTest: Send + Sync {
    /// Identifier used for CLI selection.
    fn name(&self) -> &str;
    /// Smallest admissible sample size.
    fn min_n(&self) -> usize;
    /// Score a sequence. Errors when `values.len() < min_n()`.
    fn score(&self, values: &[f64]) -> Result<RandomnessScore>;

    /// Optional prepared scorer for repeated "series minus one interval"
    /// evaluations over a fixed series. The detector asks for one before
    /// its candidate sweep; tests that can amortize work across candidates
    /// (the rank test presorts the series once) return `Some`. The default
    /// rebuilds each remainder and calls [`NormalityTest::score`], so the
    /// two paths must agree exactly.
    fn prepared_scorer<'a>(&'a self, _series: &'a [f64]) -> Option<Box<dyn RemainderScorer + 'a>> {
        None
    }
}

/// Repeated scoring of one series with a candidate interval removed.
pub trait RemainderScorer {
    /// Score the series with positions `start..=end` deleted and the
    /// remainder concatenated.
    fn score_without(&mut self, start: usize, end: usize) -> Result<RandomnessScore>;
}

struct RebuildScorer<'a> {
    test: &'a dyn NormalityTest,
    series: &'a [f64],
    buf: Vec<f64>,
}

impl RemainderScorer for RebuildScorer<'_> {
    fn score_without(&mut self, start: usize, end: usize) -> Result<RandomnessScore> {
        self.buf.clear();
        self.buf.extend_from_slice(&self.series[..start]);
        self.buf.extend_from_slice(&self.series[end + 1..]);
        self.test.score(&self.buf)
    }
}

/// A scorer for `test` over `series`: the test's own prepared scorer when
/// it has one, otherwise the generic rebuild-and-score fallback.
pub fn remainder_scorer<'a>(
    test: &'a dyn NormalityTest,
    series: &'a [f64],
) -> Box<dyn RemainderScorer + 'a> {
    test.prepared_scorer(series).unwrap_or_else(|| {
        Box::new(RebuildScorer {
            test,
            series,
            buf: Vec::with_capacity(series.len()),
        })
    })
}

/// Midranks of a sequence: ranks in `[1, n]` with ties receiving the mean
/// of their rank range. The rank sum is always `n(n+1)/2`.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // tied run occupies ranks i+1 ..= j+1; midrank is exact in f64
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Rank von Neumann ratio of a sequence:
/// `RVN = sum_{i<n} (r_i - r_{i+1})^2 / sum_i (r_i - rbar)^2`
/// over the midranks `r`. Returns `None` when all values are tied
/// (zero denominator). Errors when `n < 2`.
pub fn rvn_statistic(values: &[f64]) -> Result<Option<f64>> {
    if values.len() < 2 {
        return Err(Error::SampleTooSmall {
            n: values.len(),
            min: 2,
        });
    }
    Ok(rvn_from_ranks(&midranks(values)))
}

/// RVN ratio from precomputed ranks; `None` when the denominator is zero.
pub(crate) fn rvn_from_ranks(ranks: &[f64]) -> Option<f64> {
    let n = ranks.len();
    let mean = ranks.iter().sum::<f64>() / n as f64;
    let denom: f64 = ranks.iter().map(|r| (r - mean) * (r - mean)).sum();
    if denom == 0.0 {
        return None;
    }
    let numer: f64 = ranks
        .windows(2)
        .map(|w| (w[0] - w[1]) * (w[0] - w[1]))
        .sum();
    Some(numer / denom)
}

/// Null variance of the RVN ratio for sample size `n` (Bartels' normal
/// approximation): `4(n-2)(5n^2-2n-9) / (5n(n+1)(n-1)^2)`.
pub fn rvn_null_variance(n: usize) -> f64 {
    let nf = n as f64;
    4.0 * (nf - 2.0) * (5.0 * nf * nf - 2.0 * nf - 9.0)
        / (5.0 * nf * (nf + 1.0) * (nf - 1.0) * (nf - 1.0))
}

/// The rank von Neumann ratio test with a normal approximation to the null
/// distribution (mean 2, variance [`rvn_null_variance`]).
///
/// Degenerate input (all values tied) scores p = 1: constant data is
/// maximally usual and must never be flagged.
#[derive(Debug, Clone)]
pub struct BartelsRvn {
    min_n: usize,
}

/// Default smallest admissible sample size for [`BartelsRvn`].
pub const DEFAULT_MIN_N: usize = 10;

impl BartelsRvn {
    pub fn new(min_n: usize) -> Self {
        Self { min_n: min_n.max(2) }
    }
}

impl Default for BartelsRvn {
    fn default() -> Self {
        Self::new(DEFAULT_MIN_N)
    }
}

fn rvn_score_from_ranks(ranks: &[f64]) -> RandomnessScore {
    let n = ranks.len();
    match rvn_from_ranks(ranks) {
        None => RandomnessScore {
            p_value: 1.0,
            statistic: None,
            n,
        },
        Some(rvn) => {
            let sigma = rvn_null_variance(n).sqrt();
            let z = (rvn - 2.0) / sigma;
            // two-sided tail: 2 * Phi(-|z|) = erfc(|z| / sqrt(2))
            let p = statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2);
            RandomnessScore {
                p_value: p.clamp(0.0, 1.0),
                statistic: Some(rvn),
                n,
            }
        }
    }
}

impl NormalityTest for BartelsRvn {
    fn name(&self) -> &str {
        "bartels-rvn"
    }

    fn min_n(&self) -> usize {
        self.min_n
    }

    fn score(&self, values: &[f64]) -> Result<RandomnessScore> {
        let n = values.len();
        if n < self.min_n {
            return Err(Error::SampleTooSmall { n, min: self.min_n });
        }
        Ok(rvn_score_from_ranks(&midranks(values)))
    }

    fn prepared_scorer<'a>(&'a self, series: &'a [f64]) -> Option<Box<dyn RemainderScorer + 'a>> {
        Some(Box::new(RvnRemainderScorer::new(self.min_n, series)))
    }
}

/// Presorted remainder scorer for [`BartelsRvn`]: the series is argsorted
/// once and each candidate's midranks are derived in linear time by walking
/// the sorted order while skipping the removed window. Tie runs are formed
/// the same way [`midranks`] forms them, so the scores are identical to the
/// rebuild path bit for bit.
struct RvnRemainderScorer<'a> {
    min_n: usize,
    series: &'a [f64],
    order: Vec<u32>,
    rank_by_time: Vec<f64>,
    ranks: Vec<f64>,
}

impl<'a> RvnRemainderScorer<'a> {
    fn new(min_n: usize, series: &'a [f64]) -> Self {
        let mut order: Vec<u32> = (0..series.len() as u32).collect();
        order.sort_by(|&a, &b| series[a as usize].total_cmp(&series[b as usize]));
        Self {
            min_n,
            series,
            order,
            rank_by_time: vec![0.0; series.len()],
            ranks: Vec::with_capacity(series.len()),
        }
    }
}

impl RemainderScorer for RvnRemainderScorer<'_> {
    fn score_without(&mut self, start: usize, end: usize) -> Result<RandomnessScore> {
        let n = self.series.len();
        debug_assert!(start <= end && end < n);
        let n_rem = n - (end - start + 1);
        if n_rem < self.min_n {
            return Err(Error::SampleTooSmall {
                n: n_rem,
                min: self.min_n,
            });
        }
        let kept = |t: usize| t < start || t > end;

        let mut assigned = 0usize;
        let mut pos = 0usize;
        while pos < n {
            let value = self.series[self.order[pos] as usize];
            let mut run_end = pos + 1;
            while run_end < n && self.series[self.order[run_end] as usize] == value {
                run_end += 1;
            }
            let members = self.order[pos..run_end]
                .iter()
                .filter(|&&t| kept(t as usize))
                .count();
            if members > 0 {
                // run occupies remainder ranks assigned+1 ..= assigned+members
                let rank = assigned as f64 + (members as f64 + 1.0) / 2.0;
                for &t in &self.order[pos..run_end] {
                    if kept(t as usize) {
                        self.rank_by_time[t as usize] = rank;
                    }
                }
                assigned += members;
            }
            pos = run_end;
        }

        self.ranks.clear();
        self.ranks.extend_from_slice(&self.rank_by_time[..start]);
        self.ranks.extend_from_slice(&self.rank_by_time[end + 1..]);
        Ok(rvn_score_from_ranks(&self.ranks))
    }
}

/// Look up a normality test by CLI name. `min_n` configures the smallest
/// admissible sample size.
pub fn test_by_name(name: &str, min_n: usize) -> Option<Box<dyn NormalityTest>> {
    match name {
        "bartels-rvn" => Some(Box::new(BartelsRvn::new(min_n))),
        _ => None,
    }
}

/// Convenience: score with the default [`BartelsRvn`] test.
pub fn randomness_score(values: &[f64]) -> Result<RandomnessScore> {
    BartelsRvn::default().score(values)
}
