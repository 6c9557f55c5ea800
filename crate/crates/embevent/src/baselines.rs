//! Comparison methods: per-unit tf-idf ranking and Shannon wavelet entropy.
//!
//! tf-idf treats each time unit as a document:
//! `tfidf(w, u) = tf(w, u) * ln(n_units / df(w))`
//! with natural logs and document frequency counting units where the word
//! occurs at least once.
//!
//! The SWE baseline scores a word by how unpredictable its tf-idf series
//! has become. For each unit it takes a trailing window of `h` units,
//! applies an undecimated Haar transform (the stationary/à-trous variant,
//! so every unit in the window owns coefficients at every level), collects
//! the per-unit wavelet energies, and computes the Shannon entropy of the
//! normalized energy distribution. A word whose entropy is rising gets a
//! positive score; anything else scores zero.

use std::collections::BTreeMap;

use crate::corpus::{TimeBucketedCorpus, Vocabulary};
use crate::error::{Error, Result};
use crate::scoring::RankedWords;

/// Per-(unit, word) tf-idf scores, stored sparsely: absent entries are 0.
#[derive(Debug, Clone)]
pub struct TfidfTable {
    n_units: usize,
    scores: Vec<BTreeMap<String, f64>>,
}

impl TfidfTable {
    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn score(&self, unit: usize, word: &str) -> f64 {
        self.scores[unit].get(word).copied().unwrap_or(0.0)
    }

    /// Non-zero-tf entries of one unit, in word order.
    pub fn unit_scores(&self, unit: usize) -> &BTreeMap<String, f64> {
        &self.scores[unit]
    }

    /// The tf-idf series of one word across all units.
    pub fn word_series(&self, word: &str) -> Vec<f64> {
        (0..self.n_units).map(|u| self.score(u, word)).collect()
    }
}

/// tf-idf over a corpus, restricted to a vocabulary.
pub fn tfidf_scores(corpus: &TimeBucketedCorpus, vocab: &Vocabulary) -> TfidfTable {
    let n = corpus.n_units();
    let mut idf: BTreeMap<&str, f64> = BTreeMap::new();
    for word in vocab.words() {
        let df = corpus.document_frequency(word);
        if df > 0 {
            idf.insert(word, (n as f64 / df as f64).ln());
        }
    }
    let mut scores = Vec::with_capacity(n);
    for u in 0..n {
        let mut unit = BTreeMap::new();
        for (word, &count) in corpus.unit(u) {
            if let Some(&idf_w) = idf.get(word.as_str()) {
                unit.insert(word.clone(), count as f64 * idf_w);
            }
        }
        scores.push(unit);
    }
    TfidfTable { n_units: n, scores }
}

/// Rank every unit by tf-idf (descending, lexicographic tie-break). All
/// vocabulary words are candidates; words absent from a unit score 0.
pub fn tfidf_rankings(table: &TfidfTable, vocab: &Vocabulary) -> Vec<RankedWords> {
    (0..table.n_units())
        .map(|u| {
            let mut entries: Vec<(String, f64)> = vocab
                .words()
                .map(|w| (w.to_string(), table.score(u, w)))
                .collect();
            entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            RankedWords { unit: u, entries }
        })
        .collect()
}

/// Undecimated Haar detail coefficients of a window.
///
/// With `A_0 = x` and `off = 2^(l-1)`:
/// `A_l(j) = (A_{l-1}(j) + A_{l-1}(j - off)) / sqrt(2)`
/// `C_l(j) = (A_{l-1}(j) - A_{l-1}(j - off)) / sqrt(2)`
/// Indices below zero reflect at the window start (`x(-m) = x(m-1)`).
/// Returns `levels` rows of length `window.len()`.
pub fn haar_atrous(window: &[f64], levels: usize) -> Result<Vec<Vec<f64>>> {
    let h = window.len();
    if h < 2 {
        return Err(Error::SampleTooSmall { n: h, min: 2 });
    }
    if levels == 0 {
        return Err(Error::InvalidInput("levels must be at least 1".into()));
    }
    if (1usize << levels) > h {
        return Err(Error::InvalidInput(format!(
            "levels {levels} too deep for window of {h} (need 2^levels <= h)"
        )));
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut approx = window.to_vec();
    let mut details = Vec::with_capacity(levels);
    for l in 1..=levels {
        let offset = 1usize << (l - 1);
        let mut next = vec![0.0; h];
        let mut detail = vec![0.0; h];
        for j in 0..h {
            let k = j as isize - offset as isize;
            let idx = if k < 0 { (-k - 1) as usize } else { k as usize };
            next[j] = (approx[j] + approx[idx]) / sqrt2;
            detail[j] = (approx[j] - approx[idx]) / sqrt2;
        }
        details.push(detail);
        approx = next;
    }
    Ok(details)
}

/// Per-unit wavelet energy: `E_j = sum_l C_l(j)^2`.
pub fn unit_energies(coefficients: &[Vec<f64>]) -> Vec<f64> {
    if coefficients.is_empty() {
        return Vec::new();
    }
    let h = coefficients[0].len();
    let mut energies = vec![0.0; h];
    for level in coefficients {
        for (e, c) in energies.iter_mut().zip(level) {
            *e += c * c;
        }
    }
    energies
}

/// Shannon entropy of the normalized energy distribution, with the usual
/// `0 * ln 0 = 0` convention. `None` when the total energy is zero.
pub fn shannon_wavelet_entropy(energies: &[f64]) -> Option<f64> {
    let total: f64 = energies.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut swe = 0.0;
    for &e in energies {
        if e > 0.0 {
            let rho = e / total;
            swe -= rho * rho.ln();
        }
    }
    Some(swe)
}

/// Relative SWE increase: `(swe_t - swe_prev) / swe_prev` when the entropy
/// is rising, zero otherwise (including every degenerate case).
pub fn swe_word_score(swe_t: Option<f64>, swe_prev: Option<f64>) -> f64 {
    match (swe_t, swe_prev) {
        (Some(t), Some(p)) if p > 0.0 && t > p => (t - p) / p,
        _ => 0.0,
    }
}

/// SWE baseline parameters: the trailing window length `h`. The transform
/// depth is `floor(log2 h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweParams {
    pub window: usize,
}

impl Default for SweParams {
    fn default() -> Self {
        Self { window: 32 }
    }
}

impl SweParams {
    pub fn levels(&self) -> usize {
        (usize::BITS - 1 - self.window.leading_zeros()) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidInput("SWE window must be at least 2".into()));
        }
        Ok(())
    }
}

/// The SWE of one word's tf-idf series at unit `t`: entropy of the trailing
/// window `t-h+1 ..= t`, defined once the window is full.
pub fn swe_at_unit(series: &[f64], t: usize, params: &SweParams) -> Result<Option<f64>> {
    let h = params.window;
    if t + 1 < h || t >= series.len() {
        return Ok(None);
    }
    let window = &series[t + 1 - h..=t];
    let coeffs = haar_atrous(window, params.levels())?;
    Ok(shannon_wavelet_entropy(&unit_energies(&coeffs)))
}

/// Rank every unit by the SWE increase score of each vocabulary word.
pub fn swe_rankings(
    table: &TfidfTable,
    vocab: &Vocabulary,
    params: &SweParams,
) -> Result<Vec<RankedWords>> {
    params.validate()?;
    let n = table.n_units();
    let words: Vec<&str> = vocab.words().collect();
    // score matrix built word-by-word: each word's SWE pipeline is
    // independent
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(words.len());
    for word in &words {
        let series = table.word_series(word);
        let mut scores = vec![0.0; n];
        let mut prev: Option<f64> = None;
        for t in 0..n {
            let current = swe_at_unit(&series, t, params)?;
            scores[t] = swe_word_score(current, prev);
            prev = current;
        }
        columns.push(scores);
    }
    Ok((0..n)
        .map(|u| {
            let mut entries: Vec<(String, f64)> = words
                .iter()
                .zip(&columns)
                .map(|(w, col)| (w.to_string(), col[u]))
                .collect();
            entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            RankedWords { unit: u, entries }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{bucket_documents, build_vocabulary, Document};
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn ts(secs: i64) -> chrono::DateTime<chrono::Utc> {
        chrono::Utc.timestamp_opt(secs, 0).unwrap()
    }

    fn corpus_from_units(units: &[&[(&str, u64)]]) -> TimeBucketedCorpus {
        let mut docs = Vec::new();
        for (u, unit) in units.iter().enumerate() {
            let mut tokens = Vec::new();
            for (word, count) in *unit {
                for _ in 0..*count {
                    tokens.push(word.to_string());
                }
            }
            docs.push(Document {
                timestamp: ts(u as i64 * 3600),
                tokens,
            });
        }
        bucket_documents(docs, ts(0), 3600).unwrap()
    }

    #[test]
    fn tfidf_hand_value() {
        // tf=3 in unit 0, df=2 out of 10 units -> 3 * ln 5
        let mut units: Vec<&[(&str, u64)]> = vec![&[("x", 1)]; 10];
        units[0] = &[("w", 3), ("x", 1)];
        units[5] = &[("w", 1), ("x", 1)];
        let corpus = corpus_from_units(&units);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let table = tfidf_scores(&corpus, &vocab);
        assert!((table.score(0, "w") - 4.828313737302301).abs() <= 1e-12);
    }

    #[test]
    fn tfidf_everywhere_word_scores_zero() {
        let units: Vec<&[(&str, u64)]> = vec![&[("w", 2)]; 4];
        let corpus = corpus_from_units(&units);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let table = tfidf_scores(&corpus, &vocab);
        for u in 0..4 {
            assert_eq!(table.score(u, "w"), 0.0);
        }
    }

    #[test]
    fn tfidf_absent_word_scores_zero() {
        let corpus = corpus_from_units(&[&[("a", 1)], &[("b", 1)]]);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let table = tfidf_scores(&corpus, &vocab);
        assert_eq!(table.score(1, "a"), 0.0);
    }

    #[test]
    fn tfidf_order_independent_after_remap() {
        let units: Vec<&[(&str, u64)]> = vec![&[("a", 2), ("b", 1)], &[("b", 3)], &[("a", 1)]];
        let corpus = corpus_from_units(&units);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let table = tfidf_scores(&corpus, &vocab);

        let shuffled: Vec<&[(&str, u64)]> = vec![units[2], units[0], units[1]];
        let corpus2 = corpus_from_units(&shuffled);
        let table2 = tfidf_scores(&corpus2, &vocab);
        let remap = [1usize, 2, 0]; // original unit u sits at shuffled position remap[u]
        for (u, &pos) in remap.iter().enumerate() {
            for w in ["a", "b"] {
                assert_eq!(table.score(u, w), table2.score(pos, w));
            }
        }
    }

    #[test]
    fn haar_spike_hand_values() {
        // window [0,0,4,0], one level; reflection makes C_1(0) = 0
        let details = haar_atrous(&[0.0, 0.0, 4.0, 0.0], 1).unwrap();
        let c1 = &details[0];
        let q = 4.0 / std::f64::consts::SQRT_2;
        assert!((c1[0] - 0.0).abs() <= 1e-12);
        assert!((c1[1] - 0.0).abs() <= 1e-12);
        assert!((c1[2] - q).abs() <= 1e-12);
        assert!((c1[3] + q).abs() <= 1e-12);

        let energies = unit_energies(&details);
        for (got, expect) in energies.iter().zip([0.0, 0.0, 8.0, 8.0]) {
            assert!((got - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn haar_constant_window_has_zero_details() {
        let details = haar_atrous(&[5.0; 16], 4).unwrap();
        for level in &details {
            for &c in level {
                assert_eq!(c, 0.0);
            }
        }
    }

    #[test]
    fn haar_rejects_bad_inputs() {
        assert!(haar_atrous(&[1.0], 1).is_err());
        assert!(haar_atrous(&[1.0, 2.0], 0).is_err());
        assert!(haar_atrous(&[1.0, 2.0, 3.0, 4.0], 3).is_err());
    }

    #[test]
    fn spike_shift_equivariance_of_c1() {
        let h = 16;
        for p in 1..h - 1 {
            let mut w1 = vec![0.0; h];
            w1[p] = 1.0;
            let mut w2 = vec![0.0; h];
            w2[p + 1] = 1.0;
            let c1a = &haar_atrous(&w1, 1).unwrap()[0];
            let c1b = &haar_atrous(&w2, 1).unwrap()[0];
            for j in 0..h - 1 {
                assert!((c1a[j] - c1b[j + 1]).abs() <= 1e-12, "p={p} j={j}");
            }
        }
    }

    #[test]
    fn swe_two_equal_masses() {
        let swe = shannon_wavelet_entropy(&[8.0, 8.0, 0.0, 0.0]).unwrap();
        assert!((swe - std::f64::consts::LN_2).abs() <= 1e-12);
    }

    #[test]
    fn swe_single_mass_is_zero() {
        let swe = shannon_wavelet_entropy(&[0.0, 42.0, 0.0]).unwrap();
        assert_eq!(swe, 0.0);
    }

    #[test]
    fn swe_uniform_is_log_h() {
        let h = 8;
        let swe = shannon_wavelet_entropy(&vec![3.0; h]).unwrap();
        assert!((swe - (h as f64).ln()).abs() <= 1e-12);
    }

    #[test]
    fn swe_zero_energy_is_undefined() {
        assert_eq!(shannon_wavelet_entropy(&[0.0, 0.0]), None);
    }

    #[test]
    fn swe_score_cases() {
        assert!((swe_word_score(Some(1.2), Some(1.0)) - 0.2).abs() <= 1e-12);
        assert_eq!(swe_word_score(Some(0.9), Some(1.0)), 0.0);
        assert_eq!(swe_word_score(Some(1.2), Some(0.0)), 0.0);
        assert_eq!(swe_word_score(Some(1.2), None), 0.0);
        assert_eq!(swe_word_score(None, Some(1.0)), 0.0);
    }

    #[test]
    fn swe_params_levels() {
        assert_eq!(SweParams { window: 32 }.levels(), 5);
        assert_eq!(SweParams { window: 33 }.levels(), 5);
        assert_eq!(SweParams { window: 2 }.levels(), 1);
    }

    #[test]
    fn swe_undefined_before_window_fills() {
        let series = vec![1.0; 40];
        let params = SweParams { window: 32 };
        assert_eq!(swe_at_unit(&series, 30, &params).unwrap(), None);
        // constant window: zero energy, still undefined
        assert_eq!(swe_at_unit(&series, 35, &params).unwrap(), None);
    }

    #[test]
    fn swe_rankings_prefer_fresh_bursts() {
        // word "burst" becomes active late; word "steady" never changes
        let mut units: Vec<Vec<(&str, u64)>> = Vec::new();
        for u in 0..48 {
            let mut unit = vec![("steady", 5u64), ("filler", 1)];
            if (40..44).contains(&u) {
                unit.push(("burst", 9));
            }
            if u % 7 == 0 {
                unit.push(("burst", 1));
            }
            units.push(unit);
        }
        let refs: Vec<&[(&str, u64)]> = units.iter().map(|u| u.as_slice()).collect();
        let corpus = corpus_from_units(&refs);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let table = tfidf_scores(&corpus, &vocab);
        let rankings = swe_rankings(&table, &vocab, &SweParams { window: 16 }).unwrap();
        let at_burst = &rankings[41];
        assert_eq!(at_burst.entries[0].0, "burst");
        assert!(at_burst.entries[0].1 > 0.0);
    }

    proptest! {
        #[test]
        fn swe_bounded_by_log_window(values in proptest::collection::vec(0f64..10.0, 16)) {
            let details = haar_atrous(&values, 4).unwrap();
            let energies = unit_energies(&details);
            if let Some(swe) = shannon_wavelet_entropy(&energies) {
                prop_assert!(swe >= -1e-12);
                prop_assert!(swe <= (16f64).ln() + 1e-12);
            }
        }

        #[test]
        fn swe_invariant_under_positive_scaling(
            values in proptest::collection::vec(-5f64..5.0, 16),
            scale in 0.01f64..100.0,
        ) {
            let e1 = unit_energies(&haar_atrous(&values, 4).unwrap());
            let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
            let e2 = unit_energies(&haar_atrous(&scaled, 4).unwrap());
            match (shannon_wavelet_entropy(&e1), shannon_wavelet_entropy(&e2)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9),
                (None, None) => {}
                _ => prop_assert!(false, "definedness must be scale-invariant"),
            }
        }
    }
}
