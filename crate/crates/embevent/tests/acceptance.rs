//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see the lines for passing tests).

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use embevent::baselines::{
    haar_atrous, shannon_wavelet_entropy, swe_word_score, tfidf_scores, unit_energies,
};
use embevent::corpus::{bucket_documents, build_vocabulary, Document};
use embevent::embeddings::load_embedding_table;
use embevent::error::Result;
use embevent::eval::{evaluate, random_baseline_recall, recall_at_k, GroundTruth};
use embevent::event::{assemble_events, brute_force_events, sorted_events, AssemblerParams, Event};
use embevent::interval::{
    detect_abnormal_intervals, score_gap, AbnormalInterval, DetectorParams,
};
use embevent::pipeline::{
    generate_synthetic, run_pipeline, write_synthetic, PipelineConfig, PipelineInputs, SynthSpec,
};
use embevent::randomness::{rvn_null_variance, rvn_statistic, BartelsRvn, NormalityTest};
use embevent::scoring::{
    dimension_deviation, event_word_score, read_rankings_tsv, time_unit_word_scores,
    EventDeviation, RankedWords, ScoreScope,
};

fn jaccard(a: (usize, usize), b: (usize, usize)) -> f64 {
    let inter_lo = a.0.max(b.0);
    let inter_hi = a.1.min(b.1);
    if inter_hi < inter_lo {
        return 0.0;
    }
    let inter = (inter_hi - inter_lo + 1) as f64;
    let union = ((a.1 - a.0 + 1) + (b.1 - b.0 + 1)) as f64 - inter;
    inter / union
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_rvn_exact_values() {
    let start = Instant::now();
    let rvn_up = rvn_statistic(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap().unwrap();
    let rvn_mix = rvn_statistic(&[5.0, 1.0, 4.0, 2.0, 3.0]).unwrap().unwrap();
    let var_ok = (rvn_null_variance(5) - 0.53).abs() <= 1e-15;
    let p = BartelsRvn::new(2)
        .score(&[1.0, 2.0, 3.0, 4.0, 5.0])
        .unwrap()
        .p_value;
    let pass = (rvn_up - 0.4).abs() <= 1e-12
        && (rvn_mix - 3.0).abs() <= 1e-12
        && var_ok
        && (p - 0.0279).abs() <= 1e-3;
    report(
        "1",
        pass,
        &format!(
            "RVN(1..5)={rvn_up}, RVN(5,1,4,2,3)={rvn_mix}, p(n=5)={p:.6} ({:?})",
            start.elapsed()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_calibration() {
    let start = Instant::now();
    let test = BartelsRvn::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_CA11);
    let trials = 10_000;
    let mut rejections = 0usize;
    for _ in 0..trials {
        let seq: Vec<f64> = (0..50).map(|_| rng.sample(StandardNormal)).collect();
        if test.score(&seq).unwrap().p_value < 0.05 {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / trials as f64;
    let pass = (0.04..=0.06).contains(&rate);
    report(
        "2",
        pass,
        &format!("rejection rate {rate:.4} over {trials} sequences ({:?})", start.elapsed()),
    );
    assert!(pass);
}

/// Planted-anomaly recovery exactly as stated: length 500, unit-variance
/// Gaussian noise, +5 sigma over 20 units, k_min=5, k_max=50, delta=0.5,
/// requiring exactly one interval at Jaccard >= 0.6 in at least 95 of 100
/// seeded runs.
///
/// This criterion does not hold for this algorithm with a p-value score:
/// on i.i.d. noise the remainder's p-value is uniform on (0,1), so the
/// delta = 0.5 margin triggers on roughly a coin flip per run (all
/// candidate removals are nearly perfectly correlated), and when it does
/// trigger, the largest-end rule overshoots the 20-unit window toward
/// k_max = 50, capping the Jaccard overlap near 0.4. The test runs the
/// stated protocol and reports the observed count.
#[test]
fn criterion_3_planted_anomaly_recovery() {
    let start = Instant::now();
    let params = DetectorParams {
        k_min: 5,
        k_max: 50,
        delta: 0.5,
        min_context: 10,
    };
    let test = BartelsRvn::default();
    let planted = (240usize, 259usize);
    let runs: u64 = 100;
    // runs are independent; spread them over threads to stay inside the
    // stated runtime budget
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get() as u64);
    let mut outcomes: Vec<(bool, Option<f64>)> = Vec::with_capacity(runs as usize);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let params = &params;
            let test = &test;
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                for run in (w..runs).step_by(workers as usize) {
                    let mut rng = ChaCha8Rng::seed_from_u64(3000 + run);
                    let mut series: Vec<f64> =
                        (0..500).map(|_| rng.sample(StandardNormal)).collect();
                    for v in series[planted.0..=planted.1].iter_mut() {
                        *v += 5.0;
                    }
                    let found = detect_abnormal_intervals(&series, 0, params, test).unwrap();
                    let best = found
                        .iter()
                        .map(|iv| jaccard((iv.start, iv.end), planted))
                        .fold(f64::NEG_INFINITY, f64::max);
                    let success = found.len() == 1
                        && jaccard((found[0].start, found[0].end), planted) >= 0.6;
                    out.push((success, if found.is_empty() { None } else { Some(best) }));
                }
                out
            }));
        }
        for h in handles {
            outcomes.extend(h.join().expect("worker panicked"));
        }
    });
    let successes = outcomes.iter().filter(|(s, _)| *s).count();
    let detected = outcomes.iter().filter(|(_, j)| j.is_some()).count();
    let best_jaccards: Vec<f64> = outcomes.iter().filter_map(|(_, j)| *j).collect();
    let mean_j = if best_jaccards.is_empty() {
        0.0
    } else {
        best_jaccards.iter().sum::<f64>() / best_jaccards.len() as f64
    };
    let pass = successes >= 95;
    report(
        "3",
        pass,
        &format!(
            "{successes}/{runs} runs with exactly one interval at Jaccard >= 0.6 \
             (any detection: {detected}/{runs}, mean best Jaccard when detected: {mean_j:.3}) ({:?})",
            start.elapsed()
        ),
    );
    assert!(
        pass,
        "planted-anomaly recovery: {successes}/{runs} < 95; see the detector \
         documentation for why a delta of 0.5 over a uniform remainder p-value \
         cannot clear this bar"
    );
}

#[test]
fn criterion_4_detector_bounds() {
    let start = Instant::now();
    let test = BartelsRvn::default();

    // delta = 1.0: gap <= 1 and the comparison is strict
    let params = DetectorParams {
        k_min: 5,
        k_max: 20,
        delta: 1.0,
        min_context: 10,
    };
    let mut all_empty = true;
    let mut rng = ChaCha8Rng::seed_from_u64(0x4_B0DD5);
    for _ in 0..50 {
        let series: Vec<f64> = (0..120).map(|_| rng.sample(StandardNormal)).collect();
        if !detect_abnormal_intervals(&series, 0, &params, &test)
            .unwrap()
            .is_empty()
        {
            all_empty = false;
        }
    }

    // exhaustive candidate sweep of a length-100 series: the passing sets
    // must be nested as delta grows
    let mut series: Vec<f64> = (0..100).map(|_| rng.sample(StandardNormal)).collect();
    for v in series[40..=49].iter_mut() {
        *v += 6.0;
    }
    let (k_min, k_max, ctx) = (5usize, 20usize, 10usize);
    let mut gaps = Vec::new();
    for i in 0..100 {
        for j in (i + k_min)..=(i + k_max).min(99) {
            if 100 - (j - i + 1) < ctx {
                continue;
            }
            gaps.push(((i, j), score_gap(&series, i, j, &test).unwrap()));
        }
    }
    let passing = |delta: f64| -> BTreeSet<(usize, usize)> {
        gaps.iter()
            .filter(|(_, g)| *g > delta)
            .map(|(c, _)| *c)
            .collect()
    };
    let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut nested = true;
    for pair in grid.windows(2) {
        if !passing(pair[1]).is_subset(&passing(pair[0])) {
            nested = false;
        }
    }

    let pass = all_empty && nested;
    report(
        "4",
        pass,
        &format!(
            "delta=1 empty on 50 series: {all_empty}; monotone passing sets over {} candidates: {nested} ({:?})",
            gaps.len(),
            start.elapsed()
        ),
    );
    assert!(pass);
}

fn random_interval_instance(
    rng: &mut ChaCha8Rng,
    n_units: usize,
    n_dims: usize,
) -> Vec<Vec<AbnormalInterval>> {
    let mut sets = Vec::new();
    for d in 0..n_dims {
        let mut intervals = Vec::new();
        let mut u = 0usize;
        while u + 2 < n_units {
            if rng.gen_bool(0.35) {
                let len = rng.gen_range(1..=12usize);
                let end = (u + len).min(n_units - 1);
                intervals.push(AbnormalInterval {
                    dim: d,
                    start: u,
                    end,
                    gap: 1.0,
                });
                u = end + 2;
            } else {
                u += rng.gen_range(1..=5usize);
            }
        }
        sets.push(intervals);
    }
    sets
}

#[test]
fn criterion_5_assembler_differential() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5_D1FF);
    let mut mismatches = 0usize;
    let cases = 200;
    for _ in 0..cases {
        let n_units = rng.gen_range(10..=50usize);
        let n_dims = rng.gen_range(2..=8usize);
        let sets = random_interval_instance(&mut rng, n_units, n_dims);
        let params = AssemblerParams {
            k_min: rng.gen_range(1..=4),
            c_min: rng.gen_range(1..=3),
        };
        let fast = sorted_events(assemble_events(&sets, n_units, &params));
        let slow = sorted_events(brute_force_events(&sets, n_units, &params));
        if fast != slow {
            mismatches += 1;
        }
    }
    let pass = mismatches == 0;
    report(
        "5",
        pass,
        &format!("{mismatches} mismatches over {cases} seeded instances ({:?})", start.elapsed()),
    );
    assert!(pass);
}

#[test]
fn criterion_6_scoring_identities() -> Result<()> {
    let start = Instant::now();
    use embevent::embeddings::UnitVectorSeries;

    // deviation hand examples
    let step = UnitVectorSeries::from_rows(
        1,
        [0.0, 0.0, 3.0, 3.0, 3.0, 0.0].iter().map(|&v| vec![v]).collect(),
        vec![1; 6],
    )?;
    let ev = Event {
        start: 2,
        end: 4,
        dims: [0].into_iter().collect(),
    };
    let dev = dimension_deviation(&step, &ev)?;
    let dev_ok = (dev.dev[&0] - 3.0).abs() <= 1e-12;

    let flat = UnitVectorSeries::from_rows(1, vec![vec![7.0]; 6], vec![1; 6])?;
    let dev_flat = dimension_deviation(&flat, &ev)?;
    let flat_ok = dev_flat.dev[&0].abs() <= 1e-12;

    // event-score hand example: dims {0,1}, wv [0.5,-0.5], dev [3,1] -> 1.0
    let dv = EventDeviation {
        event: Event {
            start: 0,
            end: 1,
            dims: [0, 1].into_iter().collect(),
        },
        dev: [(0usize, 3.0), (1usize, 1.0)].into_iter().collect(),
    };
    let es_ok = (event_word_score(&[0.5, -0.5], &dv) - 1.0).abs() <= 1e-12;

    // time-score over two overlapping events: 1.0 + 0.3
    let table = load_embedding_table("a 1\nb 0.3".as_bytes())?;
    let docs = vec![Document {
        timestamp: chrono::DateTime::from_timestamp(0, 0).unwrap(),
        tokens: vec!["a".into(), "b".into()],
    }];
    let corpus = bucket_documents(docs, chrono::DateTime::from_timestamp(0, 0).unwrap(), 3600)?;
    let vocab = build_vocabulary(&corpus, 1)?;
    let dv1 = EventDeviation {
        event: Event { start: 0, end: 5, dims: [0].into_iter().collect() },
        dev: [(0usize, 1.0)].into_iter().collect(),
    };
    let dv2 = EventDeviation {
        event: Event { start: 3, end: 8, dims: [0].into_iter().collect() },
        dev: [(0usize, 0.3)].into_iter().collect(),
    };
    let ranked = time_unit_word_scores(&[dv1.clone(), dv2.clone()], &table, &vocab, 4, ScoreScope::Active);
    let a_score = ranked.entries.iter().find(|(w, _)| w == "a").unwrap().1;
    let ts_ok = (a_score - 1.3).abs() <= 1e-12;

    // linearity and additivity over random instances
    let mut rng = ChaCha8Rng::seed_from_u64(0x6_5C0);
    let mut lin_ok = true;
    let mut add_ok = true;
    for _ in 0..100 {
        let wv: Vec<f64> = (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let base: std::collections::BTreeMap<usize, f64> =
            (0..4).map(|d| (d, rng.gen_range(-3.0..3.0))).collect();
        let scale = rng.gen_range(0.1..4.0);
        let scaled = base.iter().map(|(&d, &v)| (d, scale * v)).collect();
        let evd = Event { start: 0, end: 2, dims: (0..4).collect() };
        let s1 = event_word_score(&wv, &EventDeviation { event: evd.clone(), dev: base });
        let s2 = event_word_score(&wv, &EventDeviation { event: evd, dev: scaled });
        if (s2 - scale * s1).abs() > 1e-9 * s1.abs().max(1.0) {
            lin_ok = false;
        }

        // additivity: score with both events minus score with one equals
        // the second event's own contribution
        let unit = rng.gen_range(0..6usize);
        let mk = |lo: usize, hi: usize, d0: f64| EventDeviation {
            event: Event { start: lo, end: hi, dims: [0].into_iter().collect() },
            dev: [(0usize, d0)].into_iter().collect(),
        };
        let e1 = mk(0, 5, rng.gen_range(-2.0..2.0));
        let e2 = mk(rng.gen_range(0..3), rng.gen_range(3..6), rng.gen_range(-2.0..2.0));
        let both = time_unit_word_scores(&[e1.clone(), e2.clone()], &table, &vocab, unit, ScoreScope::Active);
        let only = time_unit_word_scores(&[e1], &table, &vocab, unit, ScoreScope::Active);
        for (w, s_both) in &both.entries {
            let s_one = only.entries.iter().find(|(w2, _)| w2 == w).unwrap().1;
            let contrib = if e2.event.contains(unit) {
                event_word_score(table.get(w).unwrap(), &e2)
            } else {
                0.0
            };
            if (s_both - (s_one + contrib)).abs() > 1e-12 {
                add_ok = false;
            }
        }
    }

    let pass = dev_ok && flat_ok && es_ok && ts_ok && lin_ok && add_ok;
    report(
        "6",
        pass,
        &format!(
            "dev={dev_ok}, flat={flat_ok}, event_score={es_ok}, time_score={ts_ok}, \
             linearity={lin_ok}, additivity={add_ok} ({:?})",
            start.elapsed()
        ),
    );
    assert!(pass);
    Ok(())
}

#[test]
fn criterion_7_baselines() -> Result<()> {
    let start = Instant::now();

    // tfidf hand value: tf=3, |D|=10, df=2 -> 3 ln 5
    let mut docs = Vec::new();
    for u in 0..10i64 {
        let mut tokens = vec!["x".to_string()];
        if u == 0 {
            tokens.extend(["w", "w", "w"].map(String::from));
        }
        if u == 5 {
            tokens.push("w".to_string());
        }
        docs.push(Document {
            timestamp: chrono::DateTime::from_timestamp(u * 3600, 0).unwrap(),
            tokens,
        });
    }
    let corpus = bucket_documents(docs, chrono::DateTime::from_timestamp(0, 0).unwrap(), 3600)?;
    let vocab = build_vocabulary(&corpus, 1)?;
    let tfidf = tfidf_scores(&corpus, &vocab);
    let tfidf_ok = (tfidf.score(0, "w") - 3.0 * 5f64.ln()).abs() <= 1e-12;

    // SWE bounds over 1000 random windows, h=32
    let mut rng = ChaCha8Rng::seed_from_u64(0x7_BA5E);
    let h = 32usize;
    let mut bounds_ok = true;
    for _ in 0..1000 {
        let window: Vec<f64> = (0..h).map(|_| rng.gen_range(0.0..10.0)).collect();
        let energies = unit_energies(&haar_atrous(&window, 5)?);
        if let Some(swe) = shannon_wavelet_entropy(&energies) {
            if !(-1e-12..=(h as f64).ln() + 1e-12).contains(&swe) {
                bounds_ok = false;
            }
        }
    }

    // exact entropy values
    let ln2_ok =
        (shannon_wavelet_entropy(&[8.0, 8.0, 0.0, 0.0]).unwrap() - 2f64.ln()).abs() <= 1e-12;
    let zero_ok = shannon_wavelet_entropy(&[0.0, 5.0, 0.0, 0.0]).unwrap().abs() <= 1e-12;

    // spike-shift equivariance of the energy pattern on interior positions
    // of an h=32 window (interior: reflections never reach the spike)
    let levels = 5usize;
    let interior_lo = 1usize << (levels - 1);
    let mut shift_ok = true;
    for p in interior_lo..h - 1 {
        let mut w1 = vec![0.0; h];
        w1[p] = 1.0;
        let mut w2 = vec![0.0; h];
        w2[p + 1] = 1.0;
        let e1 = unit_energies(&haar_atrous(&w1, levels)?);
        let e2 = unit_energies(&haar_atrous(&w2, levels)?);
        for j in 0..h - 1 {
            if (e1[j] - e2[j + 1]).abs() > 1e-12 {
                shift_ok = false;
            }
        }
    }

    // degenerate swe_word_score branches
    let score_ok = (swe_word_score(Some(1.2), Some(1.0)) - 0.2).abs() <= 1e-12
        && swe_word_score(Some(0.8), Some(1.0)) == 0.0
        && swe_word_score(Some(1.0), Some(0.0)) == 0.0;

    let pass = tfidf_ok && bounds_ok && ln2_ok && zero_ok && shift_ok && score_ok;
    report(
        "7",
        pass,
        &format!(
            "tfidf={tfidf_ok}, swe_bounds={bounds_ok}, ln2={ln2_ok}, spike_zero={zero_ok}, \
             shift_equivariance={shift_ok}, swe_score={score_ok} ({:?})",
            start.elapsed()
        ),
    );
    assert!(pass);
    Ok(())
}

#[test]
fn criterion_8_evaluation() -> Result<()> {
    let start = Instant::now();
    let vocab_size = 8267usize;
    let k = 20usize;

    let exact = random_baseline_recall(k, vocab_size)?;
    let exact_ok = (exact - 0.0024193).abs() <= 1e-7;

    // empirical recall of seeded random rankings over 2000 units: the
    // top-k of a uniformly random permutation is a uniform ordered subset
    let mut rng = ChaCha8Rng::seed_from_u64(0x8_3147);
    let units = 2000usize;
    let mut pool: Vec<usize> = (0..vocab_size).collect();
    let mut draw = |rng: &mut ChaCha8Rng, take: usize, pool: &mut Vec<usize>| -> Vec<usize> {
        for i in 0..take {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        pool[..take].to_vec()
    };
    let mut total = 0.0;
    for u in 0..units {
        let truth: BTreeSet<String> = draw(&mut rng, k, &mut pool)
            .into_iter()
            .map(|i| format!("w{i}"))
            .collect();
        let top: Vec<(String, f64)> = draw(&mut rng, k, &mut pool)
            .into_iter()
            .enumerate()
            .map(|(rank, i)| (format!("w{i}"), -(rank as f64)))
            .collect();
        let ranked = RankedWords { unit: u, entries: top };
        total += recall_at_k(&ranked, &truth, k)?;
    }
    let empirical = total / units as f64;
    let empirical_ok = (empirical - exact).abs() <= 0.2 * exact;

    // Recall@K monotone in K on full random rankings
    let mut monotone_ok = true;
    for u in 0..50 {
        let perm = draw(&mut rng, vocab_size, &mut pool);
        let ranked = RankedWords {
            unit: u,
            entries: perm
                .into_iter()
                .enumerate()
                .map(|(rank, i)| (format!("w{i}"), -(rank as f64)))
                .collect(),
        };
        let truth: BTreeSet<String> = draw(&mut rng, k, &mut pool)
            .into_iter()
            .map(|i| format!("w{i}"))
            .collect();
        let mut last = 0.0;
        for kk in [20, 50, 100, 150, 200, 1000, vocab_size] {
            let r = recall_at_k(&ranked, &truth, kk)?;
            if r < last - 1e-15 {
                monotone_ok = false;
            }
            last = r;
        }
        if (last - 1.0).abs() > 1e-15 {
            monotone_ok = false; // recall at K = |W| must be 1
        }
    }

    let pass = exact_ok && empirical_ok && monotone_ok;
    report(
        "8",
        pass,
        &format!(
            "K/|W|={exact:.7}, empirical={empirical:.7} (target ±20%), monotone={monotone_ok} ({:?})",
            start.elapsed()
        ),
    );
    assert!(pass);
    Ok(())
}

#[test]
fn criterion_9_end_to_end_synthetic_recovery() -> Result<()> {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("data");
    let out_dir = dir.path().join("out");
    let (docs, vectors, news) = write_synthetic(&data_dir, 42)?;

    let config = PipelineConfig::default();
    let artifacts = run_pipeline(
        &config,
        &PipelineInputs {
            docs,
            vectors,
            news: Some(news),
        },
        &out_dir,
    )?;

    let events = embevent::event::read_events_json(&artifacts.events)?;
    let planted = (80usize, 99usize);
    let best = events
        .iter()
        .map(|e| (jaccard((e.start, e.end), planted), e))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let (best_j, best_event) = match best {
        Some((j, e)) => (j, Some(e)),
        None => (0.0, None),
    };
    let event_ok = best_j >= 0.5;

    // at least 5 of the 10 planted words in the top-10 of every unit
    // inside the detected event
    let spec = SynthSpec::default();
    let planted_words: BTreeSet<String> = spec.burst_words().into_iter().collect();
    let rankings = read_rankings_tsv(&artifacts.rankings)?;
    let mut ranking_ok = best_event.is_some();
    if let Some(event) = best_event {
        for u in event.start..=event.end {
            let ranked = rankings.iter().find(|r| r.unit == u);
            let hits = match ranked {
                Some(r) => r
                    .top_words(10)
                    .iter()
                    .filter(|w| planted_words.contains(**w))
                    .count(),
                None => 0,
            };
            if hits < 5 {
                ranking_ok = false;
            }
        }
    }

    // sanity on the synthetic generator itself
    let synth = generate_synthetic(&spec, 42)?;
    assert_eq!(synth.docs.len(), 200);

    let elapsed = start.elapsed();
    let runtime_ok = elapsed.as_secs() < 60;
    let pass = event_ok && ranking_ok && runtime_ok;
    report(
        "9",
        pass,
        &format!(
            "events={}, best Jaccard={best_j:.3} vs [80,99], planted words in top-10: {ranking_ok}, runtime {elapsed:?}",
            events.len()
        ),
    );

    // evaluation path also produced reports
    assert!(!artifacts.reports.is_empty());
    assert!(pass);
    Ok(())
}

/// Companion to criterion 3: the same planted anomaly in the regime the
/// detector is built for — a stable baseline, and an interval budget
/// proportionate to the anomaly (k_max 25 against a 20-unit window).
/// Recovery is then deterministic. Criterion 3 fails for two reasons this
/// test removes: a delta of 0.5 cannot reliably clear a uniform remainder
/// p-value on i.i.d. noise, and k_max = 50 makes the largest-end rule
/// overshoot a 20-unit window to a Jaccard near 0.4.
#[test]
fn criterion_3_companion_stable_baseline_recovery() {
    let start = Instant::now();
    let params = DetectorParams {
        k_min: 5,
        k_max: 25,
        delta: 0.5,
        min_context: 10,
    };
    let test = BartelsRvn::default();
    let planted = (240usize, 259usize);
    let runs = 100;
    let mut successes = 0usize;
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + run);
        // stable baseline: constant discussion level with the planted shift
        let mut series = vec![0.0f64; 500];
        let shift = 5.0 + rng.gen_range(0.0..1.0);
        for v in series[planted.0..=planted.1].iter_mut() {
            *v += shift;
        }
        let found = detect_abnormal_intervals(&series, 0, &params, &test).unwrap();
        if found.len() == 1 && jaccard((found[0].start, found[0].end), planted) >= 0.6 {
            successes += 1;
        }
    }
    let pass = successes >= 95;
    report(
        "3-companion",
        pass,
        &format!("{successes}/{runs} stable-baseline recoveries ({:?})", start.elapsed()),
    );
    assert!(pass);
}

/// The evaluation report machinery end to end on a small synthetic truth.
#[test]
fn evaluation_report_self_consistency() -> Result<()> {
    let truth = GroundTruth::from_sets(vec![
        ["a", "b"].iter().map(|s| s.to_string()).collect(),
        BTreeSet::new(),
        ["c"].iter().map(|s| s.to_string()).collect(),
    ]);
    let rankings = vec![
        RankedWords { unit: 0, entries: vec![("a".into(), 2.0), ("x".into(), 1.0), ("b".into(), 0.5)] },
        RankedWords { unit: 2, entries: vec![("c".into(), 1.0)] },
    ];
    let rep = evaluate("event", &rankings, &truth, &[1, 2, 3])?;
    assert_eq!(rep.units, 2);
    assert_eq!(rep.units_skipped, 1);
    assert_eq!(rep.recall["1"], (0.5 + 1.0) / 2.0);
    assert_eq!(rep.recall["3"], 1.0);
    Ok(())
}
