//! Ground truth from a reference corpus and Recall@K of a ranking.

use std::collections::BTreeSet;

use chrono::{Duration, TimeZone, Utc};
use embevent::scoring::RankedWords;
use embevent::{
    bucket_documents, evaluate, generate_ground_truth, random_baseline_recall, recall_at_k,
    Document,
};

fn main() -> embevent::Result<()> {
    // a reference stream of headlines over three hours
    let origin = Utc.with_ymd_and_hms(2020, 6, 1, 0, 0, 0).unwrap();
    let headlines: Vec<(i64, Vec<&str>)> = vec![
        (0, vec!["storm", "storm", "flood", "coast"]),
        (1, vec!["storm", "cleanup", "coast"]),
        (2, vec!["match", "final", "score", "score"]),
    ];
    let docs = headlines
        .into_iter()
        .map(|(h, tokens)| Document {
            timestamp: origin + Duration::hours(h),
            tokens: tokens.into_iter().map(String::from).collect(),
        })
        .collect::<Vec<_>>();
    let news = bucket_documents(docs, origin, 3600)?;
    let truth = generate_ground_truth(&news, 2)?;
    for u in 0..truth.n_units() {
        println!("unit {u} ground truth: {:?}", truth.unit(u));
    }

    // a method's ranking for unit 0 against that unit's truth
    let ranked = RankedWords {
        unit: 0,
        entries: vec![
            ("storm".into(), 0.9),
            ("election".into(), 0.5),
            ("flood".into(), 0.4),
            ("coast".into(), 0.1),
        ],
    };
    for k in [1, 2, 3] {
        println!("recall@{k} = {:.3}", recall_at_k(&ranked, truth.unit(0), k)?);
    }

    let report = evaluate("demo", &[ranked], &truth, &[1, 2, 3])?;
    println!(
        "mean over {} unit(s) (skipped {}): {:?}",
        report.units, report.units_skipped, report.recall
    );

    // what a random ranker would get with a 10,000-word candidate set
    println!(
        "random baseline at K=20, |W|=10000: {:.5}",
        random_baseline_recall(20, 10_000)?
    );

    let truth0: &BTreeSet<String> = truth.unit(0);
    assert!(truth0.contains("storm"));
    assert_eq!(recall_at_k(&RankedWords { unit: 0, entries: vec![] }, truth0, 5)?, 0.0);
    Ok(())
}
