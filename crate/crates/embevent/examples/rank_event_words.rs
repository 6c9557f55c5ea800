//! From a detected event back to words: per-dimension deviations, event
//! scores, and the per-unit ranking.

use chrono::{Duration, TimeZone, Utc};
use embevent::embeddings::UnitVectorSeries;
use embevent::{
    bucket_documents, build_vocabulary, dimension_deviation, event_word_score,
    load_embedding_table, time_unit_word_scores, Document, Event, ScoreScope,
};

fn main() -> embevent::Result<()> {
    // dimension 0 jumps during units 4..=7; dimension 1 dips
    let mut rows = vec![vec![0.1, 0.5]; 12];
    for row in rows[4..=7].iter_mut() {
        *row = vec![0.9, -0.1];
    }
    let series = UnitVectorSeries::from_rows(2, rows, vec![10; 12])?;

    let event = Event {
        start: 4,
        end: 7,
        dims: [0, 1].into_iter().collect(),
    };
    let deviation = dimension_deviation(&series, &event)?;
    println!("per-dimension deviations (inside mean - outside mean):");
    for (dim, dev) in &deviation.dev {
        println!("  d{dim}: {dev:+.3}");
    }

    let table = load_embedding_table(
        "flood 0.9 -0.3\nstorm 0.8 -0.2\ncalm -0.6 0.4\nlunch 0.0 0.1".as_bytes(),
    )?;
    for word in ["flood", "storm", "calm", "lunch"] {
        let score = event_word_score(table.get(word).unwrap(), &deviation);
        println!("event score {word:<6} = {score:+.4}");
    }

    // the per-unit ranking sums scores over the events active at the unit
    let origin = Utc.with_ymd_and_hms(2020, 6, 1, 0, 0, 0).unwrap();
    let docs = (0..12)
        .map(|u| Document {
            timestamp: origin + Duration::hours(u),
            tokens: ["flood", "storm", "calm", "lunch"].map(String::from).to_vec(),
        })
        .collect::<Vec<_>>();
    let corpus = bucket_documents(docs, origin, 3600)?;
    let vocab = build_vocabulary(&corpus, 1)?;

    let inside = time_unit_word_scores(&[deviation.clone()], &table, &vocab, 5, ScoreScope::Active);
    let outside = time_unit_word_scores(&[deviation], &table, &vocab, 1, ScoreScope::Active);
    println!("\nranking at unit 5 (inside the event):");
    for (word, score) in &inside.entries {
        println!("  {word:<6} {score:+.4}");
    }

    assert_eq!(inside.entries[0].0, "flood");
    assert!(inside.entries[0].1 > 0.0);
    // outside the event nothing is active: all scores zero, ties broken
    // lexicographically
    assert!(outside.entries.iter().all(|(_, s)| *s == 0.0));
    assert_eq!(outside.entries[0].0, "calm");
    Ok(())
}
