//! Loading a word-vector table and turning a corpus into the per-unit
//! average-embedding series.

use chrono::{Duration, TimeZone, Utc};
use embevent::{bucket_documents, build_unit_series, load_embedding_table, Document};

fn main() -> embevent::Result<()> {
    // the usual text format: optional "<count> <dim>" header, then one
    // word per line
    let vectors = "\
4 3
storm   0.9  0.1 -0.2
rain    0.8  0.2 -0.1
game    -0.5 0.7  0.3
match   -0.4 0.8  0.2
";
    let table = load_embedding_table(vectors.as_bytes())?;
    println!("loaded {} vectors of dimension {}", table.len(), table.dim());

    let origin = Utc.with_ymd_and_hms(2020, 6, 1, 0, 0, 0).unwrap();
    let docs = vec![
        Document {
            timestamp: origin,
            tokens: ["storm", "rain", "rain"].map(String::from).to_vec(),
        },
        Document {
            timestamp: origin + Duration::hours(1),
            tokens: ["game", "match", "unseen_word"].map(String::from).to_vec(),
        },
        Document {
            timestamp: origin + Duration::hours(3), // unit 2 stays empty
            tokens: ["storm", "game"].map(String::from).to_vec(),
        },
    ];
    let corpus = bucket_documents(docs, origin, 3600)?;
    let series = build_unit_series(&corpus, &table)?;

    for u in 0..series.n_units() {
        println!(
            "unit {u}: coverage {:>2}  vector {:?}",
            series.coverage(u),
            series.row(u).iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>()
        );
    }

    // token multiplicity weights the average: unit 0 is (storm + 2*rain)/3
    let expect0 = (0.9 + 2.0 * 0.8) / 3.0;
    assert!((series.row(0)[0] - expect0).abs() < 1e-12);
    // out-of-vocabulary tokens are skipped but leave coverage visible
    assert_eq!(series.coverage(1), 2);
    // an empty unit is the zero vector with zero coverage
    assert_eq!(series.row(2), &[0.0, 0.0, 0.0]);
    Ok(())
}
