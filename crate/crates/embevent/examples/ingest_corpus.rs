//! Bucketing time-stamped documents into fixed-length units and building a
//! frequency-thresholded vocabulary.

use chrono::{Duration, TimeZone, Utc};
use embevent::{bucket_documents, build_vocabulary, Document};

fn main() -> embevent::Result<()> {
    let origin = Utc.with_ymd_and_hms(2020, 6, 1, 0, 0, 0).unwrap();

    // a tiny stream: three hours of chatter plus one straggler from before
    // the collection window
    let docs = vec![
        Document {
            timestamp: origin + Duration::minutes(5),
            tokens: ["election", "debate", "debate"].map(String::from).to_vec(),
        },
        Document {
            timestamp: origin + Duration::minutes(61),
            tokens: ["debate", "weather"].map(String::from).to_vec(),
        },
        Document {
            timestamp: origin + Duration::hours(1), // exactly on the boundary: unit 1
            tokens: ["election"].map(String::from).to_vec(),
        },
        Document {
            timestamp: origin + Duration::minutes(150),
            tokens: ["weather", "weather", "debate"].map(String::from).to_vec(),
        },
        Document {
            timestamp: origin - Duration::minutes(1), // before origin: dropped
            tokens: ["noise"].map(String::from).to_vec(),
        },
    ];

    let corpus = bucket_documents(docs, origin, 3600)?;
    println!(
        "{} units of {}s, {} document(s) dropped",
        corpus.n_units(),
        corpus.unit_length_secs(),
        corpus.dropped()
    );
    for u in 0..corpus.n_units() {
        println!("unit {u}: {:?}", corpus.unit(u));
    }

    let vocab = build_vocabulary(&corpus, 2)?;
    let words: Vec<&str> = vocab.words().collect();
    println!("vocabulary (count >= 2): {words:?}");

    assert_eq!(corpus.n_units(), 3);
    assert_eq!(corpus.dropped(), 1);
    assert_eq!(corpus.tf(1, "election"), 1); // boundary document lands in unit 1
    assert!(vocab.contains("debate") && !vocab.contains("noise"));
    Ok(())
}
