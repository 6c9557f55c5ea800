//! The two comparison methods: per-unit tf-idf and the Shannon wavelet
//! entropy increase score.

use chrono::{Duration, TimeZone, Utc};
use embevent::baselines::{
    haar_atrous, shannon_wavelet_entropy, swe_rankings, tfidf_scores, unit_energies, SweParams,
};
use embevent::{bucket_documents, build_vocabulary, Document};

fn main() -> embevent::Result<()> {
    // 48 hourly units; "surge" bursts at units 40..=43, "steady" never moves
    let origin = Utc.with_ymd_and_hms(2020, 6, 1, 0, 0, 0).unwrap();
    let mut docs = Vec::new();
    for u in 0..48i64 {
        let mut tokens = vec!["steady".to_string(); 5];
        tokens.push("filler".to_string());
        if (40..44).contains(&u) {
            tokens.extend(vec!["surge".to_string(); 9]);
        }
        if u % 7 == 0 {
            tokens.push("surge".to_string());
        }
        docs.push(Document {
            timestamp: origin + Duration::hours(u),
            tokens,
        });
    }
    let corpus = bucket_documents(docs, origin, 3600)?;
    let vocab = build_vocabulary(&corpus, 1)?;

    // --- tf-idf ---
    let tfidf = tfidf_scores(&corpus, &vocab);
    println!("tf-idf at unit 41:");
    println!("  surge  = {:.4}", tfidf.score(41, "surge"));
    println!("  steady = {:.4}  (appears everywhere, idf = 0)", tfidf.score(41, "steady"));
    assert!(tfidf.score(41, "surge") > 0.0);
    assert_eq!(tfidf.score(41, "steady"), 0.0);

    // --- the wavelet machinery on a toy window ---
    let window = [0.0, 0.0, 4.0, 0.0];
    let details = haar_atrous(&window, 1)?;
    let energies = unit_energies(&details);
    println!("\nspike window {window:?}: detail {:?}", details[0]);
    println!("per-unit energies {energies:?}");
    let swe = shannon_wavelet_entropy(&energies).unwrap();
    println!("entropy = {swe:.5} (= ln 2: two equal energy masses)");
    assert!((swe - std::f64::consts::LN_2).abs() < 1e-12);

    // --- the full SWE ranking ---
    let rankings = swe_rankings(&tfidf, &vocab, &SweParams { window: 16 })?;
    let at_burst = &rankings[41];
    println!("\nSWE ranking at unit 41:");
    for (word, score) in at_burst.entries.iter().take(3) {
        println!("  {word:<7} {score:+.4}");
    }
    assert_eq!(at_burst.entries[0].0, "surge");
    assert!(at_burst.entries[0].1 > 0.0);
    Ok(())
}
