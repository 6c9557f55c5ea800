//! The whole chain in memory on the bundled synthetic dataset: 50 words,
//! 8 embedding dimensions, 200 hourly units, with ten burst words whose
//! frequency triples over units 80..=99.

use std::collections::BTreeSet;

use embevent::event::sorted_events;
use embevent::pipeline::{generate_synthetic, SynthSpec};
use embevent::randomness::BartelsRvn;
use embevent::{
    assemble_events, bucket_documents, build_unit_series, build_vocabulary, dimension_deviation,
    time_unit_word_scores, AssemblerParams, DetectorParams, ScoreScope,
};
use embevent::interval::{detect_all_dimensions, group_by_dim};

fn main() -> embevent::Result<()> {
    let spec = SynthSpec::default();
    let data = generate_synthetic(&spec, 42)?;
    println!(
        "synthetic corpus: {} units, {} words, planted burst over [{}, {}]",
        spec.n_units,
        spec.n_background + spec.n_burst,
        spec.event_start,
        spec.event_end
    );

    let corpus = bucket_documents(data.docs, spec.origin(), 3600)?;
    let vocab = build_vocabulary(&corpus, 500)?;
    let series = build_unit_series(&corpus, &data.table)?;

    let test = BartelsRvn::default();
    let params = DetectorParams::default();
    let intervals = detect_all_dimensions(&series, &params, &test)?;
    println!("\nabnormal intervals per dimension:");
    for iv in &intervals {
        println!("  d{} [{}, {}] gap {:.3}", iv.dim, iv.start, iv.end, iv.gap);
    }

    let sets = group_by_dim(&intervals, series.dim());
    let events = sorted_events(assemble_events(
        &sets,
        series.n_units(),
        &AssemblerParams::default(),
    ));
    assert!(!events.is_empty(), "the planted burst must surface as an event");
    let event = &events[0];
    println!(
        "\nevent: units [{}, {}] across {} dimensions",
        event.start,
        event.end,
        event.dims.len()
    );

    let deviation = dimension_deviation(&series, event)?;
    let ranked = time_unit_word_scores(
        &[deviation],
        &data.table,
        &vocab,
        event.start + 1,
        ScoreScope::Active,
    );
    println!("\ntop words inside the event:");
    for (word, score) in ranked.entries.iter().take(12) {
        println!("  {word:<8} {score:+.4}");
    }

    let planted: BTreeSet<String> = spec.burst_words().into_iter().collect();
    let hits = ranked
        .top_words(10)
        .iter()
        .filter(|w| planted.contains(**w))
        .count();
    println!("\n{hits}/10 of the top-10 words are planted burst words");
    assert!(hits >= 5);
    assert!(event.start <= spec.event_start + 5 && event.end >= spec.event_end - 5);
    Ok(())
}
