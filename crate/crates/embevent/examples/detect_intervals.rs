//! Finding the largest interval whose removal makes the rest of a series
//! look random again.
//!
//! The series here is a stable discussion level with a burst planted at
//! units 60..=74. Removing a window that covers the burst leaves a
//! near-constant remainder with a p-value close to 1, while the full
//! series scores close to 0, so the gap clears the margin.

use embevent::randomness::BartelsRvn;
use embevent::{detect_abnormal_intervals, score_gap, DetectorParams};

fn main() -> embevent::Result<()> {
    let mut series = vec![1.0; 160];
    for v in series[60..75].iter_mut() {
        *v = 4.5;
    }

    let test = BartelsRvn::default();
    let params = DetectorParams {
        k_min: 5,
        k_max: 20,
        delta: 0.5,
        min_context: 10,
    };

    // what the detector compares, for a few hand-picked windows
    for (start, end) in [(10usize, 25usize), (60, 74), (58, 78)] {
        let gap = score_gap(&series, start, end, &test)?;
        println!("removing [{start:>3}, {end:>3}] improves the randomness score by {gap:+.4}");
    }

    let found = detect_abnormal_intervals(&series, 0, &params, &test)?;
    println!("\ndetected intervals:");
    for iv in &found {
        println!(
            "  dim {} [{}, {}] (span {}, gap {:.4})",
            iv.dim,
            iv.start,
            iv.end,
            iv.len(),
            iv.gap
        );
    }

    assert_eq!(found.len(), 1);
    let iv = &found[0];
    assert!(iv.start <= 60 && iv.end >= 73, "covers the planted burst");
    assert!(iv.gap > params.delta);
    Ok(())
}
