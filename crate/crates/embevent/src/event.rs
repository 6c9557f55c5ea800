//! Folding per-dimension abnormal intervals into multi-dimension events.
//!
//! The assembler sweeps the unit index once, tracking "halfway" events: an
//! open event is a start time plus the set of dimensions still jointly
//! abnormal. At each step a halfway event either continues with the
//! dimensions that remain abnormal, splits off a finished event for the
//! dimensions that dropped out, or finishes entirely. Dimensions that are
//! abnormal but unclaimed open a new halfway event when there are enough of
//! them. A dimension that drops out of an event never rejoins it.
//!
//! A finished event's end index is the last unit where its dimensions were
//! jointly flagged (one before the unit that ended it), and halfway events
//! still open when the sweep runs off the series are finished at the last
//! unit under the same emission thresholds. Both length and dimension-count
//! thresholds are strict.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::AbnormalInterval;

/// Assembler parameters: emitted events must satisfy
/// `length > k_min` and `|dims| > c_min`, strictly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblerParams {
    pub k_min: usize,
    pub c_min: usize,
}

impl Default for AssemblerParams {
    fn default() -> Self {
        Self { k_min: 3, c_min: 2 }
    }
}

/// A multi-dimension event: a time interval (inclusive unit indices) plus
/// the set of affected embedding dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub start: usize,
    pub end: usize,
    pub dims: BTreeSet<usize>,
}

impl Event {
    /// Event length in units (inclusive indices).
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn contains(&self, unit: usize) -> bool {
        self.start <= unit && unit <= self.end
    }
}

struct Halfway {
    start: usize,
    dims: BTreeSet<usize>,
}

fn emit_if_qualified(
    start: usize,
    end: usize,
    dims: BTreeSet<usize>,
    params: &AssemblerParams,
    events: &mut Vec<Event>,
) -> bool {
    let length = end + 1 - start;
    if length > params.k_min && dims.len() > params.c_min {
        events.push(Event { start, end, dims });
        true
    } else {
        false
    }
}

/// Sweep the per-dimension interval lists and emit multi-dimension events
/// in nondecreasing finish order.
pub fn assemble_events(
    interval_sets: &[Vec<AbnormalInterval>],
    n_units: usize,
    params: &AssemblerParams,
) -> Vec<Event> {
    let mut events = Vec::new();
    if n_units == 0 {
        return events;
    }
    // per-dimension cursor into its sorted interval list
    let mut cursors = vec![0usize; interval_sets.len()];
    let mut halfway: Vec<Halfway> = Vec::new();

    for u in 0..n_units {
        let mut current: BTreeSet<usize> = BTreeSet::new();
        for (d, set) in interval_sets.iter().enumerate() {
            let c = &mut cursors[d];
            while *c < set.len() && set[*c].end < u {
                *c += 1;
            }
            if *c < set.len() && set[*c].start <= u {
                current.insert(d);
            }
        }

        let mut claimed: BTreeSet<usize> = BTreeSet::new();
        let mut still_open = Vec::with_capacity(halfway.len());
        for half in halfway.drain(..) {
            let continuing: BTreeSet<usize> =
                half.dims.intersection(&current).copied().collect();
            if continuing.is_empty() {
                // nothing carries on: the whole event ended at u-1
                emit_if_qualified(half.start, u - 1, half.dims, params, &mut events);
                continue;
            }
            if continuing.len() > params.c_min {
                let dropped: BTreeSet<usize> =
                    half.dims.difference(&continuing).copied().collect();
                for &d in &continuing {
                    claimed.insert(d);
                }
                still_open.push(Halfway {
                    start: half.start,
                    dims: continuing,
                });
                if !dropped.is_empty() {
                    // the dropped dims share none with `current`, so emitting
                    // them claims nothing further
                    emit_if_qualified(half.start, u - 1, dropped, params, &mut events);
                }
            } else {
                // too few continuing dims: the event finishes with all its
                // dims; on emission the still-abnormal ones are claimed and
                // cannot seed a new event at this unit
                let overlap: BTreeSet<usize> = continuing;
                if emit_if_qualified(half.start, u - 1, half.dims, params, &mut events) {
                    for d in overlap {
                        claimed.insert(d);
                    }
                }
            }
        }
        halfway = still_open;

        let fresh: BTreeSet<usize> = current.difference(&claimed).copied().collect();
        if fresh.len() > params.c_min {
            halfway.push(Halfway {
                start: u,
                dims: fresh,
            });
        }
    }

    // end-of-series flush
    for half in halfway {
        emit_if_qualified(half.start, n_units - 1, half.dims, params, &mut events);
    }
    events
}

/// Differential-testing oracle: re-derive the events of small instances
/// directly from the `n_units x dims` boolean abnormality matrix.
///
/// This is an independent simulation of the same transition rules, written
/// against the rule statements rather than sharing code with
/// [`assemble_events`]. Intended for small instances (`n_units <= 64`,
/// `dims <= 8`).
pub fn brute_force_events(
    interval_sets: &[Vec<AbnormalInterval>],
    n_units: usize,
    params: &AssemblerParams,
) -> Vec<Event> {
    let n_dims = interval_sets.len();
    // abnormality matrix
    let mut abnormal = vec![vec![false; n_dims]; n_units];
    for (d, set) in interval_sets.iter().enumerate() {
        for iv in set {
            for u in iv.start..=iv.end.min(n_units.saturating_sub(1)) {
                abnormal[u][d] = true;
            }
        }
    }

    // open groups: (start_unit, member dims as a sorted list)
    let mut open: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut finished: Vec<Event> = Vec::new();

    let qualifies = |start: usize, end: usize, dims: &[usize]| -> bool {
        end + 1 - start > params.k_min && dims.len() > params.c_min
    };

    for u in 0..n_units {
        let active: Vec<usize> = (0..n_dims).filter(|&d| abnormal[u][d]).collect();
        let mut used = vec![false; n_dims];
        let mut surviving: Vec<(usize, Vec<usize>)> = Vec::new();

        for (start, members) in open {
            let alive: Vec<usize> = members
                .iter()
                .copied()
                .filter(|d| active.contains(d))
                .collect();
            if alive.is_empty() {
                // group ends wholesale at the previous unit
                if qualifies(start, u - 1, &members) {
                    finished.push(Event {
                        start,
                        end: u - 1,
                        dims: members.iter().copied().collect(),
                    });
                }
            } else if alive.len() > params.c_min {
                let gone: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|d| !alive.contains(d))
                    .collect();
                for &d in &alive {
                    used[d] = true;
                }
                surviving.push((start, alive));
                if !gone.is_empty() && qualifies(start, u - 1, &gone) {
                    finished.push(Event {
                        start,
                        end: u - 1,
                        dims: gone.iter().copied().collect(),
                    });
                }
            } else {
                // not enough survivors: whole group finishes; only when it is
                // actually emitted do its surviving dims stay claimed here
                if qualifies(start, u - 1, &members) {
                    finished.push(Event {
                        start,
                        end: u - 1,
                        dims: members.iter().copied().collect(),
                    });
                    for d in alive {
                        used[d] = true;
                    }
                }
            }
        }
        open = surviving;

        let unclaimed: Vec<usize> = active.into_iter().filter(|&d| !used[d]).collect();
        if unclaimed.len() > params.c_min {
            open.push((u, unclaimed));
        }
    }

    for (start, members) in open {
        if qualifies(start, n_units - 1, &members) {
            finished.push(Event {
                start,
                end: n_units - 1,
                dims: members.into_iter().collect(),
            });
        }
    }
    finished
}

/// Canonical ordering for comparing event lists: by (start, end, dims).
pub fn sorted_events(mut events: Vec<Event>) -> Vec<Event> {
    events.sort_by(|a, b| {
        (a.start, a.end, &a.dims).cmp(&(b.start, b.end, &b.dims))
    });
    events
}

pub fn write_events_json(path: impl AsRef<Path>, events: &[Event]) -> Result<()> {
    let path = path.as_ref();
    let sorted = sorted_events(events.to_vec());
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &sorted).map_err(|e| Error::InvalidInput(e.to_string()))?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_events_json(path: impl AsRef<Path>) -> Result<Vec<Event>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: 1,
        msg: format!("bad events JSON: {e}"),
    })
}
