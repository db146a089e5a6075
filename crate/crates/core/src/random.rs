//! Seeded generators of random step paths, subdivisions and time changes.
//!
//! Everything lives on a dyadic grid (times are multiples of 1/64, values
//! multiples of 1/32), so that shifting, extracting and re-patching windows
//! reproduces breakpoint times exactly: sums and differences of dyadic
//! rationals of bounded scale are exact in binary floating point.

use rand::Rng;

use crate::ops::Subdivision;
use crate::path::{CadlagPath, TimeChange};

/// Time grid step.
pub const TIME_GRID: f64 = 1.0 / 64.0;
/// Value grid step.
pub const VALUE_GRID: f64 = 1.0 / 32.0;

/// A random one-dimensional path with anchor 0 on `[0, horizon)`: an
/// alternation of anchor stretches and excursions with a few dyadic steps
/// each. `horizon` should be a multiple of [`TIME_GRID`].
pub fn random_step_path(rng: &mut impl Rng, horizon: f64) -> CadlagPath {
    let total = (horizon / TIME_GRID).round() as i64;
    let mut bps: Vec<(f64, Vec<f64>)> = vec![(0.0, vec![0.0])];
    let mut cursor: i64 = rng.gen_range(1..=16);
    while cursor < total {
        // an excursion of 1..=5 constant pieces at nonzero dyadic heights
        let pieces = rng.gen_range(1..=5);
        for _ in 0..pieces {
            if cursor >= total {
                break;
            }
            let mut h: i64 = rng.gen_range(-64..64);
            if h >= 0 {
                h += 1;
            }
            bps.push((cursor as f64 * TIME_GRID, vec![h as f64 * VALUE_GRID]));
            cursor += rng.gen_range(1..=8);
        }
        if cursor >= total {
            break;
        }
        bps.push((cursor as f64 * TIME_GRID, vec![0.0]));
        cursor += rng.gen_range(1..=16);
    }
    CadlagPath::from_segments(1, vec![0.0], bps, horizon, None)
        .expect("generated path is valid")
}

/// A random path whose excursion heights come exactly from `tiers`
/// (positive, increasing, each more than twice the previous, all below 0.5).
/// Excursions are single plateaus separated by anchor stretches of at least
/// half a time unit: no time change can align jumps of distinct excursions
/// more cheaply than leaving them unmatched, so the J1 distance to any
/// truncation is exactly the tallest erased plateau. Each tier appears at
/// least once when the horizon allows.
pub fn tiered_path(rng: &mut impl Rng, tiers: &[f64], horizon: f64) -> CadlagPath {
    let total = (horizon / TIME_GRID).round() as i64;
    let mut bps: Vec<(f64, Vec<f64>)> = vec![(0.0, vec![0.0])];
    let mut cursor: i64 = rng.gen_range(32..=40);
    let mut pending: Vec<f64> = tiers.to_vec();
    while cursor + 16 < total {
        let h = if pending.is_empty() {
            tiers[rng.gen_range(0..tiers.len())]
        } else {
            pending.remove(rng.gen_range(0..pending.len()))
        };
        bps.push((cursor as f64 * TIME_GRID, vec![h]));
        cursor += rng.gen_range(16..=32);
        bps.push((cursor as f64 * TIME_GRID, vec![0.0]));
        cursor += rng.gen_range(32..=48);
    }
    CadlagPath::from_segments(1, vec![0.0], bps, horizon, None)
        .expect("generated path is valid")
}

/// A random subdivision with up to `max_entries` dyadic entries below
/// `horizon`; repeated entries (empty intervals) are produced on purpose.
pub fn random_subdivision(rng: &mut impl Rng, max_entries: usize, horizon: f64) -> Subdivision {
    let total = (horizon / TIME_GRID).round() as i64;
    let mut entries = vec![0.0];
    let mut cursor: i64 = 0;
    for _ in 0..max_entries {
        cursor += rng.gen_range(0..=8);
        if cursor > total {
            break;
        }
        entries.push(cursor as f64 * TIME_GRID);
    }
    Subdivision::new(entries).expect("generated subdivision is valid")
}

/// A random piecewise-linear time change with dyadic knots, staying within
/// `max_dev` of the identity on `[0, horizon]`.
pub fn random_time_change(rng: &mut impl Rng, horizon: f64, max_dev: f64) -> TimeChange {
    let total = (horizon / TIME_GRID).round() as i64;
    let dev_units = (max_dev / TIME_GRID).floor().max(0.0) as i64;
    let mut knots = Vec::new();
    let mut cursor: i64 = 0;
    loop {
        cursor += rng.gen_range(4..=16);
        if cursor >= total {
            break;
        }
        let image = cursor + rng.gen_range(-dev_units..=dev_units);
        if image <= knots.last().map(|&(_, t): &(f64, f64)| (t / TIME_GRID) as i64).unwrap_or(0) {
            continue;
        }
        knots.push((cursor as f64 * TIME_GRID, image as f64 * TIME_GRID));
    }
    TimeChange::new(knots).expect("generated time change is valid")
}
