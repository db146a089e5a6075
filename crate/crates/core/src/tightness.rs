//! Moduli of continuity for step paths on a window `[0, m]`.
//!
//! * `w` is the plain uniform modulus
//!   `w_m(f, δ) = sup{ |f(t) − f(s)| : s, t ≤ m, |t − s| ≤ δ }`.
//! * `w'` is the càdlàg modulus: the infimum over partitions
//!   `0 = u_0 < u_1 < … < u_r = m`, every block longer than `δ` except
//!   possibly the last, of the largest oscillation within a block. Jumps are
//!   free as long as they are more than `δ` apart.
//!
//! For step paths the partition infimum is taken over cuts at breakpoint
//! times. Cutting inside a constant segment never removes that segment's
//! value from both neighbouring blocks, so this restriction can only
//! increase the value, and since the operators in [`crate::ops`] only ever
//! remove breakpoints, the comparison inequalities between a path and its
//! truncations hold for the restricted infimum as well.

use crate::path::CadlagPath;

/// Which modulus a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusKind {
    /// The uniform modulus `w`.
    Uniform,
    /// The càdlàg modulus `w'`.
    Cadlag,
}

/// A computed modulus value together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusReport {
    pub kind: ModulusKind,
    pub window: f64,
    pub delta: f64,
    pub value: f64,
}

impl ModulusReport {
    pub fn compute(kind: ModulusKind, f: &CadlagPath, window: f64, delta: f64) -> Self {
        let value = match kind {
            ModulusKind::Uniform => modulus_w(f, window, delta),
            ModulusKind::Cadlag => modulus_w_prime(f, window, delta),
        };
        ModulusReport { kind, window, delta, value }
    }
}

/// Segments of `f` clipped to `[0, m]`, as `(start, end, value)` triples.
fn clipped_segments(f: &CadlagPath, m: f64) -> Vec<(f64, f64, Vec<f64>)> {
    let bps = f.breakpoints();
    let mut out = Vec::new();
    for (i, (t, v)) in bps.iter().enumerate() {
        if *t > m {
            break;
        }
        let end = bps.get(i + 1).map(|b| b.0).unwrap_or(f64::INFINITY).min(m);
        out.push((*t, end, v.clone()));
    }
    out
}

fn osc_max_norm(values: &[&[f64]]) -> f64 {
    let d = values[0].len();
    let mut worst = 0.0_f64;
    for c in 0..d {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v[c]);
            hi = hi.max(v[c]);
        }
        worst = worst.max(hi - lo);
    }
    worst
}

/// The uniform modulus `w_m(f, δ)`.
///
/// Two segments can contribute a pair `(s, t)` with `|t − s| ≤ δ` exactly
/// when the gap between them is strictly smaller than `δ` (segments are
/// half-open, so the gap is approached but not attained).
pub fn modulus_w(f: &CadlagPath, m: f64, delta: f64) -> f64 {
    let segs = clipped_segments(f, m);
    let mut best = 0.0_f64;
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            if segs[j].0 - segs[i].1 >= delta {
                break;
            }
            best = best.max(osc_max_norm(&[&segs[i].2, &segs[j].2]));
        }
    }
    best
}

/// The càdlàg modulus `w'_m(f, δ)`.
pub fn modulus_w_prime(f: &CadlagPath, m: f64, delta: f64) -> f64 {
    // cut candidates: 0, the breakpoint times in (0, m), and m
    let mut cuts: Vec<f64> = vec![0.0];
    for (t, _) in f.breakpoints() {
        if *t > 0.0 && *t < m {
            cuts.push(*t);
        }
    }
    cuts.push(m);
    let k = cuts.len() - 1; // blocks between consecutive cuts
    let vals: Vec<&[f64]> = (0..k).map(|i| f.eval(cuts[i])).collect();
    let d = vals[0].len();

    // dp[i] = best max-oscillation over partitions of [0, cuts[i]) into
    // blocks all longer than delta; infinite when no such partition exists.
    let mut dp = vec![f64::INFINITY; k + 1];
    dp[0] = 0.0;
    let mut answer = f64::INFINITY;
    for i in 1..=k {
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        let mut osc = 0.0_f64;
        let mut best = f64::INFINITY;
        for j in (0..i).rev() {
            // widen the block to [cuts[j], cuts[i]): absorb the segment value
            // on [cuts[j], cuts[j+1])
            for c in 0..d {
                lo[c] = lo[c].min(vals[j][c]);
                hi[c] = hi[c].max(vals[j][c]);
                osc = osc.max(hi[c] - lo[c]);
            }
            if osc >= best && osc >= answer {
                // the oscillation only grows as the block widens
                break;
            }
            if i == k {
                // the final block may have any length
                answer = answer.min(dp[j].max(osc));
            }
            if cuts[i] - cuts[j] > delta {
                best = best.min(dp[j].max(osc));
            }
        }
        dp[i] = best;
    }
    if k >= 1 {
        answer = answer.min(dp[k]);
    }
    answer
}
