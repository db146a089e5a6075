//! Piecewise-constant càdlàg paths, time changes and sup-norm distances.
//!
//! A [`CadlagPath`] is a step function on `[0, horizon)` with values in ℝ^d,
//! given by finitely many breakpoints `(t_k, v_k)` with strictly increasing
//! times starting at `t_0 = 0`. The value at `t` is the value of the last
//! breakpoint with time `≤ t` (right-continuity by construction), and the
//! last value persists at and beyond the horizon.
//!
//! Anchor membership is exact value equality: synthesized paths write the
//! anchor value exactly, which keeps the zero set exactly computable.

use crate::error::PathError;

/// Max-norm distance between two points of ℝ^d.
pub fn max_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// A jump of a step path: the breakpoint where the value changes.
#[derive(Debug, Clone)]
pub struct Jump {
    pub time: f64,
    pub pre: Vec<f64>,
    pub post: Vec<f64>,
    /// Max-norm size of the jump.
    pub size: f64,
}

/// A piecewise-constant càdlàg path on `[0, horizon)` with values in ℝ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct CadlagPath {
    dimension: usize,
    anchor: Vec<f64>,
    breakpoints: Vec<(f64, Vec<f64>)>,
    horizon: f64,
    killed_at: Option<f64>,
}

impl CadlagPath {
    /// Builds a path, validating every invariant.
    pub fn new(
        dimension: usize,
        anchor: Vec<f64>,
        breakpoints: Vec<(f64, Vec<f64>)>,
        horizon: f64,
        killed_at: Option<f64>,
    ) -> Result<Self, PathError> {
        if dimension == 0 || anchor.len() != dimension {
            return Err(PathError::BadValueDim(0));
        }
        if !(horizon > 0.0) {
            return Err(PathError::BadHorizon);
        }
        if breakpoints.is_empty() || breakpoints[0].0 != 0.0 {
            return Err(PathError::BadBreakpoints(0));
        }
        for (i, (t, v)) in breakpoints.iter().enumerate() {
            if v.len() != dimension {
                return Err(PathError::BadValueDim(i));
            }
            if !t.is_finite() || (i > 0 && !(breakpoints[i - 1].0 < *t)) {
                return Err(PathError::BadBreakpoints(i));
            }
        }
        if let Some(k) = killed_at {
            if !(k > 0.0) || k > horizon {
                return Err(PathError::BadKilledAt);
            }
        }
        Ok(CadlagPath { dimension, anchor, breakpoints, horizon, killed_at })
    }

    /// Normalizing builder: merges consecutive breakpoints with equal values,
    /// so that operator outputs compare exactly breakpoint by breakpoint.
    pub fn from_segments(
        dimension: usize,
        anchor: Vec<f64>,
        segments: Vec<(f64, Vec<f64>)>,
        horizon: f64,
        killed_at: Option<f64>,
    ) -> Result<Self, PathError> {
        let mut bps: Vec<(f64, Vec<f64>)> = Vec::with_capacity(segments.len());
        for (t, v) in segments {
            match bps.last() {
                Some((_, last)) if *last == v => continue,
                _ => bps.push((t, v)),
            }
        }
        CadlagPath::new(dimension, anchor, bps, horizon, killed_at)
    }

    /// The path constantly equal to the anchor (𝟘 when the anchor is the origin).
    pub fn constant_anchor(anchor: Vec<f64>, horizon: f64) -> Self {
        let d = anchor.len();
        CadlagPath::new(d, anchor.clone(), vec![(0.0, anchor)], horizon, None)
            .expect("constant path is always valid")
    }

    /// One-dimensional path with anchor 0, from `(time, value)` pairs.
    /// Convenience constructor for tests and fixtures; panics on invalid input.
    pub fn scalar(pairs: &[(f64, f64)], horizon: f64) -> Self {
        let bps = pairs.iter().map(|&(t, v)| (t, vec![v])).collect();
        CadlagPath::new(1, vec![0.0], bps, horizon, None).expect("invalid scalar path")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn breakpoints(&self) -> &[(f64, Vec<f64>)] {
        &self.breakpoints
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn killed_at(&self) -> Option<f64> {
        self.killed_at
    }

    pub fn with_killed_at(mut self, killed_at: Option<f64>) -> Result<Self, PathError> {
        if let Some(k) = killed_at {
            if !(k > 0.0) || k > self.horizon {
                return Err(PathError::BadKilledAt);
            }
        }
        self.killed_at = killed_at;
        Ok(self)
    }

    pub fn is_anchor(&self, v: &[f64]) -> bool {
        v == self.anchor.as_slice()
    }

    /// Index of the segment containing `t`: the last breakpoint with time ≤ t.
    pub fn segment_index(&self, t: f64) -> usize {
        debug_assert!(t >= 0.0);
        self.breakpoints.partition_point(|(s, _)| *s <= t) - 1
    }

    /// Value at time `t ≥ 0`; the last breakpoint value persists beyond the horizon.
    pub fn eval(&self, t: f64) -> &[f64] {
        &self.breakpoints[self.segment_index(t)].1
    }

    /// First hitting time of the anchor: `inf{t > 0 : f(t) = anchor}`.
    ///
    /// Returns `+∞` when the anchor is never reached within the represented
    /// breakpoints (killed semantics are carried by `killed_at`).
    pub fn hitting_time(&self) -> f64 {
        if self.is_anchor(&self.breakpoints[0].1) {
            // f equals the anchor on [0, t_1), so the infimum over t > 0 is 0.
            return 0.0;
        }
        for (t, v) in &self.breakpoints[1..] {
            if self.is_anchor(v) {
                return *t;
            }
        }
        f64::INFINITY
    }

    /// Shift operator: `θ_t(f) = f(t + ·)`, re-based so the new path starts at 0.
    pub fn shift(&self, t: f64) -> Result<Self, PathError> {
        if !(t >= 0.0) || t > self.horizon {
            return Err(PathError::ShiftBeyondHorizon { t, horizon: self.horizon });
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        let i = self.segment_index(t);
        let mut bps = Vec::with_capacity(self.breakpoints.len() - i);
        bps.push((0.0, self.breakpoints[i].1.clone()));
        for (s, v) in &self.breakpoints[i + 1..] {
            bps.push((s - t, v.clone()));
        }
        let horizon = if self.horizon.is_finite() { self.horizon - t } else { f64::INFINITY };
        let horizon = if horizon > 0.0 { horizon } else { f64::INFINITY };
        let killed_at = match self.killed_at {
            Some(k) if k > t => Some(k - t),
            Some(_) => None,
            None => None,
        };
        CadlagPath::new(self.dimension, self.anchor.clone(), bps, horizon, killed_at)
    }

    /// Exact supremum over `[0, m]` of the pointwise max-norm distance to `other`,
    /// computed over the merged breakpoint grid.
    pub fn sup_distance(&self, other: &CadlagPath, m: f64) -> Result<f64, PathError> {
        if self.dimension != other.dimension {
            return Err(PathError::DimensionMismatch(self.dimension, other.dimension));
        }
        if self.anchor != other.anchor {
            return Err(PathError::AnchorMismatch);
        }
        let mut best = 0.0_f64;
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            best = best.max(max_norm(&self.breakpoints[i].1, &other.breakpoints[j].1));
            let ti = self.breakpoints.get(i + 1).map(|b| b.0).unwrap_or(f64::INFINITY);
            let tj = other.breakpoints.get(j + 1).map(|b| b.0).unwrap_or(f64::INFINITY);
            let next = ti.min(tj);
            if next > m {
                break;
            }
            if ti == next {
                i += 1;
            }
            if tj == next {
                j += 1;
            }
        }
        Ok(best)
    }

    /// Sup over `[0, m]` of the max-norm distance to the anchor (`v_m(f)`).
    pub fn sup_to_anchor(&self, m: f64) -> f64 {
        let mut best = 0.0_f64;
        for (t, v) in &self.breakpoints {
            if *t > m {
                break;
            }
            best = best.max(max_norm(v, &self.anchor));
        }
        best
    }

    /// The scalar path `t ↦ v(f(t))` of distances to the anchor.
    pub fn distance_to_anchor_path(&self) -> CadlagPath {
        let bps = self
            .breakpoints
            .iter()
            .map(|(t, v)| (*t, vec![max_norm(v, &self.anchor)]))
            .collect();
        CadlagPath::from_segments(1, vec![0.0], bps, self.horizon, self.killed_at)
            .expect("distance path is always valid")
    }

    /// Jumps of the path (breakpoints where the value actually changes).
    pub fn jumps(&self) -> Vec<Jump> {
        let mut out = Vec::new();
        for w in self.breakpoints.windows(2) {
            let size = max_norm(&w[0].1, &w[1].1);
            if size > 0.0 {
                out.push(Jump {
                    time: w[1].0,
                    pre: w[0].1.clone(),
                    post: w[1].1.clone(),
                    size,
                });
            }
        }
        out
    }

    /// Lebesgue measure of `{t ∈ [0, m] : f(t) = anchor}`.
    pub fn zero_set_measure(&self, m: f64) -> f64 {
        let mut total = 0.0;
        for (k, (t, v)) in self.breakpoints.iter().enumerate() {
            if *t >= m {
                break;
            }
            if self.is_anchor(v) {
                let end = self
                    .breakpoints
                    .get(k + 1)
                    .map(|b| b.0)
                    .unwrap_or(f64::INFINITY)
                    .min(m);
                total += end - t;
            }
        }
        total
    }

    /// True when the path is an excursion: once the anchor is hit, the path
    /// stays there (killed paths never hit the anchor and are excursions by
    /// convention).
    pub fn is_excursion(&self) -> bool {
        let t = self.hitting_time();
        if t == 0.0 {
            return self.breakpoints.iter().all(|(_, v)| self.is_anchor(v));
        }
        if t.is_infinite() {
            return true;
        }
        let i = self.segment_index(t);
        self.breakpoints[i..].iter().all(|(_, v)| self.is_anchor(v))
    }
}

/// A continuous, strictly increasing, piecewise-linear bijection of `[0, ∞)`
/// with `λ(0) = 0`. Beyond the last knot the slope is 1, which keeps the map
/// unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChange {
    knots: Vec<(f64, f64)>,
}

impl TimeChange {
    pub fn identity() -> Self {
        TimeChange { knots: vec![(0.0, 0.0)] }
    }

    /// Builds a time change from knots `(s, λ(s))`; the knot `(0, 0)` is
    /// prepended when missing.
    pub fn new(mut knots: Vec<(f64, f64)>) -> Result<Self, PathError> {
        if knots.first() != Some(&(0.0, 0.0)) {
            knots.insert(0, (0.0, 0.0));
        }
        for w in knots.windows(2) {
            if !(w[0].0 < w[1].0 && w[0].1 < w[1].1) {
                return Err(PathError::BadTimeChange);
            }
        }
        Ok(TimeChange { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, s: f64) -> f64 {
        debug_assert!(s >= 0.0);
        let i = self.knots.partition_point(|(u, _)| *u <= s) - 1;
        let (u0, t0) = self.knots[i];
        match self.knots.get(i + 1) {
            Some(&(u1, t1)) => t0 + (s - u0) * (t1 - t0) / (u1 - u0),
            None => t0 + (s - u0),
        }
    }

    pub fn inverse(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        if t.is_infinite() {
            return f64::INFINITY;
        }
        let i = self.knots.partition_point(|(_, v)| *v <= t) - 1;
        let (u0, t0) = self.knots[i];
        match self.knots.get(i + 1) {
            Some(&(u1, t1)) => u0 + (t - t0) * (u1 - u0) / (t1 - t0),
            None => u0 + (t - t0),
        }
    }

    /// `‖λ − Id‖_m`: since λ is affine between knots, the supremum is attained
    /// at a knot or at the window edge.
    pub fn sup_dev_identity(&self, m: f64) -> f64 {
        let mut best = 0.0_f64;
        for &(s, t) in &self.knots {
            if s > m {
                break;
            }
            best = best.max((t - s).abs());
        }
        best.max((self.eval(m) - m).abs())
    }

    /// The composed path `f ∘ λ`: a jump of `f` at time `τ` appears at `λ⁻¹(τ)`.
    pub fn apply(&self, f: &CadlagPath) -> CadlagPath {
        let bps = f
            .breakpoints()
            .iter()
            .map(|(t, v)| (self.inverse(*t), v.clone()))
            .collect();
        let horizon = if f.horizon().is_finite() {
            self.inverse(f.horizon())
        } else {
            f64::INFINITY
        };
        CadlagPath::new(f.dimension(), f.anchor().to_vec(), bps, horizon, f.killed_at())
            .expect("time change preserves path validity")
    }
}

/// A two-sided bracket for the Skorokhod J1 distance on `[0, m]`: the upper
/// bound comes with a witnessing time change, the lower bound is certified
/// from jumps that no time change can align.
#[derive(Debug, Clone)]
pub struct J1Bracket {
    pub lower: f64,
    pub upper: f64,
    pub witness: TimeChange,
}
