//! Size functionals on excursions and the passage-time machinery built on
//! them: ε-big extraction, the subdivision carried by the ε-big excursion
//! intervals, and first-passage shifts.
//!
//! A size functional assigns `φ(e) ∈ [0, +∞]` to an excursion with
//! `φ(e) > 0` exactly when `e` is not the anchor path. "ε-big" always means
//! the strict inequality `φ(e) > ε`.

use crate::error::PathError;
use crate::ops::{decompose_sized, ExcursionItem, Subdivision};
use crate::path::{max_norm, CadlagPath};

/// Kernel of an additive size functional `φ(e) = ∫₀^T V(|e(t)|) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `V(r) = r`.
    Identity,
    /// `V(r) = 1/r` (with `V(0) = +∞`, irrelevant off the anchor).
    Reciprocal,
}

impl Kernel {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Kernel::Identity => r,
            Kernel::Reciprocal => {
                if r > 0.0 {
                    1.0 / r
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// A size functional on excursions.
#[derive(Debug, Clone)]
pub enum SizeFunctional {
    /// Excursion length: the first hitting time of the anchor (`+∞` when
    /// killed).
    Length,
    /// Excursion height: the sup of the distance to the anchor.
    Height,
    /// `∫₀^T V(|e(t)|) dt` for a kernel `V` (`+∞` when killed on an
    /// unbounded window).
    Additive(Kernel),
    /// Any user-supplied functional.
    Custom(fn(&CadlagPath) -> f64),
}

impl SizeFunctional {
    pub fn size(&self, e: &CadlagPath) -> f64 {
        match self {
            SizeFunctional::Length => e.hitting_time(),
            SizeFunctional::Height => {
                let t = e.hitting_time();
                if t.is_infinite() {
                    e.sup_to_anchor(f64::INFINITY)
                } else {
                    e.sup_to_anchor(t)
                }
            }
            SizeFunctional::Additive(kernel) => {
                let t = e.hitting_time();
                let end = if t.is_finite() {
                    t
                } else if let Some(k) = e.killed_at() {
                    k
                } else if e.horizon().is_finite() {
                    e.horizon()
                } else {
                    return f64::INFINITY;
                };
                let mut total = 0.0;
                let bps = e.breakpoints();
                for (i, (s, v)) in bps.iter().enumerate() {
                    if *s >= end {
                        break;
                    }
                    let next = bps.get(i + 1).map(|b| b.0).unwrap_or(f64::INFINITY).min(end);
                    let r = max_norm(v, e.anchor());
                    if r > 0.0 {
                        total += kernel.value(r) * (next - s);
                    }
                }
                total
            }
            SizeFunctional::Custom(f) => f(e),
        }
    }
}

/// First ε-big excursion of `f`, if any.
pub fn extract_big(f: &CadlagPath, phi: &SizeFunctional, eps: f64) -> Option<ExcursionItem> {
    decompose_sized(f, phi)
        .into_iter()
        .find(|item| item.size.unwrap() > eps)
}

/// All ε-big excursions of `f`, in time order.
pub fn extract_all_big(f: &CadlagPath, phi: &SizeFunctional, eps: f64) -> Vec<ExcursionItem> {
    decompose_sized(f, phi)
        .into_iter()
        .filter(|item| item.size.unwrap() > eps)
        .collect()
}

/// The subdivision `(0, g_1, d_1, g_2, d_2, …)` carried by the ε-big
/// excursion intervals of `f`. A killed big excursion contributes only its
/// left endpoint; the matching right endpoint is the implicit `+∞` tail.
pub fn pi_subdivision(f: &CadlagPath, phi: &SizeFunctional, eps: f64) -> Subdivision {
    let mut entries = vec![0.0];
    for item in extract_all_big(f, phi, eps) {
        entries.push(item.left);
        if item.right.is_finite() {
            entries.push(item.right);
        } else {
            break;
        }
    }
    Subdivision::new(entries).expect("big-excursion intervals are ordered")
}

/// First-passage times of the distance to the anchor across the level `eps`:
/// `strict = inf{t : |f(t)| > eps}` and `inclusive = inf{t : |f(t)| ≥ eps}`,
/// each `+∞` when the level is never crossed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageTimes {
    pub strict: f64,
    pub inclusive: f64,
}

pub fn passage(f: &CadlagPath, eps: f64) -> PassageTimes {
    let mut strict = f64::INFINITY;
    let mut inclusive = f64::INFINITY;
    for (t, v) in f.breakpoints() {
        let r = max_norm(v, f.anchor());
        if inclusive.is_infinite() && r >= eps {
            inclusive = *t;
        }
        if r > eps {
            strict = *t;
            break;
        }
    }
    PassageTimes { strict, inclusive }
}

/// Shifts an excursion to its strict first passage across `eps`:
/// `e ↦ θ_{T↑(e,ε)}(e)`. Errors when the excursion never exceeds `eps`.
pub fn shift_to_passage(e: &CadlagPath, eps: f64) -> Result<CadlagPath, PathError> {
    let t = passage(e, eps).strict;
    if t.is_infinite() {
        return Err(PathError::NoBigExcursion);
    }
    e.shift(t)
}

/// Right and left inverses of the past supremum at a given level, and
/// whether the level is a continuity point of the inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupInverse {
    /// `inf{t : sup_{u ≤ t} |f(u)| > a}`.
    pub right: f64,
    /// `inf{t : sup_{u ≤ t} |f(u)| ≥ a}`.
    pub left: f64,
    /// True when the two inverses coincide (no plateau of the running
    /// supremum at this level).
    pub coincide: bool,
}

/// Right and left inverses of the past supremum `t ↦ sup_{u ≤ t} |f(u)|` at
/// level `a`: for step paths the right inverse `inf{t : sup > a}` coincides
/// with the strict passage of `f` itself and the left inverse
/// `inf{t : sup ≥ a}` with the inclusive one.
pub fn past_sup_inverse(f: &CadlagPath, a: f64) -> SupInverse {
    let p = passage(f, a);
    SupInverse { right: p.strict, left: p.inclusive, coincide: p.strict == p.inclusive }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> CadlagPath {
        CadlagPath::scalar(&[(0.0, 0.0), (1.0, 0.5), (2.0, 1.5), (3.0, 0.5), (4.0, 0.0)], 10.0)
    }

    #[test]
    fn length_and_height() {
        let e = tent().shift(1.0).unwrap();
        assert_eq!(SizeFunctional::Length.size(&e), 3.0);
        assert_eq!(SizeFunctional::Height.size(&e), 1.5);
        let killed = CadlagPath::new(1, vec![0.0], vec![(0.0, vec![1.0])], 5.0, Some(5.0)).unwrap();
        assert_eq!(SizeFunctional::Length.size(&killed), f64::INFINITY);
        assert_eq!(SizeFunctional::Height.size(&killed), 1.0);
        let zero = CadlagPath::constant_anchor(vec![0.0], 5.0);
        assert_eq!(SizeFunctional::Length.size(&zero), 0.0);
        assert_eq!(SizeFunctional::Height.size(&zero), 0.0);
    }

    #[test]
    fn additive_kernels() {
        let e = tent().shift(1.0).unwrap();
        // identity kernel: 0.5·1 + 1.5·1 + 0.5·1
        assert_eq!(SizeFunctional::Additive(Kernel::Identity).size(&e), 2.5);
        // reciprocal kernel: 2 + 2/3 + 2
        let r = SizeFunctional::Additive(Kernel::Reciprocal).size(&e);
        assert!((r - (2.0 + 2.0 / 3.0 + 2.0)).abs() < 1e-12);
        // killed excursion on an unbounded window diverges
        let killed =
            CadlagPath::new(1, vec![0.0], vec![(0.0, vec![1.0])], f64::INFINITY, None).unwrap();
        assert_eq!(SizeFunctional::Additive(Kernel::Identity).size(&killed), f64::INFINITY);
    }

    #[test]
    fn positive_iff_not_anchor() {
        let zero = CadlagPath::constant_anchor(vec![0.0], 5.0);
        let e = CadlagPath::scalar(&[(0.0, 0.3), (0.5, 0.0)], 5.0);
        for phi in [
            SizeFunctional::Length,
            SizeFunctional::Height,
            SizeFunctional::Additive(Kernel::Identity),
        ] {
            assert_eq!(phi.size(&zero), 0.0);
            assert!(phi.size(&e) > 0.0);
        }
    }

    #[test]
    fn extraction_and_subdivision() {
        let f = CadlagPath::scalar(
            &[(0.0, 0.0), (1.0, 0.2), (1.5, 0.0), (2.0, 1.0), (3.0, 0.0), (4.0, 2.0), (5.0, 0.0)],
            10.0,
        );
        let phi = SizeFunctional::Height;
        let first = extract_big(&f, &phi, 0.5).unwrap();
        assert_eq!((first.left, first.right), (2.0, 3.0));
        let all = extract_all_big(&f, &phi, 0.5);
        assert_eq!(all.len(), 2);
        let s = pi_subdivision(&f, &phi, 0.5);
        assert_eq!(s.entries(), &[0.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(extract_big(&f, &phi, 3.0).is_none());
    }

    #[test]
    fn passage_times_strict_vs_inclusive() {
        let f = tent();
        let p = passage(&f, 0.5);
        assert_eq!(p.inclusive, 1.0);
        assert_eq!(p.strict, 2.0);
        let q = passage(&f, 2.0);
        assert!(q.strict.is_infinite());
        assert!(q.inclusive.is_infinite());
        let inv = past_sup_inverse(&f, 0.5);
        assert_eq!((inv.left, inv.right), (1.0, 2.0));
        assert!(!inv.coincide);
        // a level crossed by a jump: both inverses agree
        let inv = past_sup_inverse(&f, 1.2);
        assert_eq!((inv.left, inv.right), (2.0, 2.0));
        assert!(inv.coincide);
    }

    #[test]
    fn passage_shift_rebases() {
        let e = tent().shift(1.0).unwrap();
        let shifted = shift_to_passage(&e, 0.5).unwrap();
        assert_eq!(shifted.eval(0.0), &[1.5]);
        assert_eq!(shifted.hitting_time(), 2.0);
        assert!(shift_to_passage(&e, 5.0).is_err());
    }
}
