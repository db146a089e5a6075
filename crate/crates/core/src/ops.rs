//! Excursion decomposition and the path-surgery operators built on it:
//! truncation of small or big excursions, subdivision-driven keep/erase,
//! extraction and patching, concatenation and thinning.
//!
//! An excursion of a path `f` away from its anchor is a maximal interval
//! `(g, d)` on which `f` differs from the anchor; `d = +∞` when the path
//! never returns (killed excursion). Excursions are carried around as
//! standalone paths starting at their own time 0, so they can be measured,
//! shifted and patched independently of where they sat inside `f`.

use crate::error::PathError;
use crate::path::CadlagPath;
use crate::size::SizeFunctional;

/// One excursion of a path: its interval inside the parent path and the
/// excursion itself re-based to start at time 0.
#[derive(Debug, Clone)]
pub struct ExcursionItem {
    /// Left endpoint of the excursion interval in the parent path.
    pub left: f64,
    /// Right endpoint; `+∞` when the excursion never returns to the anchor.
    pub right: f64,
    /// The excursion re-based to `[0, ∞)`: equals the parent on
    /// `[0, right − left)` and sits at the anchor afterwards.
    pub path: CadlagPath,
    /// Size under whatever functional was used, when one has been applied.
    pub size: Option<f64>,
}

impl ExcursionItem {
    pub fn is_killed(&self) -> bool {
        self.right.is_infinite()
    }
}

/// A subdivision `0 = s_0 ≤ s_1 ≤ s_2 ≤ …` of the half line, finite as a
/// list with an implicit tail of `+∞`. Odd intervals `[s_{2k}, s_{2k+1})`
/// are erased by the keep/erase operator, even intervals
/// `[s_{2k+1}, s_{2k+2})` are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdivision {
    entries: Vec<f64>,
}

impl Subdivision {
    pub fn new(entries: Vec<f64>) -> Result<Self, PathError> {
        if entries.first() != Some(&0.0) {
            return Err(PathError::BadSubdivision(0));
        }
        for (i, w) in entries.windows(2).enumerate() {
            if !(w[0] <= w[1]) || !w[1].is_finite() {
                return Err(PathError::BadSubdivision(i + 1));
            }
        }
        Ok(Subdivision { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// True when the finite entries are strictly increasing.
    pub fn is_strict(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] < w[1])
    }

    /// Entry `s_i`, with the implicit `+∞` tail.
    pub fn get(&self, i: usize) -> f64 {
        self.entries.get(i).copied().unwrap_or(f64::INFINITY)
    }

    /// The kept intervals `[s_{2k+1}, s_{2k+2})`, skipping empty ones.
    pub fn kept_intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut k = 1;
        while k < self.entries.len() {
            let (a, b) = (self.get(k), self.get(k + 1));
            if a < b {
                out.push((a, b));
            }
            k += 2;
        }
        out
    }
}

/// Decomposes `f` into its excursions away from the anchor, in time order.
pub fn decompose(f: &CadlagPath) -> Vec<ExcursionItem> {
    let bps = f.breakpoints();
    let mut items = Vec::new();
    let mut start: Option<usize> = None;
    for (i, (_, v)) in bps.iter().enumerate() {
        match (start, f.is_anchor(v)) {
            (None, false) => start = Some(i),
            (Some(s), true) => {
                items.push(make_item(f, s, Some(i)));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        items.push(make_item(f, s, None));
    }
    items
}

/// Decomposes and fills in sizes under `phi`.
pub fn decompose_sized(f: &CadlagPath, phi: &SizeFunctional) -> Vec<ExcursionItem> {
    let mut items = decompose(f);
    for item in &mut items {
        item.size = Some(phi.size(&item.path));
    }
    items
}

fn make_item(f: &CadlagPath, start_idx: usize, end_idx: Option<usize>) -> ExcursionItem {
    let bps = f.breakpoints();
    let g = bps[start_idx].0;
    let mut segs: Vec<(f64, Vec<f64>)> = bps[start_idx..end_idx.unwrap_or(bps.len())]
        .iter()
        .map(|(t, v)| (t - g, v.clone()))
        .collect();
    let (right, horizon, killed_at) = match end_idx {
        Some(e) => {
            let d = bps[e].0;
            segs.push((d - g, f.anchor().to_vec()));
            (d, f64::INFINITY, None)
        }
        None => {
            let horizon = if f.horizon().is_finite() { f.horizon() - g } else { f64::INFINITY };
            let killed = match f.killed_at() {
                Some(k) if k > g => Some(k - g),
                _ => None,
            };
            (f64::INFINITY, horizon, killed)
        }
    };
    let path = CadlagPath::from_segments(f.dimension(), f.anchor().to_vec(), segs, horizon, killed_at)
        .expect("excursion slice of a valid path is valid");
    ExcursionItem { left: g, right, path, size: None }
}

/// Rebuilds a path from `f`, keeping only the excursions selected by `keep`
/// and holding the anchor elsewhere.
fn filter_excursions(f: &CadlagPath, keep: impl Fn(&ExcursionItem) -> bool) -> CadlagPath {
    let anchor = f.anchor().to_vec();
    let mut segs: Vec<(f64, Vec<f64>)> = vec![(0.0, anchor.clone())];
    let mut killed_at = None;
    for item in decompose(f) {
        if !keep(&item) {
            continue;
        }
        for (t, v) in f.breakpoints() {
            if *t >= item.left && *t < item.right {
                push_seg(&mut segs, *t, v.clone());
            }
        }
        if item.right.is_finite() {
            push_seg(&mut segs, item.right, anchor.clone());
        } else {
            killed_at = f.killed_at();
        }
    }
    CadlagPath::from_segments(f.dimension(), anchor, segs, f.horizon(), killed_at)
        .expect("filtered path is valid")
}

/// Pushes `(t, v)`, overwriting a previous segment at the same time.
fn push_seg(segs: &mut Vec<(f64, Vec<f64>)>, t: f64, v: Vec<f64>) {
    match segs.last_mut() {
        Some(last) if last.0 == t => *last = (t, v),
        _ => segs.push((t, v)),
    }
}

/// Erases every ε-small excursion (`phi(e) ≤ ε`), holding the anchor there.
pub fn truncate_small(f: &CadlagPath, phi: &SizeFunctional, eps: f64) -> CadlagPath {
    filter_excursions(f, |item| phi.size(&item.path) > eps)
}

/// Erases every ε-big excursion (`phi(e) > ε`), keeping only the small ones.
pub fn truncate_big(f: &CadlagPath, phi: &SizeFunctional, eps: f64) -> CadlagPath {
    filter_excursions(f, |item| !(phi.size(&item.path) > eps))
}

/// Keep/erase along a subdivision: the anchor on odd intervals, `f` on even
/// intervals.
pub fn phi_s(f: &CadlagPath, s: &Subdivision) -> CadlagPath {
    let anchor = f.anchor().to_vec();
    let mut segs: Vec<(f64, Vec<f64>)> = vec![(0.0, anchor.clone())];
    let mut killed_at = None;
    for (a, b) in s.kept_intervals() {
        if a >= f.horizon() && f.horizon().is_finite() {
            break;
        }
        push_seg(&mut segs, a, f.eval(a).to_vec());
        for (t, v) in f.breakpoints() {
            if *t > a && *t < b {
                push_seg(&mut segs, *t, v.clone());
            }
        }
        if b.is_finite() {
            push_seg(&mut segs, b, anchor.clone());
        }
        if let Some(k) = f.killed_at() {
            if k > a && k <= b {
                killed_at = Some(k);
            }
        }
    }
    CadlagPath::from_segments(f.dimension(), anchor, segs, f.horizon(), killed_at)
        .expect("keep/erase of a valid path is valid")
}

/// Extraction along a subdivision: the k-th kept window of `f`, re-based to
/// start at time 0 and anchored after the window ends.
pub fn e_s(f: &CadlagPath, s: &Subdivision) -> Vec<CadlagPath> {
    let anchor = f.anchor().to_vec();
    let mut out = Vec::new();
    for (a, b) in s.kept_intervals() {
        if a >= f.horizon() && f.horizon().is_finite() {
            break;
        }
        let mut segs: Vec<(f64, Vec<f64>)> = vec![(0.0, f.eval(a).to_vec())];
        for (t, v) in f.breakpoints() {
            if *t > a && *t < b {
                push_seg(&mut segs, t - a, v.clone());
            }
        }
        let (horizon, killed_at) = if b.is_finite() {
            push_seg(&mut segs, b - a, anchor.clone());
            (f64::INFINITY, None)
        } else {
            let horizon = if f.horizon().is_finite() { f.horizon() - a } else { f64::INFINITY };
            let killed = match f.killed_at() {
                Some(k) if k > a => Some(k - a),
                _ => None,
            };
            (horizon, killed)
        };
        out.push(
            CadlagPath::from_segments(f.dimension(), anchor.clone(), segs, horizon, killed_at)
                .expect("extracted window of a valid path is valid"),
        );
    }
    out
}

/// Patching along a subdivision: plants `paths[k]` on the k-th kept interval
/// and holds the anchor elsewhere. Inverse of [`e_s`] on the kept windows,
/// so `phi_s(f, s) == psi_s(&e_s(f, s), s, f.horizon())` breakpoint for
/// breakpoint.
pub fn psi_s(
    paths: &[CadlagPath],
    s: &Subdivision,
    horizon: f64,
) -> Result<CadlagPath, PathError> {
    let first = paths.first().ok_or(PathError::NoBigExcursion)?;
    let anchor = first.anchor().to_vec();
    let dim = first.dimension();
    for p in paths {
        if p.dimension() != dim {
            return Err(PathError::DimensionMismatch(dim, p.dimension()));
        }
        if p.anchor() != anchor.as_slice() {
            return Err(PathError::AnchorMismatch);
        }
    }
    let mut segs: Vec<(f64, Vec<f64>)> = vec![(0.0, anchor.clone())];
    let mut killed_at = None;
    for (k, (a, b)) in s.kept_intervals().into_iter().enumerate() {
        let e = match paths.get(k) {
            Some(e) => e,
            None => break,
        };
        push_seg(&mut segs, a, e.eval(0.0).to_vec());
        for (t, v) in e.breakpoints() {
            if *t > 0.0 && t + a < b {
                push_seg(&mut segs, t + a, v.clone());
            }
        }
        if b.is_finite() {
            push_seg(&mut segs, b, anchor.clone());
        }
        if let Some(ke) = e.killed_at() {
            if ke + a <= b {
                killed_at = Some(ke + a);
            }
        }
    }
    CadlagPath::from_segments(dim, anchor, segs, horizon, killed_at)
}

/// Concatenation: `f` on `[0, t)`, then `h` restarted at `t`.
pub fn concat(f: &CadlagPath, t: f64, h: &CadlagPath) -> Result<CadlagPath, PathError> {
    if f.dimension() != h.dimension() {
        return Err(PathError::DimensionMismatch(f.dimension(), h.dimension()));
    }
    if f.anchor() != h.anchor() {
        return Err(PathError::AnchorMismatch);
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(PathError::ShiftBeyondHorizon { t, horizon: f.horizon() });
    }
    let mut segs: Vec<(f64, Vec<f64>)> = Vec::new();
    if t > 0.0 {
        segs.push((0.0, f.eval(0.0).to_vec()));
        for (s, v) in f.breakpoints() {
            if *s > 0.0 && *s < t {
                push_seg(&mut segs, *s, v.clone());
            }
        }
    }
    for (s, v) in h.breakpoints() {
        push_seg(&mut segs, s + t, v.clone());
    }
    let horizon = if h.horizon().is_finite() { t + h.horizon() } else { f64::INFINITY };
    let killed_at = h.killed_at().map(|k| t + k);
    CadlagPath::from_segments(f.dimension(), f.anchor().to_vec(), segs, horizon, killed_at)
}

/// Thinning: from a list of sized excursions, keep the ε-big ones.
pub fn thin(items: &[ExcursionItem], eps: f64) -> Result<Vec<ExcursionItem>, PathError> {
    let mut out = Vec::new();
    for item in items {
        let size = item.size.ok_or(PathError::MissingSizes)?;
        if size > eps {
            out.push(item.clone());
        }
    }
    Ok(out)
}
