//! Excursion samplers: sources of i.i.d. excursion paths behind a common
//! trait, used as the per-regeneration draw of a regenerative process.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use excursion_core::{CadlagPath, SizeFunctional};

use crate::srw::height_units;

/// A source of i.i.d. excursions (paths away from the anchor that end at the
/// anchor, or are killed when a simulation budget runs out).
pub trait ExcursionSampler: Send + Sync {
    /// Draws one excursion. The path starts off the anchor at time 0 and has
    /// `hitting_time()` equal to the excursion lifetime (`+∞` when killed).
    fn draw(&self, rng: &mut ChaCha8Rng) -> CadlagPath;

    /// Draws only the pair `(T, φ(e))`, when the sampler can produce it
    /// without materializing the path.
    fn draw_summary(&self, rng: &mut ChaCha8Rng, phi: &SizeFunctional) -> (f64, f64) {
        let e = self.draw(rng);
        (e.hitting_time(), phi.size(&e))
    }

    /// Exact probability that a draw is ε-big, when available in closed form.
    fn big_mass(&self, phi: &SizeFunctional, eps: f64) -> Option<f64> {
        let _ = (phi, eps);
        None
    }

    /// Whether a drawn size counts as ε-big. The default is the strict
    /// inequality `φ(e) > ε`; lattice-valued samplers round the threshold to
    /// their own grid so that this predicate, [`ExcursionSampler::big_mass`]
    /// and [`ExcursionSampler::draw_big`] agree exactly.
    fn is_big(&self, phi: &SizeFunctional, eps: f64, size: f64) -> bool {
        let _ = phi;
        size > eps
    }

    /// Draws an excursion conditioned to be ε-big. The default rejection loop
    /// is always correct; samplers may override it with an exact construction.
    fn draw_big(&self, rng: &mut ChaCha8Rng, phi: &SizeFunctional, eps: f64) -> CadlagPath {
        loop {
            let e = self.draw(rng);
            if phi.size(&e) > eps {
                return e;
            }
        }
    }
}

/// Excursions of the `n`-th diffusively scaled simple random walk: values on
/// the lattice `ℤ/√n`, one walk step per `1/n` of time. A walk excursion
/// `0, S_1, …, S_{k−1} ≠ 0, S_k = 0` is reported as the step path taking the
/// values `S_1/√n, …, S_{k−1}/√n` on consecutive slots of length `1/n`, so
/// its lifetime is `(k−1)/n`.
///
/// Runs longer than `cap_steps` are cut and marked killed; the cap should be
/// large enough that its probability (of order `1/√cap_steps`) is negligible
/// for the statistics being collected.
#[derive(Debug, Clone)]
pub struct SrwSampler {
    pub n: u64,
    pub cap_steps: u64,
}

impl SrwSampler {
    pub fn new(n: u64, cap_steps: u64) -> Self {
        SrwSampler { n, cap_steps }
    }

    fn materialize(&self, units: &[i64], killed: bool) -> CadlagPath {
        let n = self.n as f64;
        let sqrt_n = n.sqrt();
        let mut bps: Vec<(f64, Vec<f64>)> = Vec::with_capacity(units.len() + 1);
        for (j, &u) in units.iter().enumerate() {
            let v = if u == 0 { 0.0 } else { u as f64 / sqrt_n };
            bps.push((j as f64 / n, vec![v]));
        }
        if killed {
            let horizon = units.len() as f64 / n;
            CadlagPath::new(1, vec![0.0], bps, horizon, Some(horizon)).expect("valid excursion")
        } else {
            bps.push((units.len() as f64 / n, vec![0.0]));
            CadlagPath::new(1, vec![0.0], bps, f64::INFINITY, None).expect("valid excursion")
        }
    }

    /// Signed positions of one excursion (absolute walk reflected by a fair
    /// sign), without the final zero; `true` when the cap was hit.
    fn draw_units(&self, rng: &mut ChaCha8Rng) -> (Vec<i64>, bool) {
        let sign: i64 = if rng.gen::<bool>() { 1 } else { -1 };
        let mut units = vec![sign];
        let mut pos: i64 = 1;
        while pos != 0 {
            if units.len() as u64 >= self.cap_steps {
                return (units, true);
            }
            pos += if rng.gen::<bool>() { 1 } else { -1 };
            if pos != 0 {
                units.push(sign * pos);
            }
        }
        (units, false)
    }
}

impl ExcursionSampler for SrwSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> CadlagPath {
        let (units, killed) = self.draw_units(rng);
        self.materialize(&units, killed)
    }

    fn draw_summary(&self, rng: &mut ChaCha8Rng, phi: &SizeFunctional) -> (f64, f64) {
        match phi {
            SizeFunctional::Height | SizeFunctional::Length => {
                let n = self.n as f64;
                let mut pos: i64 = 1;
                let mut max: i64 = 1;
                let mut steps: u64 = 1;
                while pos != 0 && steps < self.cap_steps {
                    pos += if rng.gen::<bool>() { 1 } else { -1 };
                    steps += 1;
                    if pos > max {
                        max = pos;
                    }
                }
                let t = if pos == 0 { (steps - 1) as f64 / n } else { f64::INFINITY };
                let size = match phi {
                    SizeFunctional::Height => max as f64 / n.sqrt(),
                    _ => t,
                };
                (t, size)
            }
            _ => {
                let e = self.draw(rng);
                (e.hitting_time(), phi.size(&e))
            }
        }
    }

    fn big_mass(&self, phi: &SizeFunctional, eps: f64) -> Option<f64> {
        match phi {
            // the excursion maximum reaches m units before the return with
            // probability exactly 1/m
            SizeFunctional::Height => Some(1.0 / height_units(eps, self.n) as f64),
            _ => None,
        }
    }

    fn is_big(&self, phi: &SizeFunctional, eps: f64, size: f64) -> bool {
        match phi {
            // heights live on the lattice ℤ/√n: "big" means at least
            // ⌈ε√n⌉ units, tested with half-unit slack against rounding
            SizeFunctional::Height => {
                let m = height_units(eps, self.n) as f64;
                size * (self.n as f64).sqrt() >= m - 0.5
            }
            _ => size > eps,
        }
    }

    fn draw_big(&self, rng: &mut ChaCha8Rng, phi: &SizeFunctional, eps: f64) -> CadlagPath {
        let m = match phi {
            SizeFunctional::Height => height_units(eps, self.n) as i64,
            // no closed-form conditioning: fall back to rejection
            _ => {
                return loop {
                    let e = self.draw(rng);
                    if phi.size(&e) > eps {
                        break e;
                    }
                };
            }
        };
        // Doob transform: conditioned on reaching m before 0, the walk at
        // k ∈ (0, m) steps up with probability (k+1)/(2k) (harmonic h(k) = k);
        // after m is reached the conditioning has no further effect.
        let sign: i64 = if rng.gen::<bool>() { 1 } else { -1 };
        let mut units = vec![sign];
        let mut pos: i64 = 1;
        let mut killed = false;
        while pos < m {
            let up = rng.gen_bool((pos + 1) as f64 / (2 * pos) as f64);
            pos += if up { 1 } else { -1 };
            units.push(sign * pos);
            if units.len() as u64 >= self.cap_steps {
                killed = true;
                break;
            }
        }
        while pos != 0 && !killed {
            if units.len() as u64 >= self.cap_steps {
                killed = true;
                break;
            }
            pos += if rng.gen::<bool>() { 1 } else { -1 };
            if pos != 0 {
                units.push(sign * pos);
            }
        }
        self.materialize(&units, killed)
    }
}

/// A sampler that always returns the same excursion; the degenerate case
/// where every renewal-theoretic quantity is available in closed form.
#[derive(Debug, Clone)]
pub struct PointMassSampler {
    pub excursion: CadlagPath,
}

impl PointMassSampler {
    pub fn new(excursion: CadlagPath) -> Self {
        assert!(excursion.is_excursion(), "point mass must sit on an excursion");
        PointMassSampler { excursion }
    }
}

impl ExcursionSampler for PointMassSampler {
    fn draw(&self, _rng: &mut ChaCha8Rng) -> CadlagPath {
        self.excursion.clone()
    }

    fn big_mass(&self, phi: &SizeFunctional, eps: f64) -> Option<f64> {
        Some(if phi.size(&self.excursion) > eps { 1.0 } else { 0.0 })
    }
}
