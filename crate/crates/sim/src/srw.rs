//! Scaled simple-random-walk engine.
//!
//! The walk takes ±1 steps with equal probability, consumed bit by bit from a
//! counter-based generator. In diffusive scaling the position after `j` steps
//! is reported as `S_j / √n` at time `j / n`; the anchor value 0 is written
//! exactly, so anchor membership and zero-set measures stay exact.
//!
//! Exact distributional facts used as ground truth by the statistical layer:
//!
//! * first-return-time transform `E[z^T] = 1 − √(1 − z²)` (steps counted in
//!   units of the walk);
//! * the restricted transform `E[z^T; max |S| < m]` solves a tridiagonal
//!   system (absorption at 0 and at ±m) and is computed by the Thomas
//!   algorithm;
//! * an excursion reaches absolute height `m` before returning to 0 with
//!   probability exactly `1/m`.

use rand::RngCore;
use rand_chacha::ChaCha8Rng;

use excursion_core::CadlagPath;

/// Rounds up, snapping values within `1e-9` of an integer to that integer, so
/// that products like `0.3 · √10000 = 30.000000000000004` give 30, not 31.
pub fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.ceil()
    }
}

/// Rounds down with the same integer snapping as [`ceil_snapped`].
pub fn floor_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.floor()
    }
}

/// Walk-level threshold for "scaled height at least `eps`": an excursion of
/// the `n`-th walk has scaled height `≥ eps` exactly when its unscaled
/// maximum reaches `⌈eps √n⌉` units.
pub fn height_units(eps: f64, n: u64) -> u32 {
    let m = ceil_snapped(eps * (n as f64).sqrt());
    assert!(m >= 1.0, "threshold below one walk unit");
    m as u32
}

/// Walk-level threshold for the strict inequality "scaled height `> eps`":
/// `⌊eps √n⌋ + 1` units.
pub fn strict_height_units(eps: f64, n: u64) -> u32 {
    floor_snapped(eps * (n as f64).sqrt()) as u32 + 1
}

/// The ε-tail of the scaled excursion measure of the `n`-th walk with the
/// height functional, in closed form: `√n / ⌈ε√n⌉` (mass scale `√n` times
/// the reach probability `1/m`).
pub fn srw_big_mass_scaled(n: u64, eps: f64) -> f64 {
    (n as f64).sqrt() / height_units(eps, n) as f64
}

/// ±1 step source drawing one bit per step from a ChaCha stream.
pub struct StepRng {
    rng: ChaCha8Rng,
    bits: u64,
    left: u32,
}

impl StepRng {
    pub fn new(rng: ChaCha8Rng) -> Self {
        StepRng { rng, bits: 0, left: 0 }
    }

    #[inline]
    pub fn step(&mut self) -> i64 {
        if self.left == 0 {
            self.bits = self.rng.next_u64();
            self.left = 64;
        }
        let s = (self.bits & 1) as i64 * 2 - 1;
        self.bits >>= 1;
        self.left -= 1;
        s
    }

    /// Access to the underlying generator (for holding times etc.).
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// How a simulated excursion run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunEnd {
    /// The walk returned to 0: the excursion is complete.
    ReturnedToZero,
    /// The walk reached the absorbing level before returning to 0.
    ReachedLevel,
    /// The step budget ran out first.
    Capped,
}

/// Outcome of an excursion run: step count, running maximum of `|S|`, final
/// `|S|`, and how the run ended.
#[derive(Debug, Clone, Copy)]
pub struct ExcursionRun {
    pub steps: u64,
    pub max_units: u32,
    pub final_units: u32,
    pub end: RunEnd,
}

/// Runs `|S|` from `start` units until it returns to 0, reaches `level` (if
/// given), or exhausts `cap_steps`. `|S|` is itself a simple random walk away
/// from 0, so only the absolute position is simulated. With `start = 0` the
/// first step (to 1 unit) is counted.
pub fn run_excursion(
    steps: &mut StepRng,
    start: u32,
    level: Option<u32>,
    cap_steps: u64,
) -> ExcursionRun {
    let mut pos = start;
    let mut max = start;
    let mut count: u64 = 0;
    if pos == 0 {
        pos = 1;
        max = 1;
        count = 1;
    }
    loop {
        if Some(pos) == level {
            return ExcursionRun { steps: count, max_units: max, final_units: pos, end: RunEnd::ReachedLevel };
        }
        if pos == 0 {
            return ExcursionRun { steps: count, max_units: max, final_units: 0, end: RunEnd::ReturnedToZero };
        }
        if count >= cap_steps {
            return ExcursionRun { steps: count, max_units: max, final_units: pos, end: RunEnd::Capped };
        }
        if steps.step() > 0 {
            pos += 1;
            if pos > max {
                max = pos;
            }
        } else {
            pos -= 1;
        }
        count += 1;
    }
}

/// `E[z^T]` for the first return time `T` (in steps) of the walk to 0.
pub fn first_return_laplace(z: f64) -> f64 {
    1.0 - (1.0 - z * z).sqrt()
}

/// `E[z^T; max |S| < m]` for the first return time `T` (in steps): the
/// transform restricted to excursions that stay strictly below `m` units.
///
/// With `u_k = E_k[z^{absorption time} ; absorbed at 0]` for the walk on
/// `{0, …, m}`, the harmonic relations `u_k = z(u_{k−1} + u_{k+1})/2`,
/// `u_0 = 1`, `u_m = 0` form a tridiagonal system solved exactly by the
/// Thomas algorithm; the excursion transform is `z · u_1` (the first step of
/// the excursion costs one factor of `z`).
pub fn small_excursion_laplace(m: u32, z: f64) -> f64 {
    assert!(m >= 1 && (0.0..=1.0).contains(&z));
    if m == 1 {
        return 0.0;
    }
    let k = (m - 1) as usize; // unknowns u_1 … u_{m−1}
    let half = z / 2.0;
    // system: u_i − half·u_{i−1} − half·u_{i+1} = rhs_i
    let mut diag = vec![1.0_f64; k];
    let mut rhs = vec![0.0_f64; k];
    rhs[0] = half; // from u_0 = 1
    for i in 1..k {
        let w = half / diag[i - 1];
        diag[i] -= w * half;
        let prev = rhs[i - 1];
        rhs[i] += w * prev;
    }
    let mut u = vec![0.0_f64; k];
    u[k - 1] = rhs[k - 1] / diag[k - 1];
    for i in (0..k - 1).rev() {
        u[i] = (rhs[i] + half * u[i + 1]) / diag[i];
    }
    z * u[0]
}

/// Clock of a synthesized walk: either the walk's own lazy clock (each step
/// takes exactly `1/n`, anchor visits included) or exponential holding times
/// at the anchor with the given rate (steps off the anchor still take `1/n`).
#[derive(Debug, Clone, Copy)]
pub enum HoldMode {
    LazyExact,
    ExpHolds(f64),
}

/// Materializes the scaled walk `t ↦ S_{⌊nt⌋}/√n` on `[0, horizon)`.
///
/// Breakpoint times are exact multiples of `1/n` in [`HoldMode::LazyExact`];
/// values are exact multiples of `1/√n` with the anchor written as exact 0.
/// The path is marked killed at the horizon when it ends off the anchor.
pub fn scaled_srw(n: u64, horizon: f64, mode: HoldMode, rng: ChaCha8Rng) -> CadlagPath {
    let mut steps = StepRng::new(rng);
    let sqrt_n = (n as f64).sqrt();
    let dt = 1.0 / n as f64;
    let mut pos: i64 = 0;
    let mut t = 0.0_f64;
    let mut bps: Vec<(f64, Vec<f64>)> = vec![(0.0, vec![0.0])];
    loop {
        t += match mode {
            HoldMode::LazyExact => dt,
            HoldMode::ExpHolds(rate) if pos == 0 => {
                use rand::Rng;
                let u: f64 = 1.0 - steps.rng().gen::<f64>();
                -u.ln() / rate
            }
            HoldMode::ExpHolds(_) => dt,
        };
        if t >= horizon {
            break;
        }
        pos += steps.step();
        let value = if pos == 0 { 0.0 } else { pos as f64 / sqrt_n };
        bps.push((t, vec![value]));
    }
    let killed = if pos != 0 { Some(horizon) } else { None };
    CadlagPath::new(1, vec![0.0], bps, horizon, killed).expect("walk path is valid")
}
