//! End-to-end convergence experiments on the scaled-walk family.
//!
//! * [`eq_cond_check`] — compares, across scales, the joint statistics of the
//!   first big excursion: its start `g_ε`, its lifetime, and its size, each
//!   against a high-scale reference by two-sample Kolmogorov-Smirnov tests.
//! * [`laplace_transfer_check`] — Monte-Carlo `E[e^{−λ g_ε}]` for the
//!   exponential-holds family member against its exact closed form, and
//!   against the high-rate limit form.
//! * [`passage_variant_check`] — per-path identities for the first-passage
//!   representation of the big excursion: `T(e) = T↑ + T(θ_{T↑} e)` exactly,
//!   an overshoot of at most one lattice unit, and agreement of the strict
//!   and inclusive passage variants at levels off the lattice.
//! * [`counterexample_demo`] — two processes with identical ε-big excursion
//!   lists (by length) whose sup statistics diverge as the scale grows:
//!   big-excursion data alone cannot control convergence.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use excursion_core::{
    extract_all_big, ks_two_sample, passage, shift_to_passage, Accumulator, CadlagPath,
    EmpiricalLaw, MCEstimate, SizeFunctional,
};

use crate::regen::{laplace_g_epsilon, laplace_g_limit, srw_small_one_minus_lt};
use crate::srw::{
    height_units, run_excursion, scaled_srw, strict_height_units, HoldMode, RunEnd, StepRng,
};

/// First-big-excursion statistics of one lazy-walk trajectory: the start of
/// the excursion, its lifetime and its size (height), the latter two censored
/// at a fixed time budget (identically at every scale, so censored laws
/// remain comparable across scales).
#[derive(Debug, Clone, Copy)]
pub struct EqCondSample {
    pub g: f64,
    pub lifetime: f64,
    pub size: f64,
}

/// Streams one lazy scaled walk to its first excursion reaching `m_units`
/// and returns the triple; the big excursion is simulated for at most
/// `t_cap` time units.
pub fn sample_first_big(n: u64, m_units: u32, t_cap: f64, rng: ChaCha8Rng) -> EqCondSample {
    let mut steps = StepRng::new(rng);
    let sqrt_n = (n as f64).sqrt();
    let cap_steps = (t_cap * n as f64).round() as u64 + 1;
    let mut slots: u64 = 0;
    loop {
        let run = run_excursion(&mut steps, 0, Some(m_units), u64::MAX);
        if run.end != RunEnd::ReachedLevel {
            // a small excursion: one anchor slot plus its lifetime slots
            slots += run.steps;
            continue;
        }
        let g = (slots + 1) as f64 / n as f64;
        let mut max = run.max_units;
        let (lifetime, size);
        if run.steps >= cap_steps {
            lifetime = t_cap;
            size = max as f64 / sqrt_n;
        } else {
            let rem = run_excursion(&mut steps, m_units, None, cap_steps - run.steps);
            max = max.max(rem.max_units);
            size = max as f64 / sqrt_n;
            lifetime = if rem.end == RunEnd::Capped {
                t_cap
            } else {
                (run.steps + rem.steps - 1) as f64 / n as f64
            };
        }
        return EqCondSample { g, lifetime, size };
    }
}

fn eq_cond_samples(n: u64, eps: f64, samples: usize, t_cap: f64, seed: u64) -> Vec<EqCondSample> {
    let m = height_units(eps, n);
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n);
            rng.set_stream(i as u64);
            sample_first_big(n, m, t_cap, rng)
        })
        .collect()
}

/// One Kolmogorov-Smirnov comparison row.
#[derive(Debug, Clone)]
pub struct KsRow {
    pub n: u64,
    pub reference_n: u64,
    pub eps: f64,
    pub stat: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl KsRow {
    pub fn csv_header() -> &'static str {
        "n,reference_n,eps,stat,statistic,threshold,pass"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n, self.reference_n, self.eps, self.stat, self.statistic, self.threshold, self.pass
        )
    }
}

/// Compares the laws of `(g_ε, lifetime, size)` of the first big excursion at
/// each scale in `n_grid` against the scale `reference_n`, marginal by
/// marginal, at Kolmogorov-Smirnov level `alpha`.
pub fn eq_cond_check(
    n_grid: &[u64],
    reference_n: u64,
    eps_grid: &[f64],
    samples: usize,
    t_cap: f64,
    alpha: f64,
    seed: u64,
) -> Vec<KsRow> {
    let mut rows = Vec::new();
    for &eps in eps_grid {
        let reference = eq_cond_samples(reference_n, eps, samples, t_cap, seed);
        let ref_laws = [
            EmpiricalLaw::new("g", reference.iter().map(|s| s.g).collect()),
            EmpiricalLaw::new("lifetime", reference.iter().map(|s| s.lifetime).collect()),
            EmpiricalLaw::new("size", reference.iter().map(|s| s.size).collect()),
        ];
        for &n in n_grid {
            let sample = eq_cond_samples(n, eps, samples, t_cap, seed.wrapping_add(1));
            let laws = [
                EmpiricalLaw::new("g", sample.iter().map(|s| s.g).collect()),
                EmpiricalLaw::new("lifetime", sample.iter().map(|s| s.lifetime).collect()),
                EmpiricalLaw::new("size", sample.iter().map(|s| s.size).collect()),
            ];
            for (law, ref_law) in laws.iter().zip(&ref_laws) {
                let ks = ks_two_sample(law, ref_law);
                rows.push(KsRow {
                    n,
                    reference_n,
                    eps,
                    stat: law.label().to_string(),
                    statistic: ks.statistic,
                    threshold: ks.threshold(alpha),
                    pass: ks.passes(alpha),
                });
            }
        }
    }
    rows
}

/// One Laplace-transform comparison row: `n,eps,lambda,estimate,se,limit,verdict`
/// with the exact pre-limit closed form alongside.
#[derive(Debug, Clone)]
pub struct LaplaceRow {
    pub n: u64,
    pub eps: f64,
    pub lambda: f64,
    pub estimate: MCEstimate,
    pub closed_form: f64,
    pub limit: f64,
    pub pass: bool,
}

impl LaplaceRow {
    pub fn csv_header() -> &'static str {
        "n,eps,lambda,estimate,se,closed_form,limit,verdict"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.eps,
            self.lambda,
            self.estimate.value,
            self.estimate.std_error,
            self.closed_form,
            self.limit,
            self.pass
        )
    }
}

/// Simulates `g_ε` for the walk member with `Exp(n)` anchor holds: the sum of
/// holds and small-excursion lifetimes until the first excursion reaches
/// `m_units`.
fn sample_g_exp_holds(n: u64, m_units: u32, rng: ChaCha8Rng) -> f64 {
    let mut steps = StepRng::new(rng);
    let mut total = 0.0_f64;
    loop {
        let u: f64 = 1.0 - steps.rng().gen::<f64>();
        total += -u.ln() / n as f64; // Exp(b_n) with b_n = n
        // absorb at m_units: a big excursion is recognized at its passage, so
        // its (heavy-tailed) lifetime never needs to be simulated
        let run = run_excursion(&mut steps, 0, Some(m_units), u64::MAX);
        if run.end == RunEnd::ReachedLevel {
            return total;
        }
        total += (run.steps - 1) as f64 / n as f64;
    }
}

/// Monte-Carlo `E[e^{−λ g_ε}]` for the exponential-holds walk member at scale
/// `n` (holding rate `b_n = n`, mass scale `√n`), against its exact closed
/// form and the limit form (evaluated through a very high scale `10^6`).
pub fn laplace_transfer_check(
    n: u64,
    eps_grid: &[f64],
    lambda_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Vec<LaplaceRow> {
    let b_n = n as f64;
    let mut rows = Vec::new();
    for &eps in eps_grid {
        let m = height_units(eps, n);
        let gs: Vec<f64> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n + m as u64));
                rng.set_stream(i as u64);
                sample_g_exp_holds(n, m, rng)
            })
            .collect();
        for &lambda in lambda_grid {
            let mut acc = Accumulator::default();
            for &g in &gs {
                acc.push((-lambda * g).exp());
            }
            let estimate = acc.estimate(seed);
            let closed = laplace_g_epsilon(
                lambda,
                b_n,
                1.0 / m as f64,
                srw_small_one_minus_lt(n, m, lambda),
            );
            // limit form through a near-limit scale: drift 0, masses under the
            // scaled measure √n₀ × (excursion law at n₀)
            let n0 = 1_000_000u64;
            let c0 = (n0 as f64).sqrt();
            let m0 = height_units(eps, n0);
            let limit = laplace_g_limit(
                lambda,
                0.0,
                c0 / m0 as f64,
                c0 * srw_small_one_minus_lt(n0, m0, lambda),
            );
            let pass = estimate.consistent_with(closed, 3.0, 0.0);
            rows.push(LaplaceRow { n, eps, lambda, estimate, closed_form: closed, limit, pass });
        }
    }
    rows
}

/// Result of the first-passage decomposition check on one scale.
#[derive(Debug, Clone)]
pub struct PassageCheck {
    pub n: u64,
    pub eps: f64,
    pub samples: usize,
    /// Paths where `T(e) ≠ T↑(e) + T(θ_{T↑} e)` exactly.
    pub identity_failures: usize,
    /// Largest observed `|e(T↑)| − ε`.
    pub max_overshoot: f64,
    /// The a-priori bound `1/√n` on the overshoot.
    pub overshoot_bound: f64,
    /// Paths where strict and inclusive passage times differed (must be 0
    /// when ε is not a lattice value).
    pub variant_disagreements: usize,
    /// Paths whose big excursion was censored by the time budget.
    pub censored: usize,
}

/// Materializes, at scale `n` (ideally a power of two so times are dyadic),
/// the first excursion whose height strictly exceeds `eps`, and verifies the
/// passage-time identities path by path.
pub fn passage_variant_check(
    n: u64,
    eps: f64,
    samples: usize,
    t_cap: f64,
    seed: u64,
) -> PassageCheck {
    let m = strict_height_units(eps, n);
    let sqrt_n = (n as f64).sqrt();
    let cap_steps = (t_cap * n as f64).round() as u64 + 1;
    let results: Vec<(bool, f64, bool, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n);
            rng.set_stream(i as u64);
            let sign: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let mut steps = StepRng::new(rng);
            // record whole excursions until one reaches the level within the
            // budget (rejection: the big probability is 1/m); excursions cut
            // by the budget without reaching the level are rejected too
            let mut units: Vec<i64> = Vec::new();
            let mut pos: i64;
            loop {
                units.clear();
                units.push(1);
                pos = 1;
                let mut reached = m <= 1;
                while pos != 0 && (units.len() as u64) < cap_steps {
                    pos += if steps.step() > 0 { 1 } else { -1 };
                    if pos >= m as i64 {
                        reached = true;
                    }
                    if pos != 0 {
                        units.push(pos);
                    }
                }
                if reached {
                    break;
                }
            }
            let censored = pos != 0;
            let mut bps: Vec<(f64, Vec<f64>)> = units
                .iter()
                .enumerate()
                .map(|(j, &u)| (j as f64 / n as f64, vec![sign * u as f64 / sqrt_n]))
                .collect();
            let e = if censored {
                let horizon = units.len() as f64 / n as f64;
                CadlagPath::new(1, vec![0.0], bps, horizon, Some(horizon)).unwrap()
            } else {
                bps.push((units.len() as f64 / n as f64, vec![0.0]));
                CadlagPath::new(1, vec![0.0], bps, f64::INFINITY, None).unwrap()
            };
            let p = passage(&e, eps);
            let up = shift_to_passage(&e, eps).expect("the excursion exceeds eps");
            let identity_ok = if e.hitting_time().is_finite() {
                e.hitting_time() == p.strict + up.hitting_time()
            } else {
                up.hitting_time().is_infinite()
            };
            let overshoot = e.eval(p.strict)[0].abs() - eps;
            (identity_ok, overshoot, p.strict == p.inclusive, censored)
        })
        .collect();
    PassageCheck {
        n,
        eps,
        samples,
        identity_failures: results.iter().filter(|r| !r.0).count(),
        max_overshoot: results.iter().map(|r| r.1).fold(0.0, f64::max),
        overshoot_bound: 1.0 / sqrt_n,
        variant_disagreements: results.iter().filter(|r| !r.2).count(),
        censored: results.iter().filter(|r| r.3).count(),
    }
}

/// Summary of the counterexample at one scale.
#[derive(Debug, Clone)]
pub struct CounterRow {
    pub n: u64,
    pub mean_sup_base: f64,
    pub mean_sup_modified: f64,
    /// Whether the ε-big excursion lists (length functional) of the base and
    /// modified paths agreed exactly on every sample.
    pub big_lists_identical: bool,
}

impl CounterRow {
    pub fn csv_header() -> &'static str {
        "n,mean_sup_base,mean_sup_modified,big_lists_identical"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.n, self.mean_sup_base, self.mean_sup_modified, self.big_lists_identical
        )
    }
}

/// In each lazy walk, replaces every three-slot excursion (unit profile
/// 1, 2, 1) by a spike of the same length and interval but height `√n`.
fn spike_small_excursions(f: &CadlagPath, n: u64) -> CadlagPath {
    let sqrt_n = (n as f64).sqrt();
    let bps = f.breakpoints();
    let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(bps.len());
    let mut i = 0usize;
    while i < bps.len() {
        // a three-slot excursion: zero, a, b, c, zero with a,b,c ≠ 0
        let is_spike_site = i + 4 < bps.len()
            && bps[i].1[0] == 0.0
            && bps[i + 1].1[0] != 0.0
            && bps[i + 2].1[0] != 0.0
            && bps[i + 3].1[0] != 0.0
            && bps[i + 4].1[0] == 0.0;
        if is_spike_site {
            let sign = bps[i + 1].1[0].signum();
            out.push((bps[i].0, vec![0.0]));
            out.push((bps[i + 1].0, vec![sign * sqrt_n / 2.0]));
            out.push((bps[i + 2].0, vec![sign * sqrt_n]));
            out.push((bps[i + 3].0, vec![sign * sqrt_n / 2.0]));
            i += 4;
        } else {
            out.push((bps[i].0, bps[i].1.clone()));
            i += 1;
        }
    }
    CadlagPath::new(1, vec![0.0], out, f.horizon(), f.killed_at()).expect("modified path is valid")
}

/// Demonstrates that identical ε-big excursion data (length functional) does
/// not control path statistics: the modified family's mean sup diverges with
/// the scale while every big excursion stays bit-for-bit the same.
pub fn counterexample_demo(
    n_grid: &[u64],
    horizon: f64,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Vec<CounterRow> {
    let phi = SizeFunctional::Length;
    n_grid
        .iter()
        .map(|&n| {
            let per_path: Vec<(f64, f64, bool)> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n);
                    rng.set_stream(i as u64);
                    let base = scaled_srw(n, horizon, HoldMode::LazyExact, rng);
                    let modified = spike_small_excursions(&base, n);
                    let a = extract_all_big(&base, &phi, eps);
                    let b = extract_all_big(&modified, &phi, eps);
                    let same = a.len() == b.len()
                        && a.iter().zip(&b).all(|(x, y)| {
                            x.left == y.left
                                && x.right == y.right
                                && x.size == y.size
                                && x.path.breakpoints() == y.path.breakpoints()
                        });
                    (base.sup_to_anchor(horizon), modified.sup_to_anchor(horizon), same)
                })
                .collect();
            let k = per_path.len() as f64;
            CounterRow {
                n,
                mean_sup_base: per_path.iter().map(|r| r.0).sum::<f64>() / k,
                mean_sup_modified: per_path.iter().map(|r| r.1).sum::<f64>() / k,
                big_lists_identical: per_path.iter().all(|r| r.2),
            }
        })
        .collect()
}
