//! Simulation of regenerative step processes and the statistical harness
//! around them.
//!
//! * [`srw`] — scaled simple-random-walk engine: bit-stream steps, excursion
//!   runs with absorbing levels, exact Laplace transforms of return times.
//! * [`sampler`] — excursion samplers behind a common trait, including an
//!   exact conditioned-to-be-big walk sampler.
//! * [`regen`] — regenerative process synthesis from (holding rate, excursion
//!   sampler) pairs, the closed-form Laplace transform of the first big-
//!   excursion start, and the triangular-array hypothesis checks.
//! * [`probes`] — per-path modulus-of-continuity probes and the big-excursion
//!   sup-norm tail bound check.
//! * [`harness`] — end-to-end convergence experiments: conditioned-law
//!   comparisons across scales, passage-time identities, and the
//!   big-excursion-list counterexample.

pub mod harness;
pub mod probes;
pub mod regen;
pub mod sampler;
pub mod srw;

pub use regen::{laplace_g_epsilon, laplace_g_limit, HypothesisCheck, RegenerativeSpec};
pub use sampler::{ExcursionSampler, PointMassSampler, SrwSampler};
pub use srw::{
    ceil_snapped, first_return_laplace, floor_snapped, height_units, run_excursion, scaled_srw,
    small_excursion_laplace, srw_big_mass_scaled, strict_height_units, HoldMode, RunEnd, StepRng,
};
