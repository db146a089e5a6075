//! Excursion calculus for piecewise-constant càdlàg paths.
//!
//! A path is a right-continuous step function on `[0, horizon)` with values
//! in ℝ^d and a distinguished anchor point. Everything in this crate is built
//! on top of that representation:
//!
//! * [`path`] — the path type itself, time changes, sup-norm distances and a
//!   computable two-sided bracket for the Skorokhod J1 distance;
//! * [`ops`] — excursion decomposition, truncation of small/big excursions,
//!   subdivision-driven decomposition and patching, concatenation, thinning;
//! * [`size`] — pluggable size functionals on excursions (length, height,
//!   additive kernels), ε-big extraction and first-passage shifts;
//! * [`tightness`] — the moduli of continuity `w` and `w'`;
//! * [`stats`] — empirical laws, two-sample Kolmogorov-Smirnov distance and
//!   Monte-Carlo estimate bookkeeping;
//! * [`io`] — CSV + JSON-sidecar serialization with bit-exact round trips;
//! * [`random`] — seeded generators of random step paths and subdivisions on
//!   a dyadic time grid, used by property tests and the simulation crates.
//!
//! All operations are pure functions on immutable inputs and are safe to use
//! across threads without synchronization.

pub mod error;
pub mod io;
pub mod j1;
pub mod ops;
pub mod path;
pub mod random;
pub mod size;
pub mod stats;
pub mod tightness;

pub use error::PathError;
pub use j1::j1_distance;
pub use ops::{concat, decompose, decompose_sized, e_s, phi_s, psi_s, thin, truncate_big,
              truncate_small, ExcursionItem, Subdivision};
pub use path::{CadlagPath, J1Bracket, TimeChange};
pub use size::{extract_all_big, extract_big, passage, past_sup_inverse, pi_subdivision,
               shift_to_passage, Kernel, PassageTimes, SizeFunctional};
pub use stats::{ks_two_sample, Accumulator, EmpiricalLaw, KsResult, MCEstimate};
pub use tightness::{modulus_w, modulus_w_prime, ModulusKind, ModulusReport};
