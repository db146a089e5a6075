//! Property tests for the excursion calculus on randomly generated dyadic
//! step paths. Times and values live on a dyadic grid, so the exact
//! (bitwise) equalities asserted here are meaningful: rebasing a window and
//! patching it back reproduces the same floating-point breakpoints.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use excursion_core::io::{read_path_csv, write_path_csv};
use excursion_core::random::{random_step_path, random_subdivision, random_time_change};
use excursion_core::size::{Kernel, SizeFunctional};
use excursion_core::tightness::{modulus_w, modulus_w_prime};
use excursion_core::{
    decompose, extract_all_big, j1_distance, phi_s, pi_subdivision, psi_s, truncate_big,
    truncate_small, e_s,
};

const HORIZON: f64 = 8.0;

proptest! {
    #[test]
    fn keep_erase_equals_extract_then_patch(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_step_path(&mut rng, HORIZON);
        let s = random_subdivision(&mut rng, 12, HORIZON);
        let kept = phi_s(&f, &s);
        let windows = e_s(&f, &s);
        if windows.is_empty() {
            // no kept interval: the keep/erase result is the anchor path
            prop_assert_eq!(kept.breakpoints().len(), 1);
        } else {
            let patched = psi_s(&windows, &s, f.horizon()).unwrap();
            prop_assert_eq!(kept, patched);
        }
    }

    #[test]
    fn truncation_equals_patching_big_excursions(seed in 0u64..500, eps_idx in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_step_path(&mut rng, HORIZON);
        for phi in [SizeFunctional::Height, SizeFunctional::Length,
                    SizeFunctional::Additive(Kernel::Identity)] {
            let eps = [0.25, 0.5, 1.0][eps_idx];
            let trunc = truncate_small(&f, &phi, eps);
            let s = pi_subdivision(&f, &phi, eps);
            let big: Vec<_> = extract_all_big(&f, &phi, eps)
                .into_iter()
                .map(|item| item.path)
                .collect();
            if big.is_empty() {
                prop_assert_eq!(trunc.breakpoints().len(), 1);
            } else {
                let patched = psi_s(&big, &s, f.horizon()).unwrap();
                prop_assert_eq!(trunc, patched);
            }
        }
    }

    #[test]
    fn small_and_big_truncations_partition_excursions(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_step_path(&mut rng, HORIZON);
        let phi = SizeFunctional::Height;
        let eps = 0.5;
        let small_gone = truncate_small(&f, &phi, eps);
        let big_gone = truncate_big(&f, &phi, eps);
        let total = decompose(&f).len();
        let kept = decompose(&small_gone).len() + decompose(&big_gone).len();
        prop_assert_eq!(total, kept);
        // at every time, at most one of the two truncations is off the anchor,
        // and whichever is off the anchor agrees with f
        for (t, v) in f.breakpoints() {
            let a = small_gone.eval(*t);
            let b = big_gone.eval(*t);
            prop_assert!(a == [0.0] || b == [0.0]);
            if v != &[0.0] {
                prop_assert!(a == v.as_slice() || b == v.as_slice());
            }
        }
    }

    #[test]
    fn shifts_compose_on_the_grid(seed in 0u64..500, a in 0i64..256, b in 0i64..256) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_step_path(&mut rng, HORIZON);
        let (a, b) = (a as f64 / 64.0, b as f64 / 64.0);
        let two_step = f.shift(a).unwrap().shift(b).unwrap();
        let one_step = f.shift(a + b).unwrap();
        prop_assert_eq!(two_step.breakpoints(), one_step.breakpoints());
    }

    #[test]
    fn j1_bracket_is_sound_for_time_changed_paths(seed in 0u64..300) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_step_path(&mut rng, HORIZON);
        let tc = random_time_change(&mut rng, HORIZON, 0.125);
        let h = tc.apply(&f);
        let m = 6.0;
        let bracket = j1_distance(&f, &h, m).unwrap();
        prop_assert!(bracket.lower <= bracket.upper);
        // the true distance is at most the deviation of the generating time
        // change, so any certified lower bound must respect it
        let dev = tc.sup_dev_identity(m + 0.25);
        prop_assert!(bracket.lower <= dev + 1e-12,
                     "lower {} exceeds generator deviation {}", bracket.lower, dev);
        // the reported upper bound is achieved by the reported witness
        let moved = bracket.witness.apply(&h);
        let achieved = bracket
            .witness
            .sup_dev_identity(m)
            .max(f.sup_distance(&moved, m).unwrap());
        prop_assert!((achieved - bracket.upper).abs() < 1e-12);
        // and never exceeds the plain sup distance (identity candidate)
        prop_assert!(bracket.upper <= f.sup_distance(&h, m).unwrap() + 1e-12);
    }

    #[test]
    fn cadlag_modulus_survives_truncation(seed in 0u64..300, d_idx in 0usize..3, e_idx in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_step_path(&mut rng, HORIZON);
        let phi = SizeFunctional::Height;
        let delta = [0.05, 0.2, 0.5][d_idx];
        let eps = [0.25, 0.5, 1.0][e_idx];
        let m = 6.0;
        let lhs = modulus_w_prime(&f, m, delta);
        let kept = truncate_small(&f, &phi, eps);
        let erased = truncate_big(&f, &phi, eps);
        let rhs = modulus_w_prime(&kept, m, delta) + 2.0 * erased.sup_to_anchor(m);
        prop_assert!(lhs <= rhs + 1e-12, "w' {} > {}", lhs, rhs);
    }

    #[test]
    fn moduli_are_monotone(seed in 0u64..300) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_step_path(&mut rng, HORIZON);
        let m = 6.0;
        let deltas = [0.05, 0.1, 0.2, 0.4, 0.8];
        for w in deltas.windows(2) {
            prop_assert!(modulus_w(&f, m, w[0]) <= modulus_w(&f, m, w[1]));
            prop_assert!(modulus_w_prime(&f, m, w[0]) <= modulus_w_prime(&f, m, w[1]));
        }
    }

    #[test]
    fn csv_round_trip_is_exact(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_step_path(&mut rng, HORIZON);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        write_path_csv(&f, &p).unwrap();
        prop_assert_eq!(read_path_csv(&p).unwrap(), f);
    }
}
