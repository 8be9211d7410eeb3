//! Independent oracles for the distribution pipeline.
//!
//! The quantum oracle (see `common`) reimplements the three-party pure-state
//! pipeline from scratch with plain statevector index arithmetic; the LHV
//! oracle enumerates all hidden-variable assignments in nested loops.

mod common;

use common::{oracle_probs, povms_of, projector_of, random_basis, random_state_vec, C};
use polyloc_core::lhv::{distribution_bruteforce, sample_deterministic_model, sample_model};
use polyloc_core::network::joint_distribution_from;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn pipeline_matches_statevector_oracle_on_random_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..50 {
        let psi: [[C; 4]; 3] = std::array::from_fn(|_| random_state_vec(&mut rng));
        let bases: [[[C; 4]; 4]; 3] = std::array::from_fn(|_| random_basis(&mut rng));
        let expected = oracle_probs(&psi, &bases);
        let states: Vec<_> = psi.iter().map(projector_of).collect();
        let povms = povms_of(&bases);
        let got = joint_distribution_from(&states, &povms).unwrap();
        for (idx, (&e, &g)) in expected.iter().zip(got.probs.iter()).enumerate() {
            assert!(
                (e - g).abs() < 1e-12,
                "trial {trial} outcome {idx}: oracle {e} vs pipeline {g}"
            );
        }
    }
}

#[test]
fn lhv_distribution_matches_nested_loop_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..12 {
        let (n, k) = [(3, 2), (3, 3), (4, 2), (3, 4)][trial % 4];
        let m = if trial % 2 == 0 {
            sample_model(&mut rng, n, k).unwrap()
        } else {
            sample_deterministic_model(&mut rng, n, k).unwrap()
        };
        let fast = m.distribution().unwrap();
        let slow = distribution_bruteforce(&m).unwrap();
        for (a, b) in fast.probs.iter().zip(slow.probs.iter()) {
            assert!((a - b).abs() < 1e-14, "trial {trial}: {a} vs {b}");
        }
    }
}
