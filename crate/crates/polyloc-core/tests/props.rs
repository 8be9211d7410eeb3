//! Property tests for invariants that hold by construction.

use polyloc_core::lhv::sample_model;
use polyloc_core::network::ProbabilityTable;
use polyloc_core::scan::maximize;
use polyloc_core::signs::{evaluate_ngon, evaluate_trilocal, SignFunction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_sign() -> impl Strategy<Value = SignFunction> {
    any::<u8>().prop_map(|mask| {
        let mut table = [[1i8; 4]; 2];
        for bit in 0..8 {
            table[bit / 4][bit % 4] = if (mask >> bit) & 1 == 0 { 1 } else { -1 };
        }
        SignFunction { table }
    })
}

fn arb_table(n: usize) -> impl Strategy<Value = ProbabilityTable> {
    let total = 1usize << (2 * n);
    proptest::collection::vec(0.0f64..1.0, total).prop_map(move |mut raw| {
        let s: f64 = raw.iter().sum::<f64>().max(1e-9);
        for v in raw.iter_mut() {
            *v /= s;
        }
        ProbabilityTable::new(n, raw).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn global_flip_of_any_party_is_invariant(
        p in arb_table(3),
        f in arb_sign(), g in arb_sign(), h in arb_sign(),
        which in 0usize..3,
    ) {
        let base = evaluate_trilocal(&p, &f, &g, &h).unwrap();
        let mut fs = [f, g, h];
        fs[which] = fs[which].flipped();
        let flipped = evaluate_trilocal(&p, &fs[0], &fs[1], &fs[2]).unwrap();
        prop_assert!((base.s_value - flipped.s_value).abs() < 1e-12);
        prop_assert!((base.i1.abs() - flipped.i1.abs()).abs() < 1e-12);
        prop_assert!((base.i2.abs() - flipped.i2.abs()).abs() < 1e-12);
    }

    #[test]
    fn invariants_are_affine_in_the_distribution(
        p in arb_table(3), q in arb_table(3), w in 0.0f64..1.0,
        f in arb_sign(), g in arb_sign(), h in arb_sign(),
    ) {
        let mixed_probs: Vec<f64> = p.probs.iter().zip(q.probs.iter())
            .map(|(&a, &b)| w * a + (1.0 - w) * b).collect();
        let mixed = ProbabilityTable::new(3, mixed_probs).unwrap();
        let rp = evaluate_trilocal(&p, &f, &g, &h).unwrap();
        let rq = evaluate_trilocal(&q, &f, &g, &h).unwrap();
        let rm = evaluate_trilocal(&mixed, &f, &g, &h).unwrap();
        prop_assert!((rm.i1 - (w * rp.i1 + (1.0 - w) * rq.i1)).abs() < 1e-12);
        prop_assert!((rm.i2 - (w * rp.i2 + (1.0 - w) * rq.i2)).abs() < 1e-12);
    }

    #[test]
    fn deterministic_point_distributions_never_violate(
        outcome in 0usize..64,
        f in arb_sign(), g in arb_sign(), h in arb_sign(),
    ) {
        // a delta distribution is a (trivially) trilocal product strategy
        let mut probs = vec![0.0; 64];
        probs[outcome] = 1.0;
        let p = ProbabilityTable::new(3, probs).unwrap();
        let r = evaluate_trilocal(&p, &f, &g, &h).unwrap();
        prop_assert!(r.s_value <= 1.0 + 1e-12, "s = {}", r.s_value);
    }

    #[test]
    fn invariant_magnitudes_are_bounded(
        p in arb_table(4),
        fs in proptest::collection::vec(arb_sign(), 4),
        t in 0usize..4,
    ) {
        let r = evaluate_ngon(&p, &fs, t).unwrap();
        prop_assert!(r.i1.abs() <= 1.0 + 1e-12);
        prop_assert!(r.i2.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn lhv_models_yield_valid_distributions(seed in 0u64..200, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = sample_model(&mut rng, 3, k).unwrap();
        let p = m.distribution().unwrap();
        let total: f64 = p.probs.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!(p.probs.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn maximize_dominates_coarse_grid(a in -0.9f64..0.9, b in -0.9f64..0.9) {
        let r = maximize(&[(-1.0, 1.0), (-1.0, 1.0)], |c| {
            Ok(-(c[0] - a).powi(2) - 0.5 * (c[1] - b).powi(2))
        }).unwrap();
        // best coarse-grid point on the 21x21 lattice
        let mut grid_best = f64::NEG_INFINITY;
        for i in 0..21 {
            for j in 0..21 {
                let x = -1.0 + 0.1 * i as f64;
                let y = -1.0 + 0.1 * j as f64;
                grid_best = grid_best.max(-(x - a).powi(2) - 0.5 * (y - b).powi(2));
            }
        }
        prop_assert!(r.value >= grid_best - 1e-12);
        prop_assert!(r.value >= -1e-6);
    }
}
