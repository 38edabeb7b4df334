use proptest::prelude::*;

use plurischwarz::affine::{dilatation_affine, dilatation_recover, factorization_check};
use plurischwarz::lincomplex::op_norm_linear;
use plurischwarz::mapfile;
use plurischwarz::oracles::random::{
    gen_plurimap_with, random_contraction, random_invertible, split_seed, trial_rng,
};
use plurischwarz::oracles::RandomInstanceConfig;
use plurischwarz::{CMatrix, CVector, PluriMap, C64};

fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        CMatrix::from_fn(n, |i, j| {
            let (re, im) = v[i * n + j];
            C64::new(re, im)
        })
    })
}

/// A matrix rescaled to operator norm `r`.
fn contraction(n: usize) -> impl Strategy<Value = CMatrix> {
    (matrix(n), 0.0f64..0.95).prop_map(|(m, r)| {
        let norm = op_norm_linear(&m);
        if norm == 0.0 {
            m
        } else {
            m.scale(C64::new(r / norm, 0.0))
        }
    })
}

fn instance(seed: u64, n: usize) -> (PluriMap, CVector) {
    let mut rng = trial_rng(seed, 0);
    let cfg = RandomInstanceConfig {
        n,
        ..RandomInstanceConfig::default()
    };
    let inst = gen_plurimap_with(&mut rng, &cfg).expect("random instance");
    (inst.map, inst.point)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_holds_for_contractive_pairs(
        (w, a) in (1usize..=4).prop_flat_map(|n| (contraction(n), contraction(n)))
    ) {
        let fc = factorization_check(&w, &a).unwrap();
        prop_assert!(fc.residual < 1e-12, "residual {}", fc.residual);
        prop_assert!(fc.det > 0.0);
    }

    #[test]
    fn twisted_dilatation_round_trips(
        (w, a) in (1usize..=4).prop_flat_map(|n| (contraction(n), contraction(n)))
    ) {
        let wf = dilatation_affine(&w, &a).unwrap();
        prop_assert!(dilatation_recover(&wf, &a).unwrap().max_diff(&w) < 1e-12);
    }

    #[test]
    fn op_norm_is_homogeneous_and_dominates_entries(m in (1usize..=4).prop_flat_map(matrix), s in 0.1f64..10.0) {
        let norm = op_norm_linear(&m);
        prop_assert!(norm + 1e-12 >= m.max_abs());
        let scaled = op_norm_linear(&m.scale(C64::new(0.0, s)));
        prop_assert!((scaled - s * norm).abs() <= 1e-12 * s * norm.max(1.0));
    }

    #[test]
    fn pre_schwarzian_is_symmetric(seed in any::<u64>(), n in 1usize..=3) {
        let (f, z) = instance(seed, n);
        let p = f.pre_schwarzian(&z).unwrap();
        prop_assert!(p.asymmetry() < 1e-12);
        let s = f.schwarzian(&z).unwrap();
        prop_assert!(s.asymmetry() < 1e-12);
    }

    #[test]
    fn schwarzian_is_trace_free(seed in any::<u64>(), n in 1usize..=3) {
        let (f, z) = instance(seed, n);
        let s = f.schwarzian(&z).unwrap();
        for i in 0..n {
            let t: C64 = (0..n).map(|j| s.get(j, i, j)).sum();
            prop_assert!(t.norm() < 1e-10 * s.max_abs().max(1.0));
        }
    }

    #[test]
    fn multiplicative_invariance(seed in any::<u64>(), n in 1usize..=3) {
        let (f, z) = instance(seed, n);
        let b = random_invertible(&mut trial_rng(seed, 1), n);
        let p = f.pre_schwarzian(&z).unwrap();
        prop_assert!(f.left_mul(&b).pre_schwarzian(&z).unwrap().max_diff(&p) < 1e-10);
    }

    #[test]
    fn affine_invariance(seed in any::<u64>(), n in 1usize..=3) {
        let (f, z) = instance(seed, n);
        let a = random_contraction(&mut trial_rng(seed, 2), n, 1.0);
        let p = f.pre_schwarzian(&z).unwrap();
        prop_assert!(f.affine_twist(&a).pre_schwarzian(&z).unwrap().max_diff(&p) < 1e-10);
    }

    #[test]
    fn contractive_dilatation_is_sense_preserving(seed in any::<u64>(), n in 1usize..=3) {
        let (f, z) = instance(seed, n);
        let j = f.jet(&z).unwrap();
        prop_assert!(op_norm_linear(&j.omega) < 1.0);
        prop_assert!(j.jacobian() > 0.0);
    }

    #[test]
    fn map_files_round_trip_exactly(seed in any::<u64>(), n in 1usize..=3) {
        let (f, _) = instance(seed, n);
        let text = mapfile::to_json(&f).unwrap();
        prop_assert_eq!(mapfile::from_json(&text).unwrap(), f);
    }

    #[test]
    fn seed_splitting_is_injective_on_small_ranges(seed in any::<u64>()) {
        let mut seen: Vec<u64> = (0..64).map(|i| split_seed(seed, i)).collect();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), 64);
    }
}
