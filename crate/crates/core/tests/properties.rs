//! Property tests over generated pairs.

use projbound::bounds::{evaluate_all, BoundConfig, BoundId, DEFAULT_BOUND_TOL};
use projbound::experiments::{gen_matrices, haar_unitary, random_hermitian, sample_rng, EnsembleSpec};
use projbound::identities::{all_identities, deviation_exact, trace_inequality_check, DEFAULT_RESIDUAL_TOL};
use projbound::pair::PerturbationPair;
use proptest::prelude::*;

fn arb_spec() -> impl Strategy<Value = EnsembleSpec> {
    (1usize..8, 1usize..8, any::<u64>(), proptest::option::of(-6i32..0))
        .prop_flat_map(|(m, n, seed, exp)| {
            let k = m.min(n);
            (Just((m, n, seed, exp)), 1..=k, 1..=k)
        })
        .prop_map(|((m, n, seed, exp), r, s)| EnsembleSpec {
            // additive perturbations keep B's rank at rank_a
            rank_b: if exp.is_some() { r } else { s },
            perturb_scale: exp.map(|e| 10f64.powi(e)),
            ..EnsembleSpec::independent(m, n, r, s, seed)
        })
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bounds_sandwich_the_deviations(spec in arb_spec()) {
        let (a, b) = gen_matrices(&spec, 0).unwrap();
        let pair = PerturbationPair::new(a, b).unwrap();
        let dev = deviation_exact(&pair);
        for r in evaluate_all(&pair, &BoundConfig::default()).unwrap().iter().filter(|r| r.applicable) {
            prop_assert!(r.holds(&dev, DEFAULT_BOUND_TOL), "{} {:?}: {} vs {}", r.bound_id, r.params, r.value, r.exact_target(&dev));
        }
    }

    #[test]
    fn identities_hold(spec in arb_spec()) {
        let (a, b) = gen_matrices(&spec, 0).unwrap();
        let pair = PerturbationPair::new(a, b).unwrap();
        for r in all_identities(&pair) {
            prop_assert!(r.within(DEFAULT_RESIDUAL_TOL), "{}: {:e}", r.identity_id, r.abs_residual);
        }
    }

    #[test]
    fn deviations_are_symmetric_in_the_pair(spec in arb_spec()) {
        let (a, b) = gen_matrices(&spec, 0).unwrap();
        let ab = deviation_exact(&PerturbationPair::new(a.clone(), b.clone()).unwrap());
        let ba = deviation_exact(&PerturbationPair::new(b, a).unwrap());
        prop_assert!(close(ab.primal, ba.primal, 1e-10));
        prop_assert!(close(ab.dual, ba.dual, 1e-10));
    }

    #[test]
    fn plain_bounds_are_scale_invariant(spec in arb_spec(), exp in -3i32..=3) {
        let c = 10f64.powi(exp);
        let (a, b) = gen_matrices(&spec, 0).unwrap();
        let base = evaluate_all(&PerturbationPair::new(a.clone(), b.clone()).unwrap(), &BoundConfig::default()).unwrap();
        let scaled = evaluate_all(&PerturbationPair::new(a.scale(c), b.scale(c)).unwrap(), &BoundConfig::default()).unwrap();
        prop_assert_eq!(base.len(), scaled.len());
        for (x, y) in base.iter().zip(&scaled) {
            prop_assert_eq!(x.bound_id, y.bound_id);
            prop_assert_eq!(x.applicable, y.applicable);
            // interior parameters mix ||A||^2 with ||A^+||^2
            if x.applicable && x.params.is_none() {
                prop_assert!(close(x.value, y.value, 1e-8), "{}: {} vs {}", x.bound_id, x.value, y.value);
            }
        }
    }

    #[test]
    fn deviations_are_unitarily_invariant(spec in arb_spec()) {
        let (a, b) = gen_matrices(&spec, 0).unwrap();
        let mut rng = sample_rng(spec.seed, 1);
        let u = haar_unitary(&mut rng, spec.m).unwrap();
        let v = haar_unitary(&mut rng, spec.n).unwrap();
        let rotate = |x: &_| &(&u * x) * &v;
        let before = deviation_exact(&PerturbationPair::new(a.clone(), b.clone()).unwrap());
        let after = deviation_exact(&PerturbationPair::new(rotate(&a), rotate(&b)).unwrap());
        prop_assert!(close(before.primal, after.primal, 1e-9));
        prop_assert!(close(before.dual, after.dual, 1e-9));
    }

    #[test]
    fn rank_bounds_are_integral_and_ordered(spec in arb_spec()) {
        let (a, b) = gen_matrices(&spec, 0).unwrap();
        let pair = PerturbationPair::new(a, b).unwrap();
        let records = evaluate_all(&pair, &BoundConfig::default()).unwrap();
        let get = |id| records.iter().find(|r| r.bound_id == id).unwrap().value;
        let (lo, up) = (get(BoundId::RankLow), get(BoundId::RankUp));
        prop_assert_eq!(lo.fract(), 0.0);
        prop_assert_eq!(up.fract(), 0.0);
        prop_assert!(lo <= up && up <= 2.0 * spec.m.min(spec.n) as f64);
    }

    #[test]
    fn trace_sandwich(order in 1usize..9, seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 0);
        let m = random_hermitian(&mut rng, order).unwrap();
        let n = random_hermitian(&mut rng, order).unwrap();
        let t = trace_inequality_check(&m, &n).unwrap();
        prop_assert!(t.holds(1e-10), "{:?}", t);
        let same = trace_inequality_check(&m, &m).unwrap();
        prop_assert!(close(same.value, same.upper, 1e-10));
    }
}
