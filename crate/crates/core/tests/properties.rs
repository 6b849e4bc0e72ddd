use opball::fixedpoint::{find_fixed_point, FixedPointParams};
use opball::groups::named_group;
use opball::hyperbolic::{distance, midpoint};
use opball::pontryagin::{make_test_representation, PontryaginSignature};
use opball::random::{random_ball_point, random_eta_preserving, random_shape, rng_from_seed};
use opball::{automorphism_apply, mobius_apply, BallAutomorphism, BallPoint};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_a_metric(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (p, q) = random_shape(&mut rng, 5, 3);
        let [a, b, c]: [BallPoint; 3] = std::array::from_fn(|_| random_ball_point(&mut rng, p, q, 0.95));
        let ab = distance(&a, &b).unwrap();
        prop_assert!(distance(&a, &a).unwrap() < 1e-7);
        prop_assert!((ab - distance(&b, &a).unwrap()).abs() < 1e-9);
        prop_assert!(ab <= distance(&a, &c).unwrap() + distance(&c, &b).unwrap() + 1e-9);
    }

    #[test]
    fn mobius_moves_origin_to_its_parameter(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (p, q) = random_shape(&mut rng, 5, 3);
        let a = random_ball_point(&mut rng, p, q, 0.95);
        let image = mobius_apply(&a, &BallPoint::origin(p, q)).unwrap();
        prop_assert!(image.matrix().distance_to(a.matrix()) < 1e-12);
        let back = mobius_apply(&a.neg(), &a).unwrap();
        prop_assert!(back.norm() < 1e-12);
    }

    #[test]
    fn midpoint_splits_distance(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (p, q) = random_shape(&mut rng, 5, 3);
        let x = random_ball_point(&mut rng, p, q, 0.9);
        let y = random_ball_point(&mut rng, p, q, 0.9);
        let m = midpoint(&x, &y).unwrap();
        let d = distance(&x, &y).unwrap();
        prop_assert!((distance(&x, &m).unwrap() - d / 2.0).abs() < 1e-8);
        prop_assert!((distance(&m, &y).unwrap() - d / 2.0).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // Solving for the conjugated group from the moved start lands on the moved solution.
    #[test]
    fn solver_is_equivariant(seed in any::<u64>(), group in prop::sample::select(vec!["C4", "S3", "Q8"])) {
        let sig = PontryaginSignature::new(3, 1).unwrap();
        let rep = make_test_representation(&named_group(group).unwrap(), &sig, 5.0, seed).unwrap();
        let mut rng = rng_from_seed(seed ^ 0x5eed);
        let w = random_eta_preserving(&mut rng, 3, 1, 0.7);
        let j = sig.j();
        let w_inv = &(&j * &w.adjoint()) * &j;
        let moved = rep.conjugate(&w, &w_inv).unwrap();
        let w_aut = BallAutomorphism::new(w, 3, 1).unwrap();

        let params = FixedPointParams::default();
        let x0 = random_ball_point(&mut rng, 3, 1, 0.5);
        let p = find_fixed_point(&rep.automorphism_group().unwrap(), &x0, &params).unwrap();
        let x0_moved = automorphism_apply(&w_aut, &x0).unwrap();
        let p_moved = find_fixed_point(&moved.automorphism_group().unwrap(), &x0_moved, &params).unwrap();
        prop_assert!(p.converged && p_moved.converged);
        let gap = distance(&p_moved.point, &automorphism_apply(&w_aut, &p.point).unwrap()).unwrap();
        prop_assert!(gap <= 10.0 * params.fp_tol, "gap {gap:e}");
    }
}
