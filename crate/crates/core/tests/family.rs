use proptest::prelude::*;
use softconj::{
    check_frechet, eval_average, eval_family, eval_lukasiewicz, resolve_c1, BoundCheck, BoundSide, Lukasiewicz,
    ProbabilityVector, SoftConjunction,
};

fn luk_oracle(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    (p.iter().sum::<f64>() - (n - 1.0)).max(0.0)
}

fn family_oracle(blend: f64, p: &[f64]) -> f64 {
    let n = p.len() as f64;
    let c1 = 1.0 / n + blend * (1.0 - 1.0 / n);
    (c1 * p.iter().sum::<f64>() - (n * c1 - 1.0)).max(0.0)
}

fn probs(max_arity: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, 1..=max_arity)
}

fn pv(p: &[f64]) -> ProbabilityVector {
    ProbabilityVector::new(p.to_vec()).unwrap()
}

proptest! {
    #[test]
    fn endpoints_are_exact(p in probs(6)) {
        let v = pv(&p);
        prop_assert_eq!(eval_family(SoftConjunction::lukasiewicz(), &v), eval_lukasiewicz(&v));
        prop_assert_eq!(eval_family(SoftConjunction::average(), &v), eval_average(&v));
        prop_assert!((eval_lukasiewicz(&v) - luk_oracle(&p)).abs() < 1e-12);
    }

    #[test]
    fn matches_the_slope_formula(blend in 0.0..=1.0f64, p in probs(6)) {
        let got = eval_family(SoftConjunction::new(blend).unwrap(), &pv(&p));
        prop_assert!((got - family_oracle(blend, &p)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&got));
    }

    #[test]
    fn permutation_invariant(blend in 0.0..=1.0f64, p in probs(6), rot in 0usize..6) {
        let op = SoftConjunction::new(blend).unwrap();
        let mut q = p.clone();
        q.reverse();
        let k = rot % q.len();
        q.rotate_left(k);
        prop_assert!((eval_family(op, &pv(&p)) - eval_family(op, &pv(&q))).abs() < 1e-12);
    }

    #[test]
    fn monotone(blend in 0.0..=1.0f64, p in probs(6), bumps in prop::collection::vec(0.0..=1.0f64, 6)) {
        let op = SoftConjunction::new(blend).unwrap();
        let q: Vec<f64> = p.iter().zip(&bumps).map(|(a, b)| a + (1.0 - a) * b).collect();
        prop_assert!(eval_family(op, &pv(&p)) <= eval_family(op, &pv(&q)) + 1e-12);
    }

    #[test]
    fn boundary_normalization(blend in 0.0..=1.0f64, n in 1usize..=8) {
        let op = SoftConjunction::new(blend).unwrap();
        prop_assert_eq!(eval_family(op, &pv(&vec![0.0; n])), 0.0);
        prop_assert_eq!(eval_family(op, &pv(&vec![1.0; n])), 1.0);
    }

    #[test]
    fn unary_is_identity(blend in 0.0..=1.0f64, x in 0.0..=1.0f64) {
        prop_assert_eq!(eval_family(SoftConjunction::new(blend).unwrap(), &pv(&[x])), x);
    }

    #[test]
    fn lukasiewicz_stays_within_bounds(p in probs(8)) {
        prop_assert!(check_frechet(&Lukasiewicz, &pv(&p)).unwrap().holds());
    }

    #[test]
    fn every_soft_member_breaks_the_upper_bound(blend in 0.0..1.0f64, n in 2usize..=8) {
        let op = SoftConjunction::new(blend).unwrap();
        let mut p = vec![1.0; n];
        p[1] = 0.0;
        let c1 = resolve_c1(op, n).unwrap();
        match check_frechet(&op, &pv(&p)).unwrap() {
            BoundCheck::Violated { side, gap, .. } => {
                prop_assert_eq!(side, BoundSide::Upper);
                prop_assert!((gap - (1.0 - c1)).abs() < 1e-12);
            }
            BoundCheck::Within { .. } => prop_assert!(false, "blend {} stayed within bounds", blend),
        }
    }
}

#[test]
fn average_examples() {
    assert_eq!(eval_average(&pv(&[1.0, 0.0, 1.0])), 2.0 / 3.0);
    let avg = |p: &[f64]| eval_average(&pv(p));
    assert_eq!(avg(&[0.0, avg(&[0.5, 1.0])]), 0.375);
    assert_eq!(avg(&[avg(&[0.0, 0.5]), 1.0]), 0.625);
}
