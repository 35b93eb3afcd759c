use proptest::prelude::*;
use softconj::audit::{decompose, decompose_interior, uniqueness_audit, Min, Product, Regime, VertexCombination};
use softconj::{eval_lukasiewicz, Average, BinaryVector, ConjunctionOp, Lukasiewicz, ProbabilityVector};

fn check_combination(p: &[f64], c: &VertexCombination) -> Result<(), TestCaseError> {
    for (_, w) in c.terms() {
        prop_assert!(*w >= 0.0);
    }
    prop_assert!((c.total_weight() - 1.0).abs() < 1e-12);
    // reconstruction computed here rather than through the library
    let mut sum = vec![0.0; p.len()];
    for (v, w) in c.terms() {
        for (s, bit) in sum.iter_mut().zip(v.bits()) {
            if *bit {
                *s += w;
            }
        }
    }
    for (a, b) in sum.iter().zip(p) {
        prop_assert!((a - b).abs() < 1e-12, "{:?} vs {:?}", sum, p);
    }
    let n = p.len() as f64;
    let top = (p.iter().sum::<f64>() - (n - 1.0)).max(0.0);
    prop_assert!((c.weight_on(&BinaryVector::ones(p.len())) - top).abs() < 1e-12);
    Ok(())
}

/// Vectors with sum strictly below, on, or above `n - 1`.
fn in_regime(regime: u8) -> impl Strategy<Value = Vec<f64>> {
    (2usize..=6, prop::collection::vec(0.0..=1.0f64, 6), 0usize..6, 0.0..1.0f64).prop_map(move |(n, raw, pick, s)| {
        let mut p = raw[..n].to_vec();
        let target = n as f64 - 1.0;
        match regime {
            0 => {
                let sum: f64 = p.iter().sum();
                if sum >= target {
                    let scale = (target * (0.999 * s)) / sum;
                    p.iter_mut().for_each(|x| *x *= scale);
                }
            }
            1 => {
                // all ones except one coordinate at zero, then shift mass
                p = vec![1.0; n];
                p[pick % n] = 0.0;
                let j = (pick + 1) % n;
                let d = s * 0.9;
                p[pick % n] += d;
                p[j] -= d;
            }
            _ => {
                p.iter_mut().for_each(|x| *x = 1.0 - (1.0 - *x) * (0.999 / n as f64) * (1.0 - s * 0.5));
            }
        }
        p
    })
}

proptest! {
    #[test]
    fn interior_regime(p in in_regime(0)) {
        let v = ProbabilityVector::new(p.clone()).unwrap();
        prop_assert_eq!(Regime::of(&v), Regime::Interior);
        let c = decompose(&v).unwrap();
        check_combination(&p, &c)?;
        for (vertex, _) in decompose_interior(&v).unwrap().terms() {
            let t = ProbabilityVector::new(vertex.to_f64()).unwrap();
            prop_assert_eq!(eval_lukasiewicz(&t), 0.0);
        }
    }

    #[test]
    fn boundary_regime(p in in_regime(1)) {
        let v = ProbabilityVector::new(p.clone()).unwrap();
        check_combination(&p, &decompose(&v).unwrap())?;
    }

    #[test]
    fn upper_regime(p in in_regime(2)) {
        let v = ProbabilityVector::new(p.clone()).unwrap();
        prop_assert_eq!(Regime::of(&v), Regime::Upper);
        check_combination(&p, &decompose(&v).unwrap())?;
    }

    /// Replays the uniqueness argument: an operation within the bounds is
    /// 0 on every non-top vertex and 1 on the top one, so convexity caps it
    /// at the top weight, which is the Łukasiewicz value.
    #[test]
    fn jensen_consequence_for_lukasiewicz(p in prop::collection::vec(0.0..=1.0f64, 2..=6)) {
        let v = ProbabilityVector::new(p.clone()).unwrap();
        let c = decompose(&v).unwrap();
        let cap: f64 = c.terms().iter().map(|(t, w)| w * Lukasiewicz.apply(&t.to_f64())).sum();
        let value = Lukasiewicz.apply(&p);
        prop_assert!(value <= cap + 1e-9);
        prop_assert!((value - eval_lukasiewicz(&v)).abs() < 1e-9);
        prop_assert!((cap - eval_lukasiewicz(&v)).abs() < 1e-9);
    }
}

#[test]
fn premise_fails_for_the_other_operations() {
    let ops: [&dyn ConjunctionOp; 3] = [&Min, &Product, &Average];
    for op in ops {
        let report = uniqueness_audit(op, 2, 10_000, 11).unwrap();
        assert!(!report.verdict.is_convex() || !report.verdict.is_logical(), "{}", op.name());
    }
}

#[test]
fn audits_are_deterministic() {
    let a = uniqueness_audit(&Product, 3, 2_000, 5).unwrap();
    let b = uniqueness_audit(&Product, 3, 2_000, 5).unwrap();
    assert_eq!(a, b);
}
