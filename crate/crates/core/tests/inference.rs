use proptest::prelude::*;
use softconj::inference::{
    evaluate_objective, export_lp, grid_oracle, solve_subgradient, Interpretation, LinearProgram, LossSpec, SolveConfig,
};
use softconj::lang::{ground, parse_program, GroundAtom, GroundModel, GroundRule};
use softconj::{models, SoftConjunction};

fn model(text: &str) -> GroundModel {
    ground(&parse_program(text).unwrap()).unwrap()
}

fn conflict(w_ab: f64, w_bc: f64) -> GroundModel {
    model(&format!(
        "predicate A\npredicate B\npredicate C\nevidence A = 1\nevidence C = 0\nrule {w_ab:?} : A -> B\nrule {w_bc:?} : B -> C\n"
    ))
}

/// Three free atoms, two rules sharing a head.
fn small_free_model() -> GroundModel {
    let atoms = ["A", "B", "C", "D"].iter().map(|n| GroundAtom::new(*n, &[])).collect();
    GroundModel::new(
        atoms,
        vec![Some(0.8), None, None, None],
        vec![
            GroundRule { weight: 1.5, body: vec![0, 1], head: 2, source: 0 },
            GroundRule { weight: 0.7, body: vec![2, 3, 0], head: 1, source: 1 },
        ],
    )
    .unwrap()
}

fn free_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, n)
}

proptest! {
    #[test]
    fn objective_is_convex(
        blend in 0.0..=1.0f64,
        squared in any::<bool>(),
        x in free_values(3),
        y in free_values(3),
        lambda in 0.0..=1.0f64,
    ) {
        let m = small_free_model();
        let op = SoftConjunction::new(blend).unwrap();
        let loss = if squared { LossSpec::squared() } else { LossSpec::linear() };
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let f = |v: &[f64]| evaluate_objective(&m, &Interpretation::with_free_values(&m, v).unwrap(), op, loss).unwrap();
        prop_assert!(f(&mid) <= lambda * f(&x) + (1.0 - lambda) * f(&y) + 1e-9);
    }

    #[test]
    fn objective_is_zero_exactly_when_rules_hold(blend in 0.0..=1.0f64, x in free_values(3)) {
        let m = small_free_model();
        let op = SoftConjunction::new(blend).unwrap();
        let interp = Interpretation::with_free_values(&m, &x).unwrap();
        let obj = evaluate_objective(&m, &interp, op, LossSpec::linear()).unwrap();
        prop_assert!(obj >= 0.0);
        let v = interp.values();
        let satisfied = m.rules().iter().all(|r| {
            let body: Vec<f64> = r.body.iter().map(|&i| v[i]).collect();
            let n = body.len() as f64;
            let c1 = 1.0 / n + blend * (1.0 - 1.0 / n);
            (c1 * body.iter().sum::<f64>() - (n * c1 - 1.0)).max(0.0) <= v[r.head]
        });
        prop_assert_eq!(obj == 0.0, satisfied);
    }

    #[test]
    fn lp_matches_objective(blend in 0.0..=1.0f64, x in free_values(3)) {
        let m = small_free_model();
        let op = SoftConjunction::new(blend).unwrap();
        let lp = LinearProgram::parse(&export_lp(&m, op, LossSpec::linear()).unwrap().to_string()).unwrap();
        let interp = Interpretation::with_free_values(&m, &x).unwrap();
        let assignment = lp.tight_assignment(interp.values()).unwrap();
        let direct = evaluate_objective(&m, &interp, op, LossSpec::linear()).unwrap();
        prop_assert!((lp.objective_value(&assignment).unwrap() - direct).abs() < 1e-9);
    }
}

#[test]
fn solver_matches_oracle_on_small_bundled_models() {
    for (name, text) in models::ALL {
        let m = model(text);
        if m.free_atoms().len() > 3 {
            continue;
        }
        for blend in [1.0, 0.5, 0.0] {
            let op = SoftConjunction::new(blend).unwrap();
            let s = solve_subgradient(&m, op, LossSpec::linear(), &SolveConfig::default()).unwrap();
            let o = grid_oracle(&m, op, LossSpec::linear(), 0.01).unwrap();
            assert!(s.objective <= o.objective + 1e-3, "{name} blend {blend}: {} vs {}", s.objective, o.objective);
            assert!(
                (s.objective - evaluate_objective(&m, &s.interpretation, op, LossSpec::linear()).unwrap()).abs()
                    < 1e-12
            );
        }
    }
}

#[test]
fn heavier_rule_wins_the_argmin() {
    let op = SoftConjunction::default();
    for (w_ab, w_bc, expected) in [(1.0, 1.5, 0.0), (1.5, 1.0, 1.0), (0.2, 3.0, 0.0), (3.0, 0.2, 1.0)] {
        let m = conflict(w_ab, w_bc);
        let b = m.atom_index(&GroundAtom::new("B", &[])).unwrap();
        let s = grid_oracle(&m, op, LossSpec::linear(), 0.01).unwrap();
        assert_eq!(s.interpretation.value(b), expected, "weights {w_ab} / {w_bc}");
    }
}

#[test]
fn squared_loss_solves_too() {
    let m = conflict(2.0, 1.0);
    let op = SoftConjunction::default();
    let s = solve_subgradient(&m, op, LossSpec::squared(), &SolveConfig::default()).unwrap();
    let o = grid_oracle(&m, op, LossSpec::squared(), 0.01).unwrap();
    // 2(1 - x)^2 + x^2 is minimized at x = 2/3 with value 2/3
    assert!((o.objective - 2.0 / 3.0).abs() < 1e-3);
    assert!(s.objective <= o.objective + 1e-3);
}
