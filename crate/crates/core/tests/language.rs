use proptest::prelude::*;
use softconj::lang::{ground, parse_program, AtomTemplate, Domain, PredicateDecl, Program, Rule, Term};

/// Programs over domains `D0..`, predicates `P0..` and rules built from
/// a fixed pool of variables and constants.
fn program() -> impl Strategy<Value = Program> {
    let domains = prop::collection::vec(0usize..=3, 1..=2);
    (domains, prop::collection::vec(prop::collection::vec(0usize..2, 0..=2), 1..=3)).prop_flat_map(|(sizes, sigs)| {
        let nd = sizes.len();
        let np = sigs.len();
        let rule = (
            1usize..=8,
            prop::collection::vec((0..np, prop::collection::vec(0usize..6, 2)), 1..=3),
            (0..np, prop::collection::vec(0usize..6, 2)),
        );
        (Just(sizes), Just(sigs), prop::collection::vec(rule, 0..=3)).prop_map(move |(sizes, sigs, rules)| {
            let domains: Vec<Domain> = sizes
                .iter()
                .enumerate()
                .map(|(d, &k)| Domain {
                    name: format!("D{d}"),
                    constants: (0..k).map(|c| format!("c{d}x{c}")).collect(),
                    loc: None,
                })
                .collect();
            let predicates: Vec<PredicateDecl> = sigs
                .iter()
                .enumerate()
                .map(|(p, sig)| PredicateDecl {
                    name: format!("P{p}"),
                    signature: sig.iter().map(|d| format!("D{}", d % nd)).collect(),
                    loc: None,
                })
                .collect();
            let term = |pred: usize, pos: usize, pick: usize| -> Option<Term> {
                let dom = sigs[pred][pos] % nd;
                // variables are named after their domain so they never conflict
                if pick < 4 {
                    Some(Term::Var(format!("V{dom}{}", pick % 2)))
                } else {
                    domains[dom].constants.get(pick - 4).map(|c| Term::Const(c.clone()))
                }
            };
            let atom = |pred: usize, picks: &[usize]| -> Option<AtomTemplate> {
                let args: Option<Vec<Term>> = (0..sigs[pred].len()).map(|pos| term(pred, pos, picks[pos])).collect();
                args.map(|a| AtomTemplate::new(format!("P{pred}"), a))
            };
            let mut out = Vec::new();
            for (w, body, (hp, hargs)) in rules {
                let body: Option<Vec<AtomTemplate>> = body.iter().map(|(p, a)| atom(*p, a)).collect();
                let (Some(body), Some(mut head)) = (body, atom(hp, &hargs)) else { continue };
                let bound: Vec<String> = body.iter().flat_map(|a| a.variables().map(String::from)).collect();
                // replace unbound head variables by a constant, or drop the rule
                let mut ok = true;
                for (pos, t) in head.args.iter_mut().enumerate() {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            match domains[sigs[hp][pos] % nd].constants.first() {
                                Some(c) => *t = Term::Const(c.clone()),
                                None => ok = false,
                            }
                        }
                    }
                }
                if ok {
                    out.push(Rule { weight: w as f64 * 0.5, body, head, loc: None });
                }
            }
            Program { domains, predicates, evidence: vec![], rules: out }
        })
    })
}

fn expected_ground_rules(p: &Program) -> usize {
    p.rules
        .iter()
        .map(|r| {
            let mut vars: Vec<(String, usize)> = Vec::new();
            for a in r.body.iter().chain(std::iter::once(&r.head)) {
                let sig = &p.predicate(&a.predicate).unwrap().signature;
                for (t, d) in a.args.iter().zip(sig) {
                    if let Term::Var(v) = t {
                        if !vars.iter().any(|(n, _)| n == v) {
                            vars.push((v.clone(), p.domain(d).unwrap().constants.len()));
                        }
                    }
                }
            }
            vars.iter().map(|(_, k)| k).product::<usize>()
        })
        .sum()
}

proptest! {
    #[test]
    fn print_then_parse_round_trips(p in program()) {
        let parsed = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(parsed.without_locations(), p.without_locations());
    }

    #[test]
    fn grounding_count_law(p in program()) {
        let m = ground(&p).unwrap();
        prop_assert_eq!(m.rules().len(), expected_ground_rules(&p));
        let again = ground(&p).unwrap();
        prop_assert_eq!(m, again);
    }
}
