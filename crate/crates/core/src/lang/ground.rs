use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::{AtomTemplate, Program, Term};
use super::validate::{validate, variable_domains};
use crate::error::{Error, Result};

/// A predicate applied to constants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        Self { predicate: predicate.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        Ok(())
    }
}

/// One instantiated rule: `weight * hinge(and(body) - head)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundRule {
    pub weight: f64,
    pub body: Vec<usize>,
    pub head: usize,
    /// Index of the program rule this came from.
    pub source: usize,
}

/// Ground atoms, their evidence values, and the ground rules over them.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundModel {
    atoms: Vec<GroundAtom>,
    index: BTreeMap<GroundAtom, usize>,
    evidence: Vec<Option<f64>>,
    rules: Vec<GroundRule>,
}

impl GroundModel {
    /// Assembles a model directly, checking indices, bodies, weights and
    /// evidence ranges.
    pub fn new(atoms: Vec<GroundAtom>, evidence: Vec<Option<f64>>, rules: Vec<GroundRule>) -> Result<Self> {
        if evidence.len() != atoms.len() {
            return Err(Error::Grounding(format!("{} evidence slots for {} atoms", evidence.len(), atoms.len())));
        }
        let mut index = BTreeMap::new();
        for (i, atom) in atoms.iter().enumerate() {
            if index.insert(atom.clone(), i).is_some() {
                return Err(Error::Grounding(format!("atom `{atom}` appears twice")));
            }
        }
        for (i, value) in evidence.iter().enumerate() {
            if let Some(v) = value {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::Domain { index: i, value: *v });
                }
            }
        }
        for (r, rule) in rules.iter().enumerate() {
            if rule.body.is_empty() {
                return Err(Error::Grounding(format!("ground rule {r} has an empty body")));
            }
            if rule.body.iter().chain(std::iter::once(&rule.head)).any(|&i| i >= atoms.len()) {
                return Err(Error::Grounding(format!("ground rule {r} refers to a missing atom")));
            }
            if !(rule.weight > 0.0 && rule.weight.is_finite()) {
                return Err(Error::Grounding(format!("ground rule {r} has weight {}", rule.weight)));
            }
        }
        Ok(Self { atoms, index, evidence, rules })
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn atom_index(&self, atom: &GroundAtom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn evidence(&self) -> &[Option<f64>] {
        &self.evidence
    }

    pub fn is_evidence(&self, atom: usize) -> bool {
        self.evidence[atom].is_some()
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Indices of the atoms that are not fixed by evidence, in order.
    pub fn free_atoms(&self) -> Vec<usize> {
        (0..self.atoms.len()).filter(|&i| self.evidence[i].is_none()).collect()
    }
}

fn instantiate(template: &AtomTemplate, binding: &BTreeMap<&str, &str>) -> GroundAtom {
    GroundAtom {
        predicate: template.predicate.clone(),
        args: template
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(v) => binding[v.as_str()].to_string(),
            })
            .collect(),
    }
}

/// Grounds every rule over all assignments of its variables.
///
/// Variables are enumerated in name order with constants in sorted order
/// (the last variable changes fastest), so rule order is lexicographic in
/// the assignment. Atoms are the evidence atoms plus every atom that occurs
/// in a ground rule, sorted by predicate then arguments.
pub fn ground(program: &Program) -> Result<GroundModel> {
    let diags = validate(program);
    if !diags.is_empty() {
        let text: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(Error::Grounding(text.join("; ")));
    }

    let mut instantiated: Vec<(f64, Vec<GroundAtom>, GroundAtom, usize)> = Vec::new();
    for (source, rule) in program.rules.iter().enumerate() {
        let atoms = rule.body.iter().chain(std::iter::once(&rule.head));
        let var_domains = variable_domains(program, atoms).map_err(|d| Error::Grounding(d.to_string()))?;
        let vars: Vec<&str> = var_domains.keys().map(String::as_str).collect();
        let choices: Vec<Vec<&str>> = var_domains
            .values()
            .map(|dom| {
                let mut cs: Vec<&str> =
                    program.domain(dom).map(|d| d.constants.iter().map(String::as_str).collect()).unwrap_or_default();
                cs.sort_unstable();
                cs
            })
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }

        let mut odometer = vec![0usize; vars.len()];
        'assignments: loop {
            let binding: BTreeMap<&str, &str> =
                vars.iter().zip(&odometer).enumerate().map(|(k, (v, &i))| (*v, choices[k][i])).collect();
            let body = rule.body.iter().map(|a| instantiate(a, &binding)).collect();
            let head = instantiate(&rule.head, &binding);
            instantiated.push((rule.weight, body, head, source));

            let mut k = vars.len();
            loop {
                if k == 0 {
                    break 'assignments;
                }
                k -= 1;
                odometer[k] += 1;
                if odometer[k] < choices[k].len() {
                    break;
                }
                odometer[k] = 0;
            }
        }
    }

    let mut evidence_values: BTreeMap<GroundAtom, f64> = BTreeMap::new();
    for e in &program.evidence {
        let atom = instantiate(&e.atom, &BTreeMap::new());
        evidence_values.insert(atom, e.value);
    }

    let mut all: BTreeSet<GroundAtom> = evidence_values.keys().cloned().collect();
    for (_, body, head, _) in &instantiated {
        all.extend(body.iter().cloned());
        all.insert(head.clone());
    }
    let atoms: Vec<GroundAtom> = all.into_iter().collect();
    let position: BTreeMap<&GroundAtom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let evidence = atoms.iter().map(|a| evidence_values.get(a).copied()).collect();
    let rules = instantiated
        .iter()
        .map(|(weight, body, head, source)| GroundRule {
            weight: *weight,
            body: body.iter().map(|a| position[a]).collect(),
            head: position[head],
            source: *source,
        })
        .collect();
    GroundModel::new(atoms, evidence, rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;

    const VOTING: &str = include_str!("../../models/voting.psl");

    #[test]
    fn voting_grounds_to_eighteen_rules() {
        let model = ground(&parse_program(VOTING).unwrap()).unwrap();
        assert_eq!(model.rules().len(), 18);
        // enumeration oracle: B2 x P x X over sorted constants
        let persons = ["a1", "a2", "b"];
        let parties = ["chal", "inc"];
        let mut expected = Vec::new();
        for b2 in persons {
            for p in parties {
                for x in persons {
                    expected.push((
                        vec![GroundAtom::new("Friend", &[x, b2]), GroundAtom::new("Voted", &[x, p])],
                        GroundAtom::new("Voted", &[b2, p]),
                    ));
                }
            }
        }
        for (rule, (body, head)) in model.rules().iter().zip(&expected) {
            let got: Vec<&GroundAtom> = rule.body.iter().map(|&i| &model.atoms()[i]).collect();
            assert_eq!(got, body.iter().collect::<Vec<_>>());
            assert_eq!(&model.atoms()[rule.head], head);
        }
        assert_eq!(model.num_atoms(), 15);
        assert_eq!(model.free_atoms().len(), 11);
        let f = model.atom_index(&GroundAtom::new("Friend", &["a1", "b"])).unwrap();
        assert_eq!(model.evidence()[f], Some(1.0));
    }

    #[test]
    fn no_rules_means_no_ground_rules() {
        let model = ground(&parse_program("domain D = { x }\npredicate P(D)\nevidence P(x) = 0.5\n").unwrap()).unwrap();
        assert!(model.rules().is_empty());
        assert_eq!(model.num_atoms(), 1);
        assert!(model.free_atoms().is_empty());
    }

    #[test]
    fn fully_ground_rule_yields_one() {
        let text = "domain D = { x, y }\npredicate P(D)\nrule 1.5 : P(x) & P(y) -> P(x)\n";
        let model = ground(&parse_program(text).unwrap()).unwrap();
        assert_eq!(model.rules().len(), 1);
        assert_eq!(model.rules()[0].weight, 1.5);
        assert_eq!(model.rules()[0].body, vec![0, 1]);
        assert_eq!(model.rules()[0].head, 0);
    }

    #[test]
    fn empty_domain_yields_no_rules() {
        let text = "domain D = { }\npredicate P(D)\npredicate Q(D)\nrule 1 : P(X) -> Q(X)\n";
        let model = ground(&parse_program(text).unwrap()).unwrap();
        assert!(model.rules().is_empty());
    }

    #[test]
    fn unknown_predicate_is_a_grounding_error() {
        let mut program = parse_program("predicate P\nrule 1 : P -> P\n").unwrap();
        program.rules[0].body[0].predicate = "Missing".into();
        assert!(matches!(ground(&program), Err(Error::Grounding(_))));
    }

    #[test]
    fn model_constructor_checks_indices() {
        let atoms = vec![GroundAtom::new("A", &[])];
        let bad = GroundRule { weight: 1.0, body: vec![0], head: 3, source: 0 };
        assert!(GroundModel::new(atoms.clone(), vec![None], vec![bad]).is_err());
        let empty = GroundRule { weight: 1.0, body: vec![], head: 0, source: 0 };
        assert!(GroundModel::new(atoms.clone(), vec![None], vec![empty]).is_err());
        assert!(GroundModel::new(atoms, vec![Some(2.0)], vec![]).is_err());
    }
}
