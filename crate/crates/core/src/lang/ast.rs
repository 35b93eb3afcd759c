use std::fmt;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub name: String,
    pub constants: Vec<String>,
    pub loc: Option<Loc>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateDecl {
    pub name: String,
    /// Domain name of each argument position.
    pub signature: Vec<String>,
    pub loc: Option<Loc>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Const(s) | Term::Var(s) => s,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomTemplate {
    pub predicate: String,
    pub args: Vec<Term>,
    pub loc: Option<Loc>,
}

impl AtomTemplate {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Self { predicate: predicate.into(), args, loc: None }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub atom: AtomTemplate,
    pub value: f64,
    pub loc: Option<Loc>,
}

/// `weight : body_1 & ... & body_n -> head`
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub weight: f64,
    pub body: Vec<AtomTemplate>,
    pub head: AtomTemplate,
    pub loc: Option<Loc>,
}

/// A parsed rule program. Declaration order is preserved.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub domains: Vec<Domain>,
    pub predicates: Vec<PredicateDecl>,
    pub evidence: Vec<Evidence>,
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn domain(&self, name: &str) -> Option<&Domain> {
        self.domains.iter().find(|d| d.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.domains.iter().any(|d| d.constants.iter().any(|c| c == name))
    }

    /// A copy with every source location cleared, for structural
    /// comparison.
    pub fn without_locations(&self) -> Program {
        let strip = |a: &AtomTemplate| AtomTemplate { loc: None, ..a.clone() };
        Program {
            domains: self.domains.iter().map(|d| Domain { loc: None, ..d.clone() }).collect(),
            predicates: self.predicates.iter().map(|p| PredicateDecl { loc: None, ..p.clone() }).collect(),
            evidence: self
                .evidence
                .iter()
                .map(|e| Evidence { atom: strip(&e.atom), value: e.value, loc: None })
                .collect(),
            rules: self
                .rules
                .iter()
                .map(|r| Rule {
                    weight: r.weight,
                    body: r.body.iter().map(strip).collect(),
                    head: strip(&r.head),
                    loc: None,
                })
                .collect(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for AtomTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.domains {
            writeln!(f, "domain {} = {{ {} }}", d.name, d.constants.join(", "))?;
        }
        for p in &self.predicates {
            if p.signature.is_empty() {
                writeln!(f, "predicate {}", p.name)?;
            } else {
                writeln!(f, "predicate {}({})", p.name, p.signature.join(", "))?;
            }
        }
        for e in &self.evidence {
            writeln!(f, "evidence {} = {:?}", e.atom, e.value)?;
        }
        for r in &self.rules {
            write!(f, "rule {:?} : ", r.weight)?;
            for (i, atom) in r.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(" & ")?;
                }
                write!(f, "{atom}")?;
            }
            writeln!(f, " -> {}", r.head)?;
        }
        Ok(())
    }
}
