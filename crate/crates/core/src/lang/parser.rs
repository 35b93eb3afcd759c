//! Line-oriented recursive-descent parser for rule programs.
//!
//! ```text
//! program   := (statement? comment? NEWLINE)*
//! statement := "domain" IDENT "=" "{" [IDENT ("," IDENT)*] "}"
//!            | "predicate" IDENT ["(" IDENT ("," IDENT)* ")"]
//!            | "evidence" atom "=" NUMBER
//!            | "rule" NUMBER ":" atom ("&" atom)* "->" atom
//! atom      := IDENT ["(" IDENT ("," IDENT)* ")"]
//! ```
//!
//! Inside atoms an identifier is a constant when some domain declares it,
//! otherwise a variable when capitalized; anything else is an unknown
//! constant.

use super::ast::{AtomTemplate, Domain, Evidence, Loc, PredicateDecl, Program, Rule, Term};
use super::diag::{DiagCode, Diagnostic, ParseError};
use super::validate::validate;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Eq,
    Colon,
    Amp,
    Arrow,
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(x) => format!("number `{x}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn syntax(loc: Loc, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(DiagCode::Syntax, Some(loc), message)
}

fn lex(text: &str) -> Result<Vec<(Tok, Loc)>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let loc = Loc { line, column: col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                out.push((Tok::Newline, loc));
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(1, &mut i, &mut col);
                }
            }
            '{' | '}' | '(' | ')' | ',' | '=' | ':' | '&' => {
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '=' => Tok::Eq,
                    ':' => Tok::Colon,
                    _ => Tok::Amp,
                };
                out.push((tok, loc));
                advance(1, &mut i, &mut col);
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, loc));
                advance(2, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    advance(1, &mut i, &mut col);
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), loc));
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' => {
                let start = i;
                if c == '-' || c == '+' {
                    advance(1, &mut i, &mut col);
                }
                let mut prev = ' ';
                while i < chars.len() {
                    let d = chars[i];
                    let ok = d.is_ascii_digit()
                        || d == '.'
                        || d == 'e'
                        || d == 'E'
                        || ((d == '-' || d == '+') && (prev == 'e' || prev == 'E'));
                    if !ok {
                        break;
                    }
                    prev = d;
                    advance(1, &mut i, &mut col);
                }
                let lexeme: String = chars[start..i].iter().collect();
                let value = lexeme.parse::<f64>().map_err(|_| syntax(loc, format!("malformed number `{lexeme}`")))?;
                out.push((Tok::Number(value), loc));
            }
            other => return Err(syntax(loc, format!("unexpected character `{other}`"))),
        }
    }
    out.push((Tok::Eof, Loc { line, column: col }));
    Ok(out)
}

/// A term as written, before it is classified as constant or variable.
struct RawAtom {
    predicate: String,
    args: Vec<(String, Loc)>,
    loc: Loc,
}

enum RawStatement {
    Domain(Domain),
    Predicate(PredicateDecl),
    Evidence(RawAtom, f64, Loc),
    Rule(f64, Vec<RawAtom>, RawAtom, Loc),
}

struct Parser {
    toks: Vec<(Tok, Loc)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn loc(&self) -> Loc {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Loc) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        syntax(self.loc(), format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<Loc, Diagnostic> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<(String, Loc), Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let loc = self.bump().1;
                Ok((s, loc))
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn number(&mut self, wanted: &str) -> Result<f64, Diagnostic> {
        match *self.peek() {
            Tok::Number(x) => {
                self.bump();
                Ok(x)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    /// `IDENT ("," IDENT)*` up to (not including) `close`; may be empty.
    fn ident_list(&mut self, close: Tok, wanted: &str) -> Result<Vec<(String, Loc)>, Diagnostic> {
        let mut items = Vec::new();
        if *self.peek() == close {
            return Ok(items);
        }
        loop {
            items.push(self.ident(wanted)?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(items);
            }
        }
    }

    fn atom(&mut self) -> Result<RawAtom, Diagnostic> {
        let (predicate, loc) = self.ident("a predicate name")?;
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            args = self.ident_list(Tok::RParen, "a constant or variable")?;
            if args.is_empty() {
                return Err(self.unexpected("a constant or variable"));
            }
            self.expect(Tok::RParen, "`,` or `)`")?;
        }
        Ok(RawAtom { predicate, args, loc })
    }

    fn statement(&mut self) -> Result<Option<RawStatement>, Diagnostic> {
        let (keyword, loc) = match self.peek().clone() {
            Tok::Newline | Tok::Eof => return Ok(None),
            Tok::Ident(k) => (k, self.bump().1),
            _ => return Err(self.unexpected("`domain`, `predicate`, `evidence` or `rule`")),
        };
        let stmt = match keyword.as_str() {
            "domain" => {
                let (name, _) = self.ident("a domain name")?;
                self.expect(Tok::Eq, "`=`")?;
                self.expect(Tok::LBrace, "`{`")?;
                let constants = self.ident_list(Tok::RBrace, "a constant")?;
                self.expect(Tok::RBrace, "`,` or `}`")?;
                RawStatement::Domain(Domain {
                    name,
                    constants: constants.into_iter().map(|(c, _)| c).collect(),
                    loc: Some(loc),
                })
            }
            "predicate" => {
                let (name, _) = self.ident("a predicate name")?;
                let mut signature = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    signature = self.ident_list(Tok::RParen, "a domain name")?;
                    if signature.is_empty() {
                        return Err(self.unexpected("a domain name"));
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                }
                RawStatement::Predicate(PredicateDecl {
                    name,
                    signature: signature.into_iter().map(|(d, _)| d).collect(),
                    loc: Some(loc),
                })
            }
            "evidence" => {
                let atom = self.atom()?;
                self.expect(Tok::Eq, "`=`")?;
                let value = self.number("a probability")?;
                RawStatement::Evidence(atom, value, loc)
            }
            "rule" => {
                let weight = self.number("a rule weight")?;
                self.expect(Tok::Colon, "`:`")?;
                let mut body = vec![self.atom()?];
                while *self.peek() == Tok::Amp {
                    self.bump();
                    body.push(self.atom()?);
                }
                self.expect(Tok::Arrow, "`&` or `->`")?;
                let head = self.atom()?;
                RawStatement::Rule(weight, body, head, loc)
            }
            other => {
                return Err(syntax(
                    loc,
                    format!("unknown statement `{other}`; expected domain, predicate, evidence or rule"),
                ))
            }
        };
        match self.peek() {
            Tok::Newline | Tok::Eof => Ok(Some(stmt)),
            _ => Err(self.unexpected("end of line")),
        }
    }
}

fn classify(atom: RawAtom, is_constant: &dyn Fn(&str) -> bool, diags: &mut Vec<Diagnostic>) -> AtomTemplate {
    let args = atom
        .args
        .into_iter()
        .map(|(name, loc)| {
            if is_constant(&name) {
                Term::Const(name)
            } else if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                Term::Var(name)
            } else {
                diags.push(Diagnostic::new(
                    DiagCode::UnknownConstant,
                    Some(loc),
                    format!("`{name}` is not declared in any domain (variables must be capitalized)"),
                ));
                Term::Const(name)
            }
        })
        .collect();
    AtomTemplate { predicate: atom.predicate, args, loc: Some(atom.loc) }
}

/// Parses the concrete syntax only; no semantic checks beyond classifying
/// terms. Stops at the first syntax error.
pub fn parse_syntax(text: &str) -> Result<Program, ParseError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let mut raw = Vec::new();
    loop {
        if let Some(stmt) = parser.statement()? {
            raw.push(stmt);
        }
        match parser.bump().0 {
            Tok::Eof => break,
            Tok::Newline => {}
            _ => unreachable!("statement() leaves the cursor on a line end"),
        }
    }

    let mut program = Program::default();
    let mut pending = Vec::new();
    for stmt in raw {
        match stmt {
            RawStatement::Domain(d) => program.domains.push(d),
            RawStatement::Predicate(p) => program.predicates.push(p),
            other => pending.push(other),
        }
    }
    let constants: std::collections::HashSet<String> =
        program.domains.iter().flat_map(|d| d.constants.iter().cloned()).collect();
    let is_constant = |name: &str| constants.contains(name);

    let mut diags = Vec::new();
    for stmt in pending {
        match stmt {
            RawStatement::Evidence(atom, value, loc) => {
                let atom = classify(atom, &is_constant, &mut diags);
                program.evidence.push(Evidence { atom, value, loc: Some(loc) });
            }
            RawStatement::Rule(weight, body, head, loc) => {
                let body = body.into_iter().map(|a| classify(a, &is_constant, &mut diags)).collect();
                let head = classify(head, &is_constant, &mut diags);
                program.rules.push(Rule { weight, body, head, loc: Some(loc) });
            }
            RawStatement::Domain(_) | RawStatement::Predicate(_) => unreachable!(),
        }
    }
    if diags.is_empty() {
        Ok(program)
    } else {
        Err(ParseError { diagnostics: diags })
    }
}

/// Parses and validates a program. All semantic diagnostics are reported
/// together.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let program = parse_syntax(text)?;
    let diagnostics = validate(&program);
    if diagnostics.is_empty() {
        Ok(program)
    } else {
        Err(ParseError { diagnostics })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const VOTING: &str = "\
domain Person = { a1, a2, b }
domain Party  = { inc, chal }
predicate Friend(Person, Person)
predicate Voted(Person, Party)
evidence Friend(a1, b) = 1.0
evidence Friend(a2, b) = 1.0
evidence Voted(a1, inc) = 1.0
evidence Voted(a2, chal) = 1.0
rule 1.0 : Friend(X, B2) & Voted(X, P) -> Voted(B2, P)
";

    fn first_code(text: &str) -> (DiagCode, Option<Loc>) {
        let err = parse_program(text).unwrap_err();
        (err.diagnostics[0].code, err.diagnostics[0].loc)
    }

    #[test]
    fn voting_program_counts() {
        let p = parse_program(VOTING).unwrap();
        assert_eq!(p.domains.len(), 2);
        assert_eq!(p.predicates.len(), 2);
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.evidence.len(), 4);
        let rule = &p.rules[0];
        assert_eq!(rule.body[0].args, vec![Term::Var("X".into()), Term::Var("B2".into())]);
        assert_eq!(rule.head.args[1], Term::Var("P".into()));
        assert_eq!(p.evidence[2].atom.args[1], Term::Const("inc".into()));
    }

    #[test]
    fn empty_and_comment_only_input() {
        assert_eq!(parse_program("").unwrap(), Program::default());
        assert_eq!(parse_program("# nothing here\n\n   # still nothing").unwrap(), Program::default());
    }

    #[test]
    fn negative_weight_is_rejected() {
        let text = "predicate A(D)\npredicate B(D)\ndomain D = { d }\nrule -1.0 : A(x) -> B(x)\n";
        let err = parse_program(text).unwrap_err();
        let codes: Vec<_> = err.diagnostics.iter().map(|d| d.code).collect();
        assert!(codes.contains(&DiagCode::UnknownConstant), "{err}");
        let text = "domain D = { d }\npredicate A(D)\npredicate B(D)\nrule -1.0 : A(X) -> B(X)\n";
        assert_eq!(first_code(text), (DiagCode::NonPositiveWeight, Some(Loc { line: 4, column: 1 })));
        let text = "predicate A\npredicate B\nrule 0 : A -> B\n";
        assert_eq!(first_code(text).0, DiagCode::NonPositiveWeight);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_syntax("domain D = { a, b\n").unwrap_err();
        let d = &err.diagnostics[0];
        assert_eq!(d.code, DiagCode::Syntax);
        assert_eq!(d.loc, Some(Loc { line: 1, column: 18 }));

        let err = parse_syntax("predicate A\nrule 1 : A B\n").unwrap_err();
        assert_eq!(err.diagnostics[0].loc, Some(Loc { line: 2, column: 12 }));

        let err = parse_syntax("frobnicate X\n").unwrap_err();
        assert_eq!(err.diagnostics[0].loc, Some(Loc { line: 1, column: 1 }));

        let err = parse_syntax("rule 1 : A -> B $\n").unwrap_err();
        assert_eq!(err.diagnostics[0].loc, Some(Loc { line: 1, column: 17 }));

        assert!(parse_syntax("rule 1.2.3 : A -> B\n").is_err());
        assert!(parse_syntax("predicate A()\n").is_err());
    }

    #[test]
    fn unknown_names_and_arity() {
        let base = "domain D = { d }\npredicate A(D)\n";
        assert_eq!(first_code(&format!("{base}evidence Z(d) = 1\n")).0, DiagCode::UnknownPredicate);
        assert_eq!(first_code(&format!("{base}evidence A(d, d) = 1\n")).0, DiagCode::ArityMismatch);
        assert_eq!(first_code("predicate A(Nope)\n").0, DiagCode::UnknownDomain);
        assert_eq!(
            first_code(&format!("{base}evidence A(d) = 1\nevidence A(d) = 0.5\n")).0,
            DiagCode::DuplicateEvidence
        );
        assert_eq!(first_code(&format!("{base}evidence A(d) = 1.3\n")).0, DiagCode::EvidenceRange);
        assert_eq!(first_code(&format!("{base}evidence A(X) = 1\n")).0, DiagCode::NonGroundEvidence);
    }

    #[test]
    fn numbers_accept_exponents() {
        let p = parse_program("predicate A\npredicate B\nrule 2.5e-1 : A -> B\nevidence A = 1e0\n").unwrap();
        assert_eq!(p.rules[0].weight, 0.25);
        assert_eq!(p.evidence[0].value, 1.0);
    }

    #[test]
    fn print_then_parse_is_identity() {
        let p = parse_program(VOTING).unwrap();
        let again = parse_program(&p.to_string()).unwrap();
        assert_eq!(p.without_locations(), again.without_locations());
    }
}
