//! The rule language: a line-oriented program format with typed constants,
//! predicates, evidence and weighted implication rules, plus grounding over
//! finite domains.

mod ast;
mod diag;
mod ground;
mod parser;
mod validate;

pub use ast::{AtomTemplate, Domain, Evidence, Loc, PredicateDecl, Program, Rule, Term};
pub use diag::{DiagCode, Diagnostic, ParseError};
pub use ground::{ground, GroundAtom, GroundModel, GroundRule};
pub use parser::{parse_program, parse_syntax};
pub use validate::validate;
