use std::fmt;

use thiserror::Error;

use super::ast::Loc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagCode {
    Syntax,
    UnknownDomain,
    UnknownPredicate,
    UnknownConstant,
    ArityMismatch,
    DomainMismatch,
    DuplicateDeclaration,
    DuplicateEvidence,
    EvidenceRange,
    NonGroundEvidence,
    NonPositiveWeight,
    EmptyBody,
    VariableDomain,
    UnboundHeadVariable,
}

impl DiagCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagCode::Syntax => "syntax",
            DiagCode::UnknownDomain => "unknown-domain",
            DiagCode::UnknownPredicate => "unknown-predicate",
            DiagCode::UnknownConstant => "unknown-constant",
            DiagCode::ArityMismatch => "signature-arity",
            DiagCode::DomainMismatch => "signature-domain",
            DiagCode::DuplicateDeclaration => "duplicate-declaration",
            DiagCode::DuplicateEvidence => "duplicate-evidence",
            DiagCode::EvidenceRange => "evidence-range",
            DiagCode::NonGroundEvidence => "non-ground-evidence",
            DiagCode::NonPositiveWeight => "weight",
            DiagCode::EmptyBody => "empty-body",
            DiagCode::VariableDomain => "variable-domain",
            DiagCode::UnboundHeadVariable => "unbound-head-variable",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub loc: Option<Loc>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: DiagCode, loc: Option<Loc>, message: impl Into<String>) -> Self {
        Self { code, loc, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.loc {
            Some(loc) => write!(f, "{loc}: [{}] {}", self.code, self.message),
            None => write!(f, "[{}] {}", self.code, self.message),
        }
    }
}

/// One or more diagnostics that prevent a program from being used.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl From<Diagnostic> for ParseError {
    fn from(d: Diagnostic) -> Self {
        Self { diagnostics: vec![d] }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
