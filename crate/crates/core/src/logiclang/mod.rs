//! Parsers, ASTs and canonical printers for the four formal languages.

pub mod csp;
pub mod diag;
pub mod fol;
pub mod lp;
pub mod smt;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use csp::{parse_csp, CspModel};
pub use diag::{Diagnostics, ParseDiagnostic};
pub use fol::{parse_fol, FolProgram};
pub use lp::{parse_lp, LpProgram};
pub use smt::{parse_smt, SmtScript};

use crate::types::ReasoningType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Lp,
    Fol,
    Csp,
    Smt,
}

impl Language {
    pub const ALL: [Language; 4] = [Language::Lp, Language::Fol, Language::Csp, Language::Smt];

    pub fn for_type(ty: ReasoningType) -> Self {
        match ty {
            ReasoningType::Lp => Language::Lp,
            ReasoningType::Fol => Language::Fol,
            ReasoningType::Csp => Language::Csp,
            ReasoningType::Smt => Language::Smt,
        }
    }

    pub fn reasoning_type(self) -> ReasoningType {
        match self {
            Language::Lp => ReasoningType::Lp,
            Language::Fol => ReasoningType::Fol,
            Language::Csp => ReasoningType::Csp,
            Language::Smt => ReasoningType::Smt,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Language::Lp => "lp",
            Language::Fol => "fol",
            Language::Csp => "csp",
            Language::Smt => "smt",
        }
    }

    pub fn parse(self, text: &str) -> Result<FormalProgram, Diagnostics> {
        match self {
            Language::Lp => parse_lp(text).map(FormalProgram::Lp),
            Language::Fol => parse_fol(text).map(FormalProgram::Fol),
            Language::Csp => parse_csp(text).map(FormalProgram::Csp),
            Language::Smt => parse_smt(text).map(FormalProgram::Smt),
        }
    }

    /// Parses raw bytes; invalid UTF-8 is replaced before parsing.
    pub fn parse_bytes(self, bytes: &[u8]) -> Result<FormalProgram, Diagnostics> {
        self.parse(&String::from_utf8_lossy(bytes))
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lp" => Ok(Language::Lp),
            "fol" => Ok(Language::Fol),
            "csp" | "mzn" => Ok(Language::Csp),
            "smt" | "smt2" => Ok(Language::Smt),
            _ => Err(format!("unknown language `{s}` (expected lp, fol, csp or smt)")),
        }
    }
}

/// A parsed program in one of the four languages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "language", content = "program", rename_all = "lowercase")]
pub enum FormalProgram {
    Lp(LpProgram),
    Fol(FolProgram),
    Csp(CspModel),
    Smt(SmtScript),
}

impl FormalProgram {
    pub fn language(&self) -> Language {
        match self {
            FormalProgram::Lp(_) => Language::Lp,
            FormalProgram::Fol(_) => Language::Fol,
            FormalProgram::Csp(_) => Language::Csp,
            FormalProgram::Smt(_) => Language::Smt,
        }
    }
}

impl fmt::Display for FormalProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormalProgram::Lp(p) => p.fmt(f),
            FormalProgram::Fol(p) => p.fmt(f),
            FormalProgram::Csp(p) => p.fmt(f),
            FormalProgram::Smt(p) => p.fmt(f),
        }
    }
}
