//! Compiles CSP answer options into predicates over a model's position array.

use thiserror::Error;

use super::cnl::csp::{parse_statement, scene_of, CspStatement, Scene};
use crate::logiclang::csp::{CmpOp, CspExpr, CspModel, VarRef};
use crate::types::Assignment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unrecognized option phrase `{text}`: {reason}")]
pub struct UnrecognizedOptionPhrase {
    pub text: String,
    pub reason: String,
}

/// A conjunction of comparisons that an option asserts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionPredicate(pub Vec<(CspExpr, CmpOp, CspExpr)>);

impl OptionPredicate {
    pub fn holds(&self, a: &Assignment) -> Option<bool> {
        let lookup = |v: &VarRef| a.get(&v.key());
        for (lhs, op, rhs) in &self.0 {
            if !op.holds(lhs.eval(lookup)?, rhs.eval(lookup)?) {
                return Some(false);
            }
        }
        Some(true)
    }
}

pub fn parse_csp_option(text: &str, model: &CspModel) -> Result<OptionPredicate, UnrecognizedOptionPhrase> {
    let fail = |reason: &str| UnrecognizedOptionPhrase { text: text.to_string(), reason: reason.to_string() };
    let lower = text.to_lowercase();
    let mentions = |m: &str| {
        let m = m.to_lowercase();
        lower.split(|c: char| !c.is_ascii_alphanumeric()).any(|w| w == m)
    };
    let (enumeration, array) = model
        .enums
        .iter()
        .filter(|e| e.members.iter().any(|m| mentions(m)))
        .find_map(|e| model.vars.iter().find(|v| v.index.as_deref() == Some(e.name.as_str())).map(|v| (e, v)))
        .ok_or_else(|| fail("no declared object with a position array is mentioned"))?;
    let scenes: Vec<Scene> = match scene_of(text) {
        Some(s) => vec![s],
        None => Scene::ALL.to_vec(),
    };
    let statement = scenes
        .into_iter()
        .find_map(|s| parse_statement(text, s, &enumeration.members).ok())
        .ok_or_else(|| fail("no known position phrase"))?;
    let at = |m: &str| CspExpr::var(VarRef::element(&array.name, m));
    let pred = match statement {
        CspStatement::Before(a, b) => (at(&a), CmpOp::Lt, at(&b)),
        CspStatement::After(a, b) => (at(&a), CmpOp::Gt, at(&b)),
        CspStatement::At(a, k) => (at(&a), CmpOp::Eq, CspExpr::Int(array.lo + k as i64 - 1)),
    };
    let width = array.hi - array.lo + 1;
    if width != enumeration.members.len() as i64 {
        return Err(fail("position range does not match the number of objects"));
    }
    Ok(OptionPredicate(vec![pred]))
}
