//! Six-way failure taxonomy and the classifier that assigns a category to a trace.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trace::RunTrace;
use crate::types::{Answer, ProblemId, ReasoningType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCategory {
    InvalidDecomposition,
    IncorrectDecomposition,
    InvalidRouting,
    IncorrectRouting,
    InvalidFormalization,
    SemanticError,
}

impl ErrorCategory {
    /// Pipeline order.
    pub const ALL: [ErrorCategory; 6] = [
        Self::InvalidDecomposition,
        Self::IncorrectDecomposition,
        Self::InvalidRouting,
        Self::IncorrectRouting,
        Self::InvalidFormalization,
        Self::SemanticError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::InvalidDecomposition => "invalid_decomposition",
            Self::IncorrectDecomposition => "incorrect_decomposition",
            Self::InvalidRouting => "invalid_routing",
            Self::IncorrectRouting => "incorrect_routing",
            Self::InvalidFormalization => "invalid_formalization",
            Self::SemanticError => "semantic_error",
        }
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown error category `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("not a failure: final answer matches the gold answer")]
    NotAFailure,
}

/// Category for the single (first) question of a run.
pub fn classify_failure(
    trace: &RunTrace,
    gold_type: Option<ReasoningType>,
    gold_answer: Option<&str>,
) -> Result<ErrorCategory, ClassifyError> {
    classify_slot(trace, &ProblemId::new(1), gold_type, gold_answer)
}

/// Category for question `slot` of a possibly multi-question run.
///
/// The earliest failing stage wins. Without a gold answer the run is assumed
/// to have failed and falls through to `SemanticError`.
pub fn classify_slot(
    trace: &RunTrace,
    slot: &ProblemId,
    gold_type: Option<ReasoningType>,
    gold_answer: Option<&str>,
) -> Result<ErrorCategory, ClassifyError> {
    let answer = trace.problem(slot).map(|p| &p.answer);
    if let (Some(gold), Some(Answer::Label(got))) = (gold_answer, answer) {
        if gold == got {
            return Err(ClassifyError::NotAFailure);
        }
    }

    let Some(parsed) = trace.decomposition.as_ref().and_then(|d| d.parsed.as_ref()) else {
        return Ok(ErrorCategory::InvalidDecomposition);
    };
    let Some((_, predicted)) = parsed.iter().find(|(id, _)| id == slot) else {
        return Ok(ErrorCategory::InvalidDecomposition);
    };
    if gold_type.is_some_and(|g| g != *predicted) {
        return Ok(ErrorCategory::IncorrectDecomposition);
    }

    let Some(plan) = trace.plan.as_ref().filter(|p| p.is_valid()) else {
        return Ok(ErrorCategory::InvalidRouting);
    };
    let Some(route) = plan.route_for(slot) else {
        return Ok(ErrorCategory::InvalidRouting);
    };
    let expected = gold_type.unwrap_or(*predicted);
    if route != expected.solver_name() {
        return Ok(ErrorCategory::IncorrectRouting);
    }

    if trace.problem(slot).is_some_and(|p| p.formalization_exhausted()) {
        return Ok(ErrorCategory::InvalidFormalization);
    }
    Ok(ErrorCategory::SemanticError)
}
