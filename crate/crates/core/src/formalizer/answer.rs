//! Verdict-to-option conversion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::options::{parse_csp_option, UnrecognizedOptionPhrase};
use crate::logiclang::FormalProgram;
use crate::types::{Answer, ReasoningType, SolverVerdict, SubProblem};

/// What to answer when a deductive engine returns Unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownPolicy {
    /// The abstain option if one exists, else the False option.
    #[default]
    AbstainOrFalse,
    /// Always the False option.
    False,
    /// No label at all.
    NoAnswer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnswerPolicy {
    pub unknown: UnknownPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnswerError {
    #[error("engine failed: {0}")]
    EngineFailure(String),
    #[error("verdict `{verdict}` does not fit a {ty} problem")]
    UnexpectedVerdict { ty: ReasoningType, verdict: String },
    #[error("no option reads as `{0}`")]
    MissingOption(&'static str),
    #[error("{} options hold in every solution: {matching:?}", matching.len())]
    AmbiguousOptions { matching: Vec<String> },
    #[error(transparent)]
    Unrecognized(#[from] UnrecognizedOptionPhrase),
    #[error("a constraint model is required to read the options")]
    NeedsModel,
}

const TRUE_WORDS: [&str; 4] = ["true", "proved", "yes", "eligible"];
const FALSE_WORDS: [&str; 4] = ["false", "disproved", "no", "not eligible"];
const UNKNOWN_WORDS: [&str; 5] = ["unknown", "uncertain", "undetermined", "cannot be determined", "unproven"];

fn find_label<'a>(q: &'a SubProblem, words: &[&str]) -> Option<&'a str> {
    q.options
        .iter()
        .find(|o| {
            let t = o.text.trim().trim_end_matches('.').to_lowercase();
            words.contains(&t.as_str())
        })
        .map(|o| o.label.as_str())
}

fn label(q: &SubProblem, words: &[&str], name: &'static str) -> Result<Answer, AnswerError> {
    find_label(q, words).map(|l| Answer::Label(l.to_string())).ok_or(AnswerError::MissingOption(name))
}

/// Maps an engine verdict onto one of the problem's option labels.
pub fn convert_answer(
    verdict: &SolverVerdict,
    q: &SubProblem,
    program: Option<&FormalProgram>,
    policy: AnswerPolicy,
) -> Result<Answer, AnswerError> {
    let ty = q.reasoning_type;
    let unexpected = || AnswerError::UnexpectedVerdict { ty, verdict: verdict.short_name().to_string() };
    if let SolverVerdict::EngineError { detail } = verdict {
        return Err(AnswerError::EngineFailure(detail.clone()));
    }
    match ty {
        ReasoningType::Lp | ReasoningType::Fol => match verdict {
            SolverVerdict::Proved => label(q, &TRUE_WORDS, "True"),
            SolverVerdict::Disproved => label(q, &FALSE_WORDS, "False"),
            SolverVerdict::Unknown { .. } => match policy.unknown {
                UnknownPolicy::NoAnswer => Ok(Answer::Unknown),
                UnknownPolicy::False => label(q, &FALSE_WORDS, "False"),
                UnknownPolicy::AbstainOrFalse => {
                    label(q, &UNKNOWN_WORDS, "Unknown").or_else(|_| label(q, &FALSE_WORDS, "False"))
                }
            },
            _ => Err(unexpected()),
        },
        ReasoningType::Smt => {
            let (words, fallback, name) = match verdict {
                SolverVerdict::Sat => (&TRUE_WORDS, "A)", "True"),
                SolverVerdict::Unsat => (&FALSE_WORDS, "B)", "False"),
                SolverVerdict::Unknown { .. } if policy.unknown == UnknownPolicy::NoAnswer => return Ok(Answer::Unknown),
                SolverVerdict::Unknown { .. } => (&FALSE_WORDS, "B)", "False"),
                _ => return Err(unexpected()),
            };
            match find_label(q, words) {
                Some(l) => Ok(Answer::Label(l.to_string())),
                None if q.option(fallback).is_some() || q.options.is_empty() => Ok(Answer::Label(fallback.into())),
                None => Err(AnswerError::MissingOption(name)),
            }
        }
        ReasoningType::Csp => {
            let SolverVerdict::Solutions { assignments, .. } = verdict else {
                return Err(unexpected());
            };
            let Some(FormalProgram::Csp(model)) = program else {
                return Err(AnswerError::NeedsModel);
            };
            if assignments.is_empty() {
                return Err(AnswerError::AmbiguousOptions { matching: vec![] });
            }
            let mut matching = Vec::new();
            for o in &q.options {
                let pred = parse_csp_option(&o.text, model)?;
                if assignments.iter().all(|a| pred.holds(a) == Some(true)) {
                    matching.push(o.label.clone());
                }
            }
            match matching.as_slice() {
                [one] => Ok(Answer::Label(one.clone())),
                _ => Err(AnswerError::AmbiguousOptions { matching }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{solve, EngineLimits};
    use crate::logiclang::parse_csp;
    use crate::types::{AnswerOption, Components, ProblemId};

    fn problem(ty: ReasoningType, opts: &[&str]) -> SubProblem {
        SubProblem {
            problem_id: ProblemId::new(1),
            reasoning_type: ty,
            components: Components::for_type(ty, "p".into(), "q".into()),
            options: AnswerOption::label_all(opts),
            type_alias: None,
        }
    }

    fn ans(l: &str) -> Result<Answer, AnswerError> {
        Ok(Answer::Label(l.into()))
    }

    #[test]
    fn binary_deductive() {
        let q = problem(ReasoningType::Lp, &["True", "False"]);
        let p = AnswerPolicy::default();
        assert_eq!(convert_answer(&SolverVerdict::Proved, &q, None, p), ans("A)"));
        assert_eq!(convert_answer(&SolverVerdict::Disproved, &q, None, p), ans("B)"));
        assert_eq!(convert_answer(&SolverVerdict::unknown(), &q, None, p), ans("B)"));
        let none = AnswerPolicy { unknown: UnknownPolicy::NoAnswer };
        assert_eq!(convert_answer(&SolverVerdict::unknown(), &q, None, none), Ok(Answer::Unknown));
    }

    #[test]
    fn three_way_deductive() {
        let q = problem(ReasoningType::Fol, &["True", "False", "Unknown"]);
        let p = AnswerPolicy::default();
        assert_eq!(convert_answer(&SolverVerdict::unknown(), &q, None, p), ans("C)"));
        assert_eq!(convert_answer(&SolverVerdict::Proved, &q, None, p), ans("A)"));
        let q = problem(ReasoningType::Fol, &["PROVED", "DISPROVED", "UNKNOWN"]);
        assert_eq!(convert_answer(&SolverVerdict::Disproved, &q, None, p), ans("B)"));
        assert_eq!(convert_answer(&SolverVerdict::Sat, &q, None, p).unwrap_err().to_string(), "verdict `sat` does not fit a FOL problem");
    }

    #[test]
    fn eligibility() {
        let q = problem(ReasoningType::Smt, &["True", "False"]);
        let p = AnswerPolicy::default();
        assert_eq!(convert_answer(&SolverVerdict::Sat, &q, None, p), ans("A)"));
        assert_eq!(convert_answer(&SolverVerdict::Unsat, &q, None, p), ans("B)"));
        assert!(matches!(
            convert_answer(&SolverVerdict::EngineError { detail: "x".into() }, &q, None, p),
            Err(AnswerError::EngineFailure(_))
        ));
    }

    #[test]
    fn golfer_options() {
        let model = parse_csp(crate::logiclang::csp::tests::GOLFERS).unwrap();
        let program = FormalProgram::Csp(model);
        let verdict = solve(&program, &EngineLimits::default());
        let q = problem(
            ReasoningType::Csp,
            &["Rob finished first", "Ada finished first", "Dan finished first", "Joe finished first", "Mel finished first"],
        );
        assert_eq!(convert_answer(&verdict, &q, Some(&program), AnswerPolicy::default()), ans("A)"));
        let tie = problem(ReasoningType::Csp, &["Rob finished first", "Joe finished last"]);
        assert!(matches!(
            convert_answer(&verdict, &tie, Some(&program), AnswerPolicy::default()),
            Err(AnswerError::AmbiguousOptions { matching }) if matching.len() == 2
        ));
    }
}
