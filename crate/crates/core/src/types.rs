//! Shared domain types: reasoning paradigms, decomposed sub-problems, verdicts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four supported reasoning paradigms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReasoningType {
    #[serde(rename = "LP")]
    Lp,
    #[serde(rename = "FOL")]
    Fol,
    #[serde(rename = "CSP")]
    Csp,
    #[serde(rename = "SMT", alias = "SAT")]
    Smt,
}

impl ReasoningType {
    pub const ALL: [ReasoningType; 4] = [Self::Lp, Self::Fol, Self::Csp, Self::Smt];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Lp => "LP",
            Self::Fol => "FOL",
            Self::Csp => "CSP",
            Self::Smt => "SMT",
        }
    }

    /// Agent name used in routing plans (`csp_solver`, ...).
    pub fn solver_name(self) -> &'static str {
        match self {
            Self::Lp => "lp_solver",
            Self::Fol => "fol_solver",
            Self::Csp => "csp_solver",
            Self::Smt => "smt_solver",
        }
    }

    pub fn from_solver_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.solver_name() == name)
    }

    /// Components required by the decomposition schema for this type.
    pub fn component_keys(self) -> [&'static str; 2] {
        match self {
            Self::Lp | Self::Fol => ["premise", "hypothesis"],
            Self::Csp => ["context", "question"],
            Self::Smt => ["trial_description", "sample_description"],
        }
    }
}

impl fmt::Display for ReasoningType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown reasoning type `{0}` (expected LP, FOL, CSP or SMT)")]
pub struct UnknownReasoningType(pub String);

impl FromStr for ReasoningType {
    type Err = UnknownReasoningType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LP" => Ok(Self::Lp),
            "FOL" => Ok(Self::Fol),
            "CSP" => Ok(Self::Csp),
            // The decomposition prompt names the satisfiability category SAT.
            "SMT" | "SAT" => Ok(Self::Smt),
            _ => Err(UnknownReasoningType(s.to_string())),
        }
    }
}

/// Identifier of a decomposed question, always of the form `ques_<k>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ProblemId(String);

impl ProblemId {
    pub fn new(index: usize) -> Self {
        ProblemId(format!("ques_{index}"))
    }

    pub fn parse(s: &str) -> Option<Self> {
        let digits = s.strip_prefix("ques_")?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return None;
        }
        Some(ProblemId(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The numeric suffix `k`.
    pub fn index(&self) -> usize {
        self.0["ques_".len()..].parse().unwrap_or(0)
    }
}

impl TryFrom<String> for ProblemId {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        ProblemId::parse(&value).ok_or_else(|| format!("problem id `{value}` does not match `ques_<k>`"))
    }
}

impl From<ProblemId> for String {
    fn from(id: ProblemId) -> String {
        id.0
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One labeled answer option, e.g. `A) True`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerOption {
    /// Label including the closing parenthesis, e.g. `A)`.
    pub label: String,
    pub text: String,
}

impl AnswerOption {
    pub fn new(label: impl Into<String>, text: impl Into<String>) -> Self {
        AnswerOption { label: label.into(), text: text.into() }
    }

    /// Label for the `index`-th option: `A)`, `B)`, ...
    pub fn label_for(index: usize) -> String {
        let letter = (b'A' + (index % 26) as u8) as char;
        format!("{letter})")
    }

    /// Parses `"A) text"` / `"(A) text"`; returns `None` for unlabeled text.
    pub fn parse_labeled(s: &str) -> Option<Self> {
        let s = s.trim();
        let s = s.strip_prefix('(').unwrap_or(s);
        let mut chars = s.chars();
        let letter = chars.next()?;
        if !letter.is_ascii_uppercase() || chars.next()? != ')' {
            return None;
        }
        Some(AnswerOption::new(format!("{letter})"), s[2..].trim()))
    }

    /// Labels unlabeled options in order, keeping existing labels.
    pub fn label_all<S: AsRef<str>>(raw: &[S]) -> Vec<AnswerOption> {
        raw.iter()
            .enumerate()
            .map(|(i, s)| {
                AnswerOption::parse_labeled(s.as_ref())
                    .unwrap_or_else(|| AnswerOption::new(Self::label_for(i), s.as_ref().trim()))
            })
            .collect()
    }
}

impl fmt::Display for AnswerOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.label, self.text)
    }
}

/// Paradigm-specific text components of a sub-problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Components {
    Deductive { premise: String, hypothesis: String },
    Constraint { context: String, question: String },
    Eligibility { trial_description: String, sample_description: String },
}

impl Components {
    pub fn for_type(ty: ReasoningType, first: String, second: String) -> Self {
        match ty {
            ReasoningType::Lp | ReasoningType::Fol => Components::Deductive { premise: first, hypothesis: second },
            ReasoningType::Csp => Components::Constraint { context: first, question: second },
            ReasoningType::Smt => {
                Components::Eligibility { trial_description: first, sample_description: second }
            }
        }
    }

    pub fn matches(&self, ty: ReasoningType) -> bool {
        matches!(
            (self, ty),
            (Components::Deductive { .. }, ReasoningType::Lp | ReasoningType::Fol)
                | (Components::Constraint { .. }, ReasoningType::Csp)
                | (Components::Eligibility { .. }, ReasoningType::Smt)
        )
    }

    /// The two component texts in schema order.
    pub fn texts(&self) -> (&str, &str) {
        match self {
            Components::Deductive { premise, hypothesis } => (premise, hypothesis),
            Components::Constraint { context, question } => (context, question),
            Components::Eligibility { trial_description, sample_description } => {
                (trial_description, sample_description)
            }
        }
    }

    pub fn as_map(&self) -> BTreeMap<&'static str, &str> {
        let keys = match self {
            Components::Deductive { .. } => ["premise", "hypothesis"],
            Components::Constraint { .. } => ["context", "question"],
            Components::Eligibility { .. } => ["trial_description", "sample_description"],
        };
        let (a, b) = self.texts();
        BTreeMap::from([(keys[0], a), (keys[1], b)])
    }
}

/// One decomposed question `Q_i` with its reasoning type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubProblem {
    pub problem_id: ProblemId,
    pub reasoning_type: ReasoningType,
    pub components: Components,
    pub options: Vec<AnswerOption>,
    /// Original type token when it differed from the canonical name (`SAT`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_alias: Option<String>,
}

impl SubProblem {
    pub fn option(&self, label: &str) -> Option<&AnswerOption> {
        self.options.iter().find(|o| o.label == label)
    }

    /// All component text plus options, for backends that formalize the raw problem.
    pub fn full_text(&self) -> String {
        let (a, b) = self.components.texts();
        let mut out = format!("{a}\n\n{b}");
        for o in &self.options {
            out.push('\n');
            out.push_str(&o.to_string());
        }
        out
    }
}

pub const DEFAULT_GOAL: &str = "Solve the reasoning problem";

/// Output of decomposition: the ordered sub-problems and the overall goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposedInput {
    pub sub_problems: Vec<SubProblem>,
    pub overall_goal: String,
}

impl DecomposedInput {
    pub fn get(&self, id: &ProblemId) -> Option<&SubProblem> {
        self.sub_problems.iter().find(|p| &p.problem_id == id)
    }
}

/// One CSP solution: variable name to value, in model declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<(String, i64)>);

impl Assignment {
    pub fn get(&self, var: &str) -> Option<i64> {
        self.0.iter().find(|(k, _)| k == var).map(|(_, v)| *v)
    }
}

/// Paradigm-level engine result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverVerdict {
    Proved,
    Disproved,
    Unknown { note: Option<String> },
    Sat,
    Unsat,
    /// Solutions in lexicographic order; `complete` is false when the cap was hit.
    Solutions { assignments: Vec<Assignment>, complete: bool },
    EngineError { detail: String },
}

impl SolverVerdict {
    pub fn unknown() -> Self {
        SolverVerdict::Unknown { note: None }
    }

    pub fn unknown_with(note: impl Into<String>) -> Self {
        SolverVerdict::Unknown { note: Some(note.into()) }
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            SolverVerdict::Proved => "proved",
            SolverVerdict::Disproved => "disproved",
            SolverVerdict::Unknown { .. } => "unknown",
            SolverVerdict::Sat => "sat",
            SolverVerdict::Unsat => "unsat",
            SolverVerdict::Solutions { .. } => "solutions",
            SolverVerdict::EngineError { .. } => "engine_error",
        }
    }
}

impl fmt::Display for SolverVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverVerdict::Unknown { note: Some(n) } => write!(f, "unknown ({n})"),
            SolverVerdict::Solutions { assignments, complete } => {
                write!(f, "{} solution(s){}", assignments.len(), if *complete { "" } else { " (truncated)" })
            }
            SolverVerdict::EngineError { detail } => write!(f, "engine error: {detail}"),
            other => f.write_str(other.short_name()),
        }
    }
}

/// Final per-question answer: an option label, or Unknown when the pipeline failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Label(String),
    Unknown,
}

impl Answer {
    pub fn label(&self) -> Option<&str> {
        match self {
            Answer::Label(l) => Some(l),
            Answer::Unknown => None,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Label(l) => f.write_str(l),
            Answer::Unknown => f.write_str("Unknown"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reasoning_type_round_trips_and_aliases_sat() {
        for t in ReasoningType::ALL {
            assert_eq!(t.as_str().parse::<ReasoningType>().unwrap(), t);
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(serde_json::from_str::<ReasoningType>(&json).unwrap(), t);
        }
        assert_eq!("SAT".parse::<ReasoningType>().unwrap(), ReasoningType::Smt);
        assert_eq!(serde_json::from_str::<ReasoningType>("\"SAT\"").unwrap(), ReasoningType::Smt);
        assert!("ASP".parse::<ReasoningType>().is_err());
    }

    #[test]
    fn problem_id_pattern() {
        assert!(ProblemId::parse("ques_1").is_some());
        assert_eq!(ProblemId::parse("ques_12").unwrap().index(), 12);
        for bad in ["ques_", "ques_0", "ques_01", "q_1", "ques_1a", ""] {
            assert!(ProblemId::parse(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn options_are_labeled_when_missing() {
        let opts = AnswerOption::label_all(&["True", "False"]);
        assert_eq!(opts[0].to_string(), "A) True");
        assert_eq!(opts[1].to_string(), "B) False");
        let kept = AnswerOption::label_all(&["B) x", "(C) y"]);
        assert_eq!(kept[0].label, "B)");
        assert_eq!(kept[1].label, "C)");
        assert_eq!(kept[1].text, "y");
    }
}
